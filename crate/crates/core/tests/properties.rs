use proptest::prelude::*;

use hyperfactor::factorisation::{is_base_label, partner_label, Factorisation};
use hyperfactor::field::GaloisField;
use hyperfactor::hypergraph::{has_hamilton_berge_cycle, pair_overlap, union, BergeOutcome, SearchBudget};
use hyperfactor::projective::{Label, ProjPoint, ProjectiveLine};

const FIELDS: [u32; 8] = [2, 4, 8, 9, 25, 27, 32, 125];
const ORDERS: [u32; 6] = [5, 8, 11, 17, 29, 32];

fn field() -> impl Strategy<Value = GaloisField> {
    proptest::sample::select(FIELDS.to_vec()).prop_map(|q| GaloisField::with_order(q).unwrap())
}

proptest! {
    #[test]
    fn field_axioms(f in field(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let q = f.order();
        let (a, b, c) = (f.element(a % q), f.element(b % q), f.element(c % q));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        prop_assert_eq!(f.pow(a, q as u64), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.element(1));
        }
        prop_assert_eq!(f.parse(&f.format(a)).unwrap(), a);
    }

    #[test]
    fn mobius_composition_acts_on_points(f in field(), e in prop::array::uniform8(any::<u32>()), x in any::<u32>()) {
        let q = f.order();
        let line = ProjectiveLine::new(&f);
        let el = |i: usize| f.element(e[i] % q);
        let (Ok(m1), Ok(m2)) = (
            line.matrix(el(0), el(1), el(2), el(3)),
            line.matrix(el(4), el(5), el(6), el(7)),
        ) else {
            return Ok(());
        };
        let p = ProjPoint::from_index(&f, x % (q + 1));
        prop_assert_eq!(line.apply(&line.compose(&m1, &m2), p), line.apply(&m1, line.apply(&m2, p)));
        prop_assert_eq!(line.apply(&line.inverse(&m1), line.apply(&m1, p)), p);
    }

    #[test]
    fn partner_labels_name_the_same_factor(qi in 0..ORDERS.len(), a in any::<u32>(), b in any::<u32>()) {
        let fam = Factorisation::with_order(ORDERS[qi]).unwrap();
        let f = fam.field();
        let q = f.order();
        let label = Label::new(f.element(1 + a % (q - 1)), f.element(b % q));
        let partner = partner_label(f, label);
        prop_assert_eq!(fam.index_of(label), fam.index_of(partner));
        prop_assert_eq!(is_base_label(f, label), fam.index_of(label) == Some(0));
    }

    #[test]
    fn overlap_is_symmetric(qi in 0..ORDERS.len(), i in any::<usize>(), j in any::<usize>()) {
        let fam = Factorisation::with_order(ORDERS[qi]).unwrap();
        let (i, j) = (i % fam.len(), j % fam.len());
        prop_assume!(i != j);
        let ab = pair_overlap(fam.factor(i), fam.factor(j)).unwrap();
        let ba = pair_overlap(fam.factor(j), fam.factor(i)).unwrap();
        prop_assert_eq!(ab.count, ba.count);
        prop_assert_eq!(ab.repeated_pairs, ba.repeated_pairs);
    }

    #[test]
    fn found_cycles_replay(qi in 0..ORDERS.len(), t in prop::array::uniform3(any::<usize>())) {
        let fam = Factorisation::with_order(ORDERS[qi]).unwrap();
        let [a, b, c] = t.map(|x| x % fam.len());
        prop_assume!(a != b && b != c && a != c);
        let h = union(&[fam.factor(a), fam.factor(b), fam.factor(c)]).unwrap();
        match has_hamilton_berge_cycle(&h, SearchBudget::unlimited()) {
            BergeOutcome::Found(cycle) => prop_assert!(cycle.is_hamiltonian_in(&h)),
            BergeOutcome::NoCycle => prop_assert!(![5, 8, 11].contains(&fam.q()), "every triple is Hamiltonian for q = {}", fam.q()),
            BergeOutcome::Timeout => prop_assert!(false, "unlimited budget timed out"),
        }
    }

    #[test]
    fn dump_load_round_trip(qi in 0..ORDERS.len(), human in any::<bool>()) {
        let fam = Factorisation::with_order(ORDERS[qi]).unwrap();
        let back = Factorisation::load(&fam.dump(human)).unwrap();
        prop_assert_eq!(back.dump(false), fam.dump(false));
    }
}
