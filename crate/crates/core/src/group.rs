//! Subgroups of PGL(2,q) generated by order-3 maps: closure, orbits on the
//! projective line, and classification by order.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::factorisation::Factorisation;
use crate::field::{is_prime, prime_power, FieldElement, GaloisField};
use crate::hypergraph::DisjointSets;
use crate::projective::{Label, MobiusMap, ProjPoint, ProjectiveLine};

/// Largest order of a proper subgroup that two order-3 generators can
/// produce in the cases where early exit is allowed.
pub const EARLY_EXIT_THRESHOLD: usize = 60;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("q = {0} is outside the supported range")]
    OutOfRange(u32),
    #[error("field has characteristic {0}, expected 2")]
    WrongCharacteristic(u32),
}

/// How much of a closure to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosurePolicy {
    /// Full element set, however large.
    Exact,
    /// Stop once the group exceeds [`EARLY_EXIT_THRESHOLD`].
    EarlyExit,
}

#[derive(Clone, Debug)]
pub struct GeneratedSubgroup {
    pub generators: Vec<MobiusMap>,
    /// Elements in breadth-first discovery order, identity first.
    pub elements: Vec<MobiusMap>,
    pub order3_count: usize,
    /// Orbits on point indices, ordered by smallest member.
    pub orbits: Vec<Vec<u32>>,
}

impl GeneratedSubgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits.len() == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubgroupClass {
    C3,
    A4,
    S4,
    A5,
    FullPsl,
    Other(usize),
}

impl std::fmt::Display for SubgroupClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubgroupClass::Other(n) => write!(f, "Other({n})"),
            SubgroupClass::FullPsl => f.write_str("FullPSL"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl Serialize for SubgroupClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `|PSL(2,q)| = q(q^2-1)/gcd(2,q-1)`.
pub fn psl_order(q: u32) -> u64 {
    let q = q as u64;
    let g = if q % 2 == 1 { 2 } else { 1 };
    q * (q * q - 1) / g
}

/// Whether `q` is an odd prime or `2^p` with `p` prime: the cases where a
/// subgroup generated by two order-3 elements above order 60 is all of PSL.
pub fn early_exit_sound(q: u32) -> bool {
    match prime_power(q) {
        Some((p, 1)) => p > 2,
        Some((2, l)) => is_prime(l),
        _ => false,
    }
}

/// Breadth-first closure of `gens` under left multiplication by each
/// generator and its inverse.
///
/// With `cap`, fails as soon as the group has more than `cap` elements.
pub fn generate(
    line: &ProjectiveLine<'_>,
    gens: &[MobiusMap],
    cap: Option<usize>,
) -> Result<GeneratedSubgroup, GroupError> {
    let elements = closure(line, gens, cap).map_err(|_| GroupError::CapExceeded(cap.unwrap_or(usize::MAX)))?;
    let id = line.identity();
    let order3_count = elements.iter().filter(|&m| *m != id && line.power(m, 3) == id).count();
    Ok(GeneratedSubgroup {
        generators: gens.to_vec(),
        elements,
        order3_count,
        orbits: orbits(line, gens),
    })
}

/// Group order, or `None` once it passes `limit`.
pub fn order_up_to(line: &ProjectiveLine<'_>, gens: &[MobiusMap], limit: usize) -> Option<usize> {
    closure(line, gens, Some(limit)).ok().map(|e| e.len())
}

fn closure(line: &ProjectiveLine<'_>, gens: &[MobiusMap], cap: Option<usize>) -> Result<Vec<MobiusMap>, ()> {
    let mut steps: Vec<MobiusMap> = Vec::with_capacity(gens.len() * 2);
    for g in gens {
        for s in [*g, line.inverse(g)] {
            if !steps.contains(&s) {
                steps.push(s);
            }
        }
    }
    let id = line.identity();
    let mut seen: HashSet<MobiusMap> = HashSet::from([id]);
    let mut elements = vec![id];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for s in &steps {
            let y = line.compose(s, &x);
            if seen.insert(y) {
                elements.push(y);
                if cap.is_some_and(|c| elements.len() > c) {
                    return Err(());
                }
                queue.push_back(y);
            }
        }
    }
    Ok(elements)
}

/// Orbits of the generated group on the points, from the generator
/// permutations alone.
pub fn orbits(line: &ProjectiveLine<'_>, gens: &[MobiusMap]) -> Vec<Vec<u32>> {
    let mut d = DisjointSets::new(line.size() as usize);
    for g in gens {
        for (x, &y) in line.permutation(g).iter().enumerate() {
            d.union(x as u32, y);
        }
    }
    d.blocks()
}

/// Transitivity on PG(1,q) by breadth-first search of the orbit of infinity.
pub fn is_transitive(line: &ProjectiveLine<'_>, gens: &[MobiusMap]) -> bool {
    let q = line.field().order();
    let n = line.size() as usize;
    let mut seen = vec![false; n];
    seen[q as usize] = true;
    let mut count = 1;
    let mut queue = VecDeque::from([ProjPoint::Infinity]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = line.apply(g, x);
            let i = y.index(q) as usize;
            if !seen[i] {
                seen[i] = true;
                count += 1;
                queue.push_back(y);
            }
        }
    }
    count == n
}

/// Tag for a subgroup of PSL(2,q) from its order alone.
pub fn classify_order(order: usize, q: u32) -> SubgroupClass {
    if order as u64 == psl_order(q) {
        return SubgroupClass::FullPsl;
    }
    match order {
        3 => SubgroupClass::C3,
        12 => SubgroupClass::A4,
        24 => SubgroupClass::S4,
        60 => SubgroupClass::A5,
        n => SubgroupClass::Other(n),
    }
}

pub fn classify(g: &GeneratedSubgroup, q: u32) -> SubgroupClass {
    classify_order(g.order(), q)
}

/// Classification of `<f, m_{alpha,beta}>`.
///
/// Under [`ClosurePolicy::EarlyExit`], and only where [`early_exit_sound`]
/// holds, any group past order 60 is reported as the full PSL.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelClass {
    pub alpha: u32,
    pub beta: u32,
    /// `None` when the closure stopped early.
    pub order: Option<usize>,
    pub class: SubgroupClass,
    pub transitive: bool,
}

pub fn classify_label(line: &ProjectiveLine<'_>, label: Label, policy: ClosurePolicy) -> LabelClass {
    let q = line.field().order();
    let gens = [line.make_f(), line.make_m_label(label).expect("alpha is nonzero")];
    let transitive = is_transitive(line, &gens);
    let early = policy == ClosurePolicy::EarlyExit && early_exit_sound(q);
    let (order, class) = if early {
        match order_up_to(line, &gens, EARLY_EXIT_THRESHOLD) {
            Some(n) => (Some(n), classify_order(n, q)),
            None => (None, SubgroupClass::FullPsl),
        }
    } else {
        let n = order_up_to(line, &gens, usize::MAX).expect("uncapped");
        (Some(n), classify_order(n, q))
    };
    LabelClass {
        alpha: label.alpha.index(),
        beta: label.beta.index(),
        order,
        class,
        transitive,
    }
}

/// Classification of every factor other than `F_{1,0}` against it, in
/// factor order.
pub fn classify_all(fam: &Factorisation, policy: ClosurePolicy) -> Vec<LabelClass> {
    use rayon::prelude::*;
    let line = ProjectiveLine::new(fam.field());
    (1..fam.len())
        .into_par_iter()
        .map(|i| classify_label(&line, fam.factor(i).label(), policy))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct A4Census {
    pub q: u32,
    /// Unordered factor pairs generating a group of order 12.
    pub a4_pair_count: usize,
    /// Factors `F` with `<f, m_F>` of order 12.
    pub a4_base_partners: usize,
    /// `q(q^2-1)/24`.
    pub expected_copies: u64,
}

/// Counts pairs of factors whose two maps generate an A4.
pub fn a4_census(fam: &Factorisation) -> Result<A4Census, GroupError> {
    use rayon::prelude::*;
    let q = fam.q();
    if !(is_prime(q) && q > 2 && q <= 29 && q % 3 == 2) {
        return Err(GroupError::OutOfRange(q));
    }
    let line = ProjectiveLine::new(fam.field());
    let maps: Vec<MobiusMap> = fam
        .factors()
        .iter()
        .map(|f| line.make_m_label(f.label()).expect("alpha is nonzero"))
        .collect();
    let is_a4 = |i: usize, j: usize| order_up_to(&line, &[maps[i], maps[j]], 12) == Some(12);
    let a4_pair_count = (0..maps.len())
        .into_par_iter()
        .map(|i| (i + 1..maps.len()).filter(|&j| is_a4(i, j)).count())
        .sum();
    let a4_base_partners = (1..maps.len()).filter(|&j| is_a4(0, j)).count();
    Ok(A4Census {
        q,
        a4_pair_count,
        a4_base_partners,
        expected_copies: q as u64 * (q as u64 * q as u64 - 1) / 24,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SerreConditions {
    /// `x^2 + x = 1` has a solution.
    pub has_a4: bool,
    /// Additionally `y^2 + z^2 = 1` has a solution.
    pub has_a5: bool,
}

pub fn serre_conditions(field: &GaloisField) -> Result<SerreConditions, GroupError> {
    let p = field.characteristic();
    if p != 2 {
        return Err(GroupError::WrongCharacteristic(p));
    }
    let one = FieldElement::ONE;
    let has_a4 = !field.solve_quadratic(one, one, one).expect("monic").is_empty();
    // y^2 + z^2 = 1: for each y, z^2 = 1 - y^2 needs a square root.
    let sum_of_squares = field
        .elements()
        .any(|y| field.sqrt(field.sub(one, field.mul(y, y))).is_some());
    Ok(SerreConditions {
        has_a4,
        has_a5: has_a4 && sum_of_squares,
    })
}

/// Labels `(alpha, beta)` of factors other than `F_{1,0}`, one per factor.
pub fn non_base_labels(fam: &Factorisation) -> impl Iterator<Item = Label> + '_ {
    (1..fam.len()).map(|i| fam.factor(i).label())
}
