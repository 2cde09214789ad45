use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::VerifyError;
use crate::factorisation::{is_base_label, Factorisation};
use crate::field::{FieldElement, GaloisField};
use crate::hypergraph::{overlap_algebraic, pair_overlap};
use crate::projective::Label;

/// Histogram of overlaps between `F_{1,0}` and every other factor.
pub fn overlap_distribution(fam: &Factorisation) -> BTreeMap<usize, usize> {
    let counts: Vec<usize> = (1..fam.len())
        .into_par_iter()
        .map(|j| {
            pair_overlap(fam.factor(0), fam.factor(j))
                .expect("distinct factors")
                .count
        })
        .collect();
    let mut hist = BTreeMap::new();
    for c in counts {
        *hist.entry(c).or_insert(0) += 1;
    }
    hist
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinusOneOverlap {
    pub overlap: usize,
    pub algebraic: usize,
    pub five_is_square: bool,
    /// 3 when 5 is a square, else 1.
    pub predicted: usize,
}

/// Overlap of `F_{1,0}` with `F_{-1,0}`, for characteristic other than 2 and 5.
pub fn minus_one_overlap(fam: &Factorisation) -> Option<MinusOneOverlap> {
    let f = fam.field();
    if matches!(f.characteristic(), 2 | 5) {
        return None;
    }
    let label = Label::new(f.constant(-1), FieldElement::ZERO);
    let j = fam.index_of(label)?;
    if j == 0 {
        return None;
    }
    let five_is_square = f.is_square(f.constant(5));
    Some(MinusOneOverlap {
        overlap: pair_overlap(fam.factor(0), fam.factor(j)).ok()?.count,
        algebraic: overlap_algebraic(f, label).ok()?.count,
        five_is_square,
        predicted: if five_is_square { 3 } else { 1 },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceScan {
    pub ell: u32,
    /// Nonzero `a` with `Tr(a/(a^2+a+1)^2) = 0` or `Tr(a^2/(a^2+a+1)^2) = 0`.
    pub trace_zero_witnesses: Vec<u32>,
    /// Every `x` outside `{0, 1}` has `Tr(x + 1/x) = 1`.
    pub all_trace1: bool,
    /// First `x` outside `{0, 1}` with `Tr(x + 1/x) = 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace1_counterexample: Option<u32>,
    /// Number of `x` outside `{0, 1}` with `Tr(x + 1/x) = 1`.
    pub poly_root_count: usize,
    /// Degree of `x^(2^(l-1)) (Tr(x + 1/x) + 1)` after reducing `x^(2^l)` to `x`.
    pub poly_degree: u64,
    /// `2^(l-1) + 2^(l-2)`.
    pub root_bound: u64,
}

/// Exponents with odd coefficient in `x^(2^(l-1)) (Tr(x + 1/x) + 1)` over
/// GF(2^l), using `x^(2^l) = x`.
fn trace_polynomial_support(ell: u32) -> Vec<u64> {
    let half = 1u64 << (ell - 1);
    let full = 1u64 << ell;
    let mut parity: BTreeMap<u64, bool> = BTreeMap::new();
    let mut add = |e: u64| {
        let e = if e == full { 1 } else { e };
        *parity.entry(e).or_insert(false) ^= true;
    };
    for i in 0..ell {
        add(half + (1 << i));
        add(half - (1 << i));
    }
    add(half);
    parity.into_iter().filter(|&(_, odd)| odd).map(|(e, _)| e).collect()
}

/// Scans GF(2^l) for the trace conditions on overlaps of the factors
/// `F_{a,0}`, counting roots both by the trace and by the explicit polynomial.
pub fn trace_condition_scan(ell: u32) -> Result<TraceScan, VerifyError> {
    if !(3..=17).contains(&ell) {
        return Err(VerifyError::OutOfRange {
            what: "l",
            value: ell,
            range: "3..=17",
        });
    }
    if ell.is_multiple_of(2) {
        return Err(VerifyError::EvenDegree(ell));
    }
    let f = GaloisField::new(2, ell)?;
    let one = FieldElement::ONE;
    let support = trace_polynomial_support(ell);
    let poly_degree = *support.last().expect("nonempty");

    let trace_zero_witnesses: Vec<u32> = f
        .elements()
        .skip(1)
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter(|&a| {
            let c = f.add(f.add(f.mul(a, a), a), one);
            let c2 = f.mul(c, c);
            let t1 = f.trace(f.div(a, c2).expect("a^2+a+1 has no root"));
            let t2 = f.trace(f.div(f.mul(a, a), c2).expect("a^2+a+1 has no root"));
            t1 == 0 || t2 == 0
        })
        .map(|a| a.index())
        .collect();

    let by_trace: Vec<bool> = f
        .elements()
        .skip(2)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|x| f.trace(f.add(x, f.inv(x).expect("nonzero"))) == 1)
        .collect();
    let by_poly: Vec<bool> = f
        .elements()
        .skip(2)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|x| {
            support
                .iter()
                .fold(FieldElement::ZERO, |acc, &e| f.add(acc, f.pow(x, e)))
                .is_zero()
        })
        .collect();
    assert_eq!(by_trace, by_poly, "trace and polynomial routes disagree for l = {ell}");

    let poly_root_count = by_trace.iter().filter(|&&b| b).count();
    let trace1_counterexample = by_trace.iter().position(|&b| !b).map(|i| i as u32 + 2);
    Ok(TraceScan {
        ell,
        trace_zero_witnesses,
        all_trace1: trace1_counterexample.is_none(),
        trace1_counterexample,
        poly_root_count,
        poly_degree,
        root_bound: (1 << (ell - 1)) + (1 << (ell - 2)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminantCandidate {
    pub alpha: u32,
    pub beta: u32,
    pub overlap: usize,
    pub algebraic_overlap: usize,
    /// Discriminant of the quadratic left after the special-case row.
    pub discriminant: u32,
    /// The same discriminant from its closed factorised form.
    pub closed_form: u32,
    pub discriminant_is_square: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminantReport {
    pub alpha: u32,
    pub candidates: Vec<DiscriminantCandidate>,
    /// `(a^2 - a + 1)(a^2 + a + 1) = a^4 + a^2 + 1`.
    pub identity_holds: bool,
    /// Some candidate has overlap 4 and a nonzero square discriminant.
    pub confirmed: bool,
}

/// Over GF(5^l), checks that one of `F_{a,-a}`, `F_{a,1-a}`, `F_{a^2,1-a^2}`
/// has overlap 4 with `F_{1,0}`, together with the discriminants involved.
pub fn overlap_discriminant_check(fam: &Factorisation, alpha: FieldElement) -> Result<DiscriminantReport, VerifyError> {
    let f = fam.field();
    let (p, l) = (f.characteristic(), f.degree());
    if p != 5 || l % 2 == 0 || l == 1 {
        return Err(VerifyError::WrongField(f.order()));
    }
    if f.in_prime_subfield(alpha) {
        return Err(VerifyError::AlphaInSubfield);
    }
    let one = FieldElement::ONE;
    let sq = |x| f.mul(x, x);
    let a = alpha;
    let a2 = sq(a);
    // D1 = (a-1)^2 (a^2-a+1), D2(t) = (t+1)^2 (t^2+t+1)
    let d1 = f.mul(sq(f.sub(a, one)), f.add(f.sub(a2, a), one));
    let d2 = |t| f.mul(sq(f.add(t, one)), f.add(f.add(sq(t), t), one));

    let discriminant = |label: Label| -> FieldElement {
        let (x, y) = (label.alpha, label.beta);
        let s = f.add(x, y);
        let s2 = f.add(f.add(sq(x), f.mul(x, y)), sq(y));
        let (qa, qb, qc) = if s.is_zero() {
            // f = m quadratic; the other set is {0, 1 - alpha}
            (y, f.neg(f.sub(f.add(s2, y), one)), f.sub(s2, s))
        } else {
            // f^-1 = m quadratic; the other set is {1, -alpha}
            (f.sub(one, y), f.sub(f.sub(s2, s), one), s)
        };
        f.sub(sq(qb), f.mul(f.constant(4), f.mul(qa, qc)))
    };

    let mut candidates = Vec::new();
    for (label, closed) in [
        (Label::new(a, f.neg(a)), d1),
        (Label::new(a, f.sub(one, a)), d2(a)),
        (Label::new(a2, f.sub(one, a2)), d2(a2)),
    ] {
        debug_assert!(!is_base_label(f, label));
        let j = fam.index_of(label).expect("alpha is nonzero");
        let disc = discriminant(label);
        candidates.push(DiscriminantCandidate {
            alpha: label.alpha.index(),
            beta: label.beta.index(),
            overlap: pair_overlap(fam.factor(0), fam.factor(j))
                .expect("distinct factors")
                .count,
            algebraic_overlap: overlap_algebraic(f, label).expect("not the base factor").count,
            discriminant: disc.index(),
            closed_form: closed.index(),
            discriminant_is_square: f.is_square(disc),
        });
    }
    let lhs = f.mul(f.add(f.sub(a2, a), one), f.add(f.add(a2, a), one));
    let rhs = f.add(f.add(sq(a2), a2), one);
    let confirmed = candidates
        .iter()
        .any(|c| c.overlap == 4 && c.discriminant != 0 && c.discriminant_is_square);
    Ok(DiscriminantReport {
        alpha: a.index(),
        candidates,
        identity_holds: lhs == rhs,
        confirmed,
    })
}
