use serde::Serialize;

use super::HypergraphError;
use crate::factorisation::{is_base_label, OneFactor};
use crate::field::{FieldElement, GaloisField};
use crate::projective::{Label, ProjPoint, ProjectiveLine};

/// Pairs of points covered by an edge of both factors.
///
/// When computed algebraically against `F_{1,0}`, the two solution sets of
/// `f(x) = m(x)` and `f^-1(x) = m(x)` are kept; each solution contributes one
/// repeated pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapResult {
    pub count: usize,
    pub repeated_pairs: Vec<(u32, u32)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_eq_m: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finv_eq_m: Option<Vec<u32>>,
}

/// Counts repeated pairs by scanning edges: a pair of an `F2` edge repeats
/// when both points share an edge of `F1`.
pub fn pair_overlap(a: &OneFactor, b: &OneFactor) -> Result<OverlapResult, HypergraphError> {
    if a.edges().len() != b.edges().len() {
        return Err(HypergraphError::SizeMismatch);
    }
    if a.same_edges(b) {
        return Err(HypergraphError::SameFactor);
    }
    let n = a.edges().len() * 3;
    let mut edge_of = vec![0u32; n];
    for (i, e) in a.edges().iter().enumerate() {
        for v in e.vertices() {
            edge_of[v as usize] = i as u32;
        }
    }
    let mut repeated_pairs: Vec<(u32, u32)> = b
        .edges()
        .iter()
        .flat_map(|e| e.pairs())
        .filter(|&(x, y)| edge_of[x as usize] == edge_of[y as usize])
        .collect();
    repeated_pairs.sort_unstable();
    Ok(OverlapResult {
        count: repeated_pairs.len(),
        repeated_pairs,
        f_eq_m: None,
        finv_eq_m: None,
    })
}

/// Overlap of `F_{1,0}` with `F_{alpha,beta}` from the closed-form solution
/// sets of `f(x) = m(x)` and `f^-1(x) = m(x)`.
///
/// Special labels have explicit solution sets; every other label reduces to
/// one of two quadratics:
///
/// ```text
/// f = m:     beta x^2 - (a^2 + ab + b^2 + b - 1) x + (a^2 + ab + b^2 - a - b) = 0
/// f^-1 = m:  (1 - b) x^2 + (a^2 + ab + b^2 - a - b - 1) x + (a + b) = 0
/// ```
pub fn overlap_algebraic(field: &GaloisField, label: Label) -> Result<OverlapResult, HypergraphError> {
    if label.alpha.is_zero() {
        return Err(HypergraphError::AlphaZero);
    }
    if is_base_label(field, label) {
        return Err(HypergraphError::IsBaseFactor);
    }
    let f = field;
    let q = f.order();
    let (a, b) = (label.alpha, label.beta);
    let one = FieldElement::ONE;
    let minus_one = f.neg(one);
    let inf = ProjPoint::Infinity;
    let fin = ProjPoint::Finite;
    let quad = |qa, qb, qc| -> Vec<ProjPoint> {
        f.solve_quadratic(qa, qb, qc)
            .expect("leading coefficient is nonzero")
            .into_iter()
            .map(fin)
            .collect()
    };
    let sum = f.add(a, b);
    // a^2 + ab + b^2
    let s2 = f.add(f.add(f.mul(a, a), f.mul(a, b)), f.mul(b, b));

    let mut f_eq_m: Vec<ProjPoint> = if b.is_zero() {
        if a == minus_one {
            vec![inf]
        } else {
            vec![inf, fin(f.div(a, f.add(one, a)).expect("alpha != -1"))]
        }
    } else if sum == one {
        vec![fin(one), fin(f.neg(a))]
    } else {
        let lin = f.neg(f.sub(f.add(s2, b), one));
        let cst = f.sub(s2, sum);
        quad(b, lin, cst)
    };

    let mut finv_eq_m: Vec<ProjPoint> = if b == one {
        if a == one {
            vec![inf]
        } else {
            vec![inf, fin(f.inv(f.sub(one, a)).expect("alpha != 1"))]
        }
    } else if sum.is_zero() {
        vec![fin(FieldElement::ZERO), fin(f.sub(one, a))]
    } else {
        let lin = f.sub(f.sub(s2, sum), one);
        quad(f.sub(one, b), lin, sum)
    };

    for set in [&mut f_eq_m, &mut finv_eq_m] {
        set.sort_unstable();
        set.dedup();
    }

    let line = ProjectiveLine::new(f);
    let fmap = line.make_f();
    let finv = line.inverse(&fmap);
    let pair = |x: ProjPoint, y: ProjPoint| {
        let (x, y) = (x.index(q), y.index(q));
        (x.min(y), x.max(y))
    };
    let mut repeated_pairs: Vec<(u32, u32)> = f_eq_m
        .iter()
        .map(|&x| pair(x, line.apply(&fmap, x)))
        .chain(finv_eq_m.iter().map(|&x| pair(x, line.apply(&finv, x))))
        .collect();
    repeated_pairs.sort_unstable();
    Ok(OverlapResult {
        count: f_eq_m.len() + finv_eq_m.len(),
        repeated_pairs,
        f_eq_m: Some(f_eq_m.iter().map(|x| x.index(q)).collect()),
        finv_eq_m: Some(finv_eq_m.iter().map(|x| x.index(q)).collect()),
    })
}
