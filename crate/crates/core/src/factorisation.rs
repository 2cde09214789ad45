//! One-factors `F_{alpha,beta}` as orbit partitions of `m_{alpha,beta}`, and
//! the full family of them.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::field::{prime_power, FieldElement, FieldError, GaloisField};
use crate::projective::{Label, ProjError, ProjectiveLine};

#[derive(Debug, Error)]
pub enum FactorError {
    #[error("alpha must be nonzero")]
    AlphaZero,
    #[error("q = {0} is not congruent to 2 mod 3")]
    BadResidue(u32),
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u32),
    #[error("dump line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<ProjError> for FactorError {
    fn from(e: ProjError) -> Self {
        match e {
            ProjError::AlphaZero => FactorError::AlphaZero,
            ProjError::Field(f) => FactorError::Field(f),
            other => FactorError::Parse {
                line: 0,
                message: other.to_string(),
            },
        }
    }
}

/// A 3-edge, stored as ascending point indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge([u32; 3]);

impl Edge {
    pub fn new(mut v: [u32; 3]) -> Self {
        v.sort_unstable();
        debug_assert!(v[0] != v[1] && v[1] != v[2], "edge vertices must be distinct");
        Edge(v)
    }

    #[inline]
    pub fn vertices(&self) -> [u32; 3] {
        self.0
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.contains(&v)
    }

    /// The three vertex pairs of the edge, each ascending.
    pub fn pairs(&self) -> [(u32, u32); 3] {
        let [a, b, c] = self.0;
        [(a, b), (a, c), (b, c)]
    }
}

/// A perfect matching of the `q + 1` points by 3-edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneFactor {
    label: Label,
    edges: Vec<Edge>,
}

impl OneFactor {
    pub fn label(&self) -> Label {
        self.label
    }

    /// Edges in ascending order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Same edge set, regardless of label.
    pub fn same_edges(&self, other: &OneFactor) -> bool {
        self.edges == other.edges
    }
}

pub fn check_residue(q: u32) -> Result<(), FactorError> {
    if q % 3 != 2 {
        return Err(FactorError::BadResidue(q));
    }
    Ok(())
}

/// Orbits of `<m_{alpha,beta}>` on the projective line.
pub fn build_one_factor(field: &GaloisField, label: Label) -> Result<OneFactor, FactorError> {
    if label.alpha.is_zero() {
        return Err(FactorError::AlphaZero);
    }
    check_residue(field.order())?;
    let line = ProjectiveLine::new(field);
    let perm = line.permutation(&line.make_m_label(label)?);
    Ok(factor_from_permutation(label, &perm))
}

fn factor_from_permutation(label: Label, perm: &[u32]) -> OneFactor {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut edges = Vec::with_capacity(n / 3);
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let y = perm[x] as usize;
        let z = perm[y] as usize;
        assert!(
            perm[z] as usize == x && x != y && y != z && x != z,
            "m_{{alpha,beta}} must act with orbits of size 3"
        );
        seen[x] = true;
        seen[y] = true;
        seen[z] = true;
        edges.push(Edge::new([x as u32, y as u32, z as u32]));
    }
    edges.sort_unstable();
    OneFactor { label, edges }
}

/// The family `{F_{alpha,beta}}` with duplicate labels merged.
#[derive(Clone, Debug)]
pub struct Factorisation {
    field: GaloisField,
    factors: Vec<OneFactor>,
    /// Factor index per label, at `alpha * q + beta`; `u32::MAX` when alpha = 0.
    label_index: Vec<u32>,
}

impl Factorisation {
    /// Builds every `F_{alpha,beta}` and identifies factors by edge set.
    ///
    /// Factors are ordered by their canonical label, the smallest `(alpha, beta)`
    /// producing them, which is also the order of first appearance.
    pub fn build(field: GaloisField) -> Result<Self, FactorError> {
        let q = field.order();
        check_residue(q)?;
        let line = ProjectiveLine::new(&field);
        let mut factors: Vec<OneFactor> = Vec::new();
        let mut by_edges: HashMap<Vec<Edge>, u32> = HashMap::new();
        let mut label_index = vec![u32::MAX; (q * q) as usize];
        for alpha in field.elements().skip(1) {
            for beta in field.elements() {
                let label = Label::new(alpha, beta);
                let perm = line.permutation(&line.make_m_label(label)?);
                let factor = factor_from_permutation(label, &perm);
                let next = factors.len() as u32;
                let idx = *by_edges.entry(factor.edges.clone()).or_insert(next);
                if idx == next {
                    factors.push(factor);
                }
                label_index[(alpha.index() * q + beta.index()) as usize] = idx;
            }
        }
        Ok(Factorisation {
            field,
            factors,
            label_index,
        })
    }

    pub fn with_order(q: u32) -> Result<Self, FactorError> {
        prime_power(q).ok_or(FactorError::NotPrimePower(q))?;
        check_residue(q)?;
        Self::build(GaloisField::with_order(q)?)
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    pub fn vertex_count(&self) -> u32 {
        self.field.order() + 1
    }

    pub fn factors(&self) -> &[OneFactor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factor(&self, i: usize) -> &OneFactor {
        &self.factors[i]
    }

    /// Index of the factor labelled `(alpha, beta)`.
    pub fn index_of(&self, label: Label) -> Option<usize> {
        let q = self.q();
        let i = self.label_index[(label.alpha.index() * q + label.beta.index()) as usize];
        (i != u32::MAX).then_some(i as usize)
    }

    /// Index of `F_{1,0}`, always 0.
    pub fn base_index(&self) -> usize {
        0
    }

    /// All labels that produce factor `i`.
    pub fn labels_of(&self, i: usize) -> Vec<Label> {
        let q = self.q();
        self.label_index
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f as usize == i)
            .map(|(k, _)| Label::new(self.field.element(k as u32 / q), self.field.element(k as u32 % q)))
            .collect()
    }

    /// Number of labels per factor, in factor order.
    pub fn label_multiplicities(&self) -> Vec<usize> {
        let mut counts = vec![0; self.factors.len()];
        for &i in &self.label_index {
            if i != u32::MAX {
                counts[i as usize] += 1;
            }
        }
        counts
    }

    /// Checks that the factors partition all 3-subsets of the point set.
    pub fn verify_partition(&self) -> PartitionReport {
        let n = self.vertex_count() as usize;
        let mut seen = vec![false; n * n * n];
        let mut total = 0u64;
        let mut duplicates = 0u64;
        for e in self.factors.iter().flat_map(|f| &f.edges) {
            let [a, b, c] = e.0.map(|v| v as usize);
            let slot = &mut seen[(a * n + b) * n + c];
            if *slot {
                duplicates += 1;
            } else {
                *slot = true;
                total += 1;
            }
        }
        let expected = binomial(n as u64, 3);
        PartitionReport {
            total_edges: total,
            expected_edges: expected,
            duplicates,
            missing: expected - total,
        }
    }

    /// Text dump. With `human` set, infinity is written `inf` instead of `q`.
    pub fn dump(&self, human: bool) -> String {
        let q = self.q();
        let f = &self.field;
        let modulus = f.modulus().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        let mut out = format!(
            "q={} p={} l={} modulus={}\n",
            q,
            f.characteristic(),
            f.degree(),
            modulus
        );
        let point = |v: u32| {
            if human && v == q {
                "inf".to_string()
            } else {
                v.to_string()
            }
        };
        for (i, factor) in self.factors.iter().enumerate() {
            let _ = writeln!(
                out,
                "factor {} alpha={} beta={}",
                i,
                f.format(factor.label.alpha),
                f.format(factor.label.beta)
            );
            for e in &factor.edges {
                let [a, b, c] = e.0;
                let _ = writeln!(out, "{} {} {}", point(a), point(b), point(c));
            }
        }
        out
    }

    /// Parses a dump produced by [`Factorisation::dump`] in either variant.
    ///
    /// The field is rebuilt from the header and must reproduce the recorded
    /// modulus. Labels are recomputed from the stored factors.
    pub fn load(text: &str) -> Result<Self, FactorError> {
        let err = |line: usize, message: &str| FactorError::Parse {
            line,
            message: message.to_string(),
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty dump"))?;
        let mut fields = HashMap::new();
        for tok in header.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| err(1, "malformed header"))?;
            fields.insert(k, v);
        }
        let num = |k: &str| -> Result<u32, FactorError> {
            fields
                .get(k)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err(1, &format!("missing header field {k}")))
        };
        let (q, p, l) = (num("q")?, num("p")?, num("l")?);
        let field = GaloisField::new(p, l)?;
        let modulus = fields.get("modulus").copied().unwrap_or_default();
        let expected_modulus = field
            .modulus()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        if field.order() != q || modulus != expected_modulus {
            return Err(err(1, "header does not match the canonical field"));
        }
        check_residue(q)?;
        let point = |s: &str, line: usize| -> Result<u32, FactorError> {
            if s == "inf" {
                return Ok(q);
            }
            let v: u32 = s.parse().map_err(|_| err(line, "bad point"))?;
            if v > q {
                return Err(err(line, "point out of range"));
            }
            Ok(v)
        };
        let mut factors: Vec<OneFactor> = Vec::new();
        for (no, line) in lines {
            let no = no + 1;
            if let Some(rest) = line.strip_prefix("factor ") {
                let mut alpha = None;
                let mut beta = None;
                for tok in rest.split_whitespace().skip(1) {
                    match tok.split_once('=') {
                        Some(("alpha", v)) => alpha = Some(field.parse(v)?),
                        Some(("beta", v)) => beta = Some(field.parse(v)?),
                        _ => return Err(err(no, "malformed factor line")),
                    }
                }
                let (Some(alpha), Some(beta)) = (alpha, beta) else {
                    return Err(err(no, "factor without label"));
                };
                factors.push(OneFactor {
                    label: Label::new(alpha, beta),
                    edges: Vec::new(),
                });
            } else {
                let vs = line
                    .split_whitespace()
                    .map(|s| point(s, no))
                    .collect::<Result<Vec<_>, _>>()?;
                let [a, b, c] = vs[..] else {
                    return Err(err(no, "edge needs three points"));
                };
                if a == b || b == c || a == c {
                    return Err(err(no, "edge with repeated point"));
                }
                let current = factors.last_mut().ok_or_else(|| err(no, "edge before first factor"))?;
                current.edges.push(Edge::new([a, b, c]));
            }
        }
        for f in &mut factors {
            f.edges.sort_unstable();
        }
        let mut by_edges: HashMap<&[Edge], u32> = HashMap::new();
        for (i, f) in factors.iter().enumerate() {
            by_edges.insert(&f.edges, i as u32);
        }
        let line = ProjectiveLine::new(&field);
        let mut label_index = vec![u32::MAX; (q * q) as usize];
        for alpha in field.elements().skip(1) {
            for beta in field.elements() {
                let label = Label::new(alpha, beta);
                let built = factor_from_permutation(label, &line.permutation(&line.make_m_label(label)?));
                if let Some(&i) = by_edges.get(built.edges.as_slice()) {
                    label_index[(alpha.index() * q + beta.index()) as usize] = i;
                }
            }
        }
        Ok(Factorisation {
            field,
            factors,
            label_index,
        })
    }
}

/// Outcome of [`Factorisation::verify_partition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PartitionReport {
    pub total_edges: u64,
    pub expected_edges: u64,
    pub duplicates: u64,
    pub missing: u64,
}

impl PartitionReport {
    pub fn is_partition(&self) -> bool {
        self.duplicates == 0 && self.missing == 0
    }
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `F_{-alpha, alpha+beta}`, the other label of the same factor.
pub fn partner_label(field: &GaloisField, label: Label) -> Label {
    Label::new(field.neg(label.alpha), field.add(label.alpha, label.beta))
}

/// Is `(alpha, beta)` one of the two labels of `F_{1,0}`?
pub fn is_base_label(field: &GaloisField, label: Label) -> bool {
    let minus_one = field.neg(FieldElement::ONE);
    (label.alpha == FieldElement::ONE && label.beta.is_zero())
        || (label.alpha == minus_one && label.beta == FieldElement::ONE)
}
