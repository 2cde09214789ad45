//! The projective line PG(1,q) and the action of PGL(2,q) on it by
//! fractional linear transformations.

use std::fmt;

use thiserror::Error;

use crate::field::{FieldElement, FieldError, GaloisField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjError {
    #[error("matrix is singular")]
    Singular,
    #[error("alpha must be nonzero")]
    AlphaZero,
    #[error("cannot parse projective point from {0:?}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A point of PG(1,q): a field element or the point at infinity.
///
/// Points carry a dense index in `0..=q`: finite points use their field
/// element index and infinity is `q`. The derived ordering agrees with it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProjPoint {
    Finite(FieldElement),
    Infinity,
}

impl ProjPoint {
    #[inline]
    pub fn index(self, q: u32) -> u32 {
        match self {
            ProjPoint::Finite(x) => x.index(),
            ProjPoint::Infinity => q,
        }
    }

    #[inline]
    pub fn from_index(field: &GaloisField, i: u32) -> ProjPoint {
        if i == field.order() {
            ProjPoint::Infinity
        } else {
            ProjPoint::Finite(field.element(i))
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }
}

/// A projective 2x2 matrix `[[a, b], [c, d]]` acting as `x -> (ax+b)/(cx+d)`.
///
/// Always held in canonical form: the first nonzero entry in the order
/// `a, b, c, d` is one. Two maps are equal iff their canonical forms are.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MobiusMap {
    entries: [FieldElement; 4],
}

impl MobiusMap {
    pub fn entries(&self) -> [FieldElement; 4] {
        self.entries
    }
}

/// Label `(alpha, beta)` of the conjugate `m_{alpha,beta}`, with alpha nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub alpha: FieldElement,
    pub beta: FieldElement,
}

impl Label {
    pub fn new(alpha: FieldElement, beta: FieldElement) -> Self {
        Label { alpha, beta }
    }
}

/// PGL(2,q) operations over a borrowed field.
#[derive(Clone, Copy)]
pub struct ProjectiveLine<'a> {
    field: &'a GaloisField,
}

impl<'a> ProjectiveLine<'a> {
    pub fn new(field: &'a GaloisField) -> Self {
        ProjectiveLine { field }
    }

    pub fn field(&self) -> &'a GaloisField {
        self.field
    }

    /// Number of points, `q + 1`.
    pub fn size(&self) -> u32 {
        self.field.order() + 1
    }

    pub fn points(&self) -> impl Iterator<Item = ProjPoint> + 'a {
        let field = self.field;
        (0..=field.order()).map(move |i| ProjPoint::from_index(field, i))
    }

    pub fn matrix(
        &self,
        a: FieldElement,
        b: FieldElement,
        c: FieldElement,
        d: FieldElement,
    ) -> Result<MobiusMap, ProjError> {
        let f = self.field;
        if f.sub(f.mul(a, d), f.mul(b, c)).is_zero() {
            return Err(ProjError::Singular);
        }
        Ok(self.canonical([a, b, c, d]))
    }

    fn canonical(&self, e: [FieldElement; 4]) -> MobiusMap {
        let f = self.field;
        let lead = *e.iter().find(|x| !x.is_zero()).expect("nonzero matrix");
        if lead == FieldElement::ONE {
            return MobiusMap { entries: e };
        }
        let s = f.inv(lead).expect("lead is nonzero");
        MobiusMap {
            entries: e.map(|x| f.mul(x, s)),
        }
    }

    pub fn determinant(&self, m: &MobiusMap) -> FieldElement {
        let [a, b, c, d] = m.entries;
        let f = self.field;
        f.sub(f.mul(a, d), f.mul(b, c))
    }

    pub fn identity(&self) -> MobiusMap {
        MobiusMap {
            entries: [
                FieldElement::ONE,
                FieldElement::ZERO,
                FieldElement::ZERO,
                FieldElement::ONE,
            ],
        }
    }

    /// Evaluates the map with the usual conventions at infinity: `a/c` when
    /// `c != 0`, otherwise infinity; and `w/0 = infinity` for `w != 0`.
    pub fn apply(&self, m: &MobiusMap, x: ProjPoint) -> ProjPoint {
        let f = self.field;
        let [a, b, c, d] = m.entries;
        match x {
            ProjPoint::Infinity => {
                if c.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(f.div(a, c).expect("c is nonzero"))
                }
            }
            ProjPoint::Finite(x) => {
                let den = f.add(f.mul(c, x), d);
                if den.is_zero() {
                    ProjPoint::Infinity
                } else {
                    let num = f.add(f.mul(a, x), b);
                    ProjPoint::Finite(f.div(num, den).expect("den is nonzero"))
                }
            }
        }
    }

    /// `compose(m1, m2)` applies `m2` first.
    pub fn compose(&self, m1: &MobiusMap, m2: &MobiusMap) -> MobiusMap {
        let f = self.field;
        let [a, b, c, d] = m1.entries;
        let [e, g, h, k] = m2.entries;
        let dot = |x, y, z, w| f.add(f.mul(x, y), f.mul(z, w));
        self.canonical([dot(a, e, b, h), dot(a, g, b, k), dot(c, e, d, h), dot(c, g, d, k)])
    }

    pub fn inverse(&self, m: &MobiusMap) -> MobiusMap {
        let f = self.field;
        let [a, b, c, d] = m.entries;
        self.canonical([d, f.neg(b), f.neg(c), a])
    }

    pub fn power(&self, m: &MobiusMap, n: u32) -> MobiusMap {
        (0..n).fold(self.identity(), |acc, _| self.compose(m, &acc))
    }

    /// Images of every point, indexed by point index.
    pub fn permutation(&self, m: &MobiusMap) -> Vec<u32> {
        let q = self.field.order();
        self.points().map(|x| self.apply(m, x).index(q)).collect()
    }

    /// `f(x) = 1/(1-x)`, i.e. the matrix `[[0, 1], [-1, 1]]`.
    pub fn make_f(&self) -> MobiusMap {
        let f = self.field;
        self.canonical([
            FieldElement::ZERO,
            FieldElement::ONE,
            f.neg(FieldElement::ONE),
            FieldElement::ONE,
        ])
    }

    /// The affine map `x -> alpha x + beta`.
    pub fn make_g(&self, alpha: FieldElement, beta: FieldElement) -> Result<MobiusMap, ProjError> {
        if alpha.is_zero() {
            return Err(ProjError::AlphaZero);
        }
        Ok(self.canonical([alpha, beta, FieldElement::ZERO, FieldElement::ONE]))
    }

    /// `m_{alpha,beta}` from its closed form
    /// `[[-beta, alpha^2 + alpha beta + beta^2], [-1, alpha + beta]]`.
    pub fn make_m(&self, alpha: FieldElement, beta: FieldElement) -> Result<MobiusMap, ProjError> {
        if alpha.is_zero() {
            return Err(ProjError::AlphaZero);
        }
        let f = self.field;
        let top = f.add(f.add(f.mul(alpha, alpha), f.mul(alpha, beta)), f.mul(beta, beta));
        let m = self.canonical([f.neg(beta), top, f.neg(FieldElement::ONE), f.add(alpha, beta)]);
        debug_assert_eq!(Ok(m), self.make_m_by_conjugation(alpha, beta));
        Ok(m)
    }

    /// `m_{alpha,beta}` as `g_{alpha,beta} . f . g_{alpha,beta}^{-1}`.
    pub fn make_m_by_conjugation(&self, alpha: FieldElement, beta: FieldElement) -> Result<MobiusMap, ProjError> {
        let g = self.make_g(alpha, beta)?;
        Ok(self.compose(&self.compose(&g, &self.make_f()), &self.inverse(&g)))
    }

    pub fn make_m_label(&self, label: Label) -> Result<MobiusMap, ProjError> {
        self.make_m(label.alpha, label.beta)
    }

    /// For a pair of labels, the label `(alpha0, beta0)` and conjugator `g` with
    /// `g m1 g^-1 = f` and `g m2 g^-1 = m_{alpha0,beta0}`.
    pub fn conjugate_pair_to_standard(&self, first: Label, second: Label) -> Result<(Label, MobiusMap), ProjError> {
        if first.alpha.is_zero() || second.alpha.is_zero() {
            return Err(ProjError::AlphaZero);
        }
        let f = self.field;
        let inv1 = f.inv(first.alpha)?;
        let alpha0 = f.mul(inv1, second.alpha);
        let beta0 = f.mul(inv1, f.sub(second.beta, first.beta));
        let g = self.make_g(inv1, f.neg(f.mul(inv1, first.beta)))?;
        Ok((Label::new(alpha0, beta0), g))
    }

    /// Text form of a point: `inf` or the element's coefficient list.
    pub fn format_point(&self, x: ProjPoint) -> String {
        match x {
            ProjPoint::Infinity => "inf".to_string(),
            ProjPoint::Finite(e) => self.field.format(e),
        }
    }

    pub fn parse_point(&self, s: &str) -> Result<ProjPoint, ProjError> {
        if s.trim() == "inf" {
            return Ok(ProjPoint::Infinity);
        }
        Ok(ProjPoint::Finite(self.field.parse(s)?))
    }

    /// Text form of a map: its four canonical entries separated by spaces.
    pub fn format_map(&self, m: &MobiusMap) -> String {
        m.entries
            .iter()
            .map(|&e| self.field.format(e))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha.index(), self.beta.index())
    }
}
