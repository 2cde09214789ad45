//! Arithmetic in GF(p^l) over a polynomial basis.
//!
//! Elements are packed as integers: the coefficient vector `(c_0, .., c_{l-1})`
//! of `c_0 + c_1 x + .. + c_{l-1} x^{l-1}` is stored as `sum c_i p^i`. That
//! packed value doubles as the element's enumeration rank, so ordering
//! elements by [`FieldElement::index`] is the same as comparing coefficient
//! vectors from the highest degree down.
//!
//! Fields up to 2^16 elements multiply through log/antilog tables, larger
//! ones fall back to schoolbook multiplication with reduction.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field order a [`GaloisField`] will accept.
pub const MAX_ORDER: u32 = 1 << 20;
const TABLE_LIMIT: u32 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("field order {p}^{degree} exceeds 2^20")]
    TooLarge { p: u32, degree: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("quadratic has all coefficients zero")]
    AllZeroCoefficients,
    #[error("cannot parse field element from {0:?}")]
    Parse(String),
}

/// An element of a [`GaloisField`], stored by its packed coefficient vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Serialisable description of a field: characteristic, degree and modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub l: u32,
    /// Coefficients of the monic modulus, lowest degree first.
    pub modulus: Vec<u32>,
}

#[derive(Clone, Debug)]
struct LogTables {
    /// `exp[i] = g^i` for `i < 2(q-1)`, doubled so sums of logs need no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// The finite field GF(p^l) with a fixed modulus.
///
/// Immutable after construction and `Sync`, so a single instance can be
/// shared by every worker of a sweep.
#[derive(Clone, Debug)]
pub struct GaloisField {
    p: u32,
    degree: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Option<LogTables>,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^l` with `p` prime, if possible.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut l = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        l += 1;
    }
    (rest == 1).then_some((p, l))
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over GF(p), lowest degree first, no trailing zeros.
mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem_monic(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        while r.len() > dm {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            for (i, &c) in m.iter().enumerate() {
                let t = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
            trim(&mut r);
        }
        r
    }

    /// Monic polynomial of degree `d` whose lower coefficients are the base-p
    /// digits of `code`.
    pub fn monic_from_code(mut code: u32, d: u32, p: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(d as usize + 1);
        for _ in 0..d {
            out.push(code % p);
            code /= p;
        }
        out.push(1);
        out
    }

    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let d = (f.len() - 1) as u32;
        for k in 1..=d / 2 {
            let count = p.pow(k);
            for code in 0..count {
                let g = monic_from_code(code, k, p);
                if rem_monic(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

impl GaloisField {
    /// Builds GF(p^l) with the smallest monic irreducible modulus of degree `l`,
    /// where polynomials are ranked by their packed lower coefficients.
    pub fn new(p: u32, degree: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if degree == 0 {
            return Err(FieldError::DegreeZero);
        }
        let q = (p as u64)
            .checked_pow(degree)
            .filter(|&q| q <= MAX_ORDER as u64)
            .ok_or(FieldError::TooLarge { p, degree })? as u32;
        let modulus = (0..q)
            .map(|code| poly::monic_from_code(code, degree, p))
            .find(|f| poly::is_irreducible(f, p))
            .expect("an irreducible polynomial of every degree exists");
        let mut field = GaloisField {
            p,
            degree,
            q,
            modulus,
            tables: None,
        };
        if q <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    /// Splits `q` into `p^l` and builds the field.
    pub fn with_order(q: u32) -> Result<Self, FieldError> {
        let (p, l) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, l)
    }

    fn build_tables(&self) -> LogTables {
        let n = self.q - 1;
        let factors = prime_factors(n);
        let generator = (1..self.q)
            .map(FieldElement)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| self.pow_schoolbook(g, (n / r) as u64) != FieldElement::ONE)
            })
            .expect("the multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(2 * n as usize);
        let mut log = vec![0u32; self.q as usize];
        let mut x = FieldElement::ONE;
        for i in 0..n {
            exp.push(x.0);
            log[x.0 as usize] = i;
            x = self.mul_schoolbook(x, generator);
        }
        for i in 0..n as usize {
            exp.push(exp[i]);
        }
        LogTables { exp, log }
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            l: self.degree,
            modulus: self.modulus.clone(),
        }
    }

    /// The element with packed index `i`.
    ///
    /// Panics if `i` is not below the field order.
    #[inline]
    pub fn element(&self, i: u32) -> FieldElement {
        assert!(i < self.q, "element index {i} out of range for GF({})", self.q);
        FieldElement(i)
    }

    /// The image of the integer `k` in the prime subfield.
    pub fn constant(&self, k: i64) -> FieldElement {
        FieldElement(k.rem_euclid(self.p as i64) as u32)
    }

    /// All elements in enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(FieldElement)
    }

    pub fn in_prime_subfield(&self, x: FieldElement) -> bool {
        x.0 < self.p
    }

    pub fn coefficients(&self, x: FieldElement) -> Vec<u32> {
        let mut v = x.0;
        (0..self.degree)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() > self.degree as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::Parse(format!("{coeffs:?}")));
        }
        let mut v = 0u32;
        for &c in coeffs.iter().rev() {
            v = v * self.p + c;
        }
        Ok(FieldElement(v))
    }

    /// Canonical text form: coefficients lowest degree first, comma separated.
    pub fn format(&self, x: FieldElement) -> String {
        self.coefficients(x)
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses the canonical text form. A lone `-k` is read as the negation of
    /// the prime-subfield constant `k`.
    pub fn parse(&self, s: &str) -> Result<FieldElement, FieldError> {
        let s = s.trim();
        let err = || FieldError::Parse(s.to_string());
        if let Some(rest) = s.strip_prefix('-') {
            let k: u32 = rest.parse().map_err(|_| err())?;
            if k >= self.p {
                return Err(err());
            }
            return Ok(self.neg(FieldElement(k)));
        }
        let coeffs = s
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| err())?;
        self.from_coefficients(&coeffs).map_err(|_| err())
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if self.degree == 1 {
            return FieldElement((a.0 + b.0) % self.p);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0, 1);
        while x > 0 || y > 0 {
            out += ((x % self.p + y % self.p) % self.p) * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 {
            return a;
        }
        if self.degree == 1 {
            return FieldElement((self.p - a.0) % self.p);
        }
        let (mut x, mut out, mut place) = (a.0, 0, 1);
        while x > 0 {
            out += ((self.p - x % self.p) % self.p) * place;
            place *= self.p;
            x /= self.p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.tables {
            Some(t) => {
                if a.0 == 0 || b.0 == 0 {
                    FieldElement(0)
                } else {
                    FieldElement(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
                }
            }
            None => self.mul_schoolbook(a, b),
        }
    }

    fn mul_schoolbook(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(self.mul_binary(a.0, b.0));
        }
        let x = self.coefficients(a);
        let y = self.coefficients(b);
        let p = self.p as u64;
        let mut prod = vec![0u32; 2 * self.degree as usize - 1];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + xi as u64 * yj as u64) % p) as u32;
            }
        }
        let r = poly::rem_monic(&prod, &self.modulus, self.p);
        self.from_coefficients(&r).expect("reduced product has degree < l")
    }

    /// Carry-less product reduced by the modulus; characteristic 2 only.
    fn mul_binary(&self, a: u32, b: u32) -> u32 {
        let mut prod: u64 = 0;
        let mut b = b as u64;
        let mut shift = 0;
        while b != 0 {
            if b & 1 == 1 {
                prod ^= (a as u64) << shift;
            }
            b >>= 1;
            shift += 1;
        }
        let d = self.degree;
        let m: u64 = self
            .modulus
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &c)| acc | ((c as u64) << i));
        for k in (d..2 * d).rev() {
            if prod >> k & 1 == 1 {
                prod ^= m << (k - d);
            }
        }
        prod as u32
    }

    fn pow_schoolbook(&self, a: FieldElement, mut n: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul_schoolbook(acc, base);
            }
            base = self.mul_schoolbook(base, base);
            n >>= 1;
        }
        acc
    }

    /// `a^n` by square-and-multiply; `0^0 = 1`.
    pub fn pow(&self, a: FieldElement, mut n: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.tables {
            Some(t) => {
                let n = self.q - 1;
                FieldElement(t.exp[((n - t.log[a.0 as usize]) % n) as usize])
            }
            None => self.pow(a, self.q as u64 - 2),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// The Frobenius map `x -> x^p`.
    #[inline]
    pub fn frobenius(&self, x: FieldElement) -> FieldElement {
        if self.degree == 1 {
            return x;
        }
        self.pow(x, self.p as u64)
    }

    /// Absolute trace `x + x^p + .. + x^(p^(l-1))`, returned as its value in GF(p).
    pub fn trace(&self, x: FieldElement) -> u32 {
        let mut term = x;
        let mut acc = x;
        for _ in 1..self.degree {
            term = self.frobenius(term);
            acc = self.add(acc, term);
        }
        debug_assert!(acc.0 < self.p, "trace left the prime subfield");
        acc.0
    }

    /// Euler's criterion. Every element is a square in characteristic 2.
    pub fn is_square(&self, x: FieldElement) -> bool {
        if self.p == 2 || x.is_zero() {
            return true;
        }
        self.pow(x, (self.q as u64 - 1) / 2) == FieldElement::ONE
    }

    /// A square root of `x`, choosing the root with the smaller index.
    pub fn sqrt(&self, x: FieldElement) -> Option<FieldElement> {
        if x.is_zero() {
            return Some(x);
        }
        if self.p == 2 {
            return Some(self.pow(x, self.q as u64 / 2));
        }
        if !self.is_square(x) {
            return None;
        }
        let y = self.tonelli_shanks(x);
        Some(y.min(self.neg(y)))
    }

    fn tonelli_shanks(&self, n: FieldElement) -> FieldElement {
        let mut s = 0;
        let mut t = self.q as u64 - 1;
        while t.is_multiple_of(2) {
            t /= 2;
            s += 1;
        }
        let z = self
            .elements()
            .skip(2)
            .find(|&z| !self.is_square(z))
            .expect("odd-order fields have non-squares");
        let mut m = s;
        let mut c = self.pow(z, t);
        let mut r = self.pow(n, t.div_ceil(2));
        let mut u = self.pow(n, t);
        while u != FieldElement::ONE {
            let mut i = 0;
            let mut probe = u;
            while probe != FieldElement::ONE {
                probe = self.mul(probe, probe);
                i += 1;
            }
            let mut b = c;
            for _ in 0..m - i - 1 {
                b = self.mul(b, b);
            }
            m = i;
            c = self.mul(b, b);
            r = self.mul(r, b);
            u = self.mul(u, c);
        }
        r
    }

    /// Distinct roots of `a x^2 + b x + c` in ascending index order.
    ///
    /// `a = 0` is solved as a linear equation (no roots when `b = 0` too).
    /// In characteristic 2 with `b != 0` the equation is reduced to
    /// `t^2 + t = ac/b^2`, which is solvable exactly when that constant has
    /// trace zero.
    pub fn solve_quadratic(
        &self,
        a: FieldElement,
        b: FieldElement,
        c: FieldElement,
    ) -> Result<Vec<FieldElement>, FieldError> {
        if a.is_zero() && b.is_zero() && c.is_zero() {
            return Err(FieldError::AllZeroCoefficients);
        }
        if a.is_zero() {
            if b.is_zero() {
                return Ok(Vec::new());
            }
            return Ok(vec![self.div(self.neg(c), b)?]);
        }
        let mut roots = if self.p == 2 {
            if b.is_zero() {
                vec![self.sqrt(self.div(c, a)?).expect("squares are total in char 2")]
            } else {
                let scale = self.div(b, a)?;
                let k = self.div(self.mul(a, c), self.mul(b, b))?;
                if self.trace(k) != 0 {
                    Vec::new()
                } else {
                    let t = self.solve_artin_schreier(k);
                    vec![self.mul(scale, t), self.mul(scale, self.add(t, FieldElement::ONE))]
                }
            }
        } else {
            let four_ac = self.mul(self.constant(4), self.mul(a, c));
            let disc = self.sub(self.mul(b, b), four_ac);
            match self.sqrt(disc) {
                None => Vec::new(),
                Some(r) => {
                    let two_a = self.mul(self.constant(2), a);
                    let nb = self.neg(b);
                    vec![self.div(self.add(nb, r), two_a)?, self.div(self.sub(nb, r), two_a)?]
                }
            }
        };
        roots.sort_unstable();
        roots.dedup();
        Ok(roots)
    }

    /// One solution of `t^2 + t = k` in characteristic 2, assuming `Tr(k) = 0`.
    ///
    /// `t -> t^2 + t` is GF(2)-linear, and in the packed encoding an element
    /// is its own bit vector, so this is Gaussian elimination over GF(2).
    fn solve_artin_schreier(&self, k: FieldElement) -> FieldElement {
        let l = self.degree as usize;
        // rows[i]: bit j is row i of the image of basis vector x^j; bit l is the rhs.
        let images: Vec<u32> = (0..l)
            .map(|j| {
                let e = FieldElement(1 << j);
                self.add(self.mul(e, e), e).0
            })
            .collect();
        let mut rows: Vec<u32> = (0..l)
            .map(|i| {
                let mut row = 0u32;
                for (j, img) in images.iter().enumerate() {
                    row |= (img >> i & 1) << j;
                }
                row | (k.0 >> i & 1) << l
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..l {
            let Some(found) = (r..l).find(|&i| rows[i] >> col & 1 == 1) else {
                continue;
            };
            rows.swap(r, found);
            for i in 0..l {
                if i != r && rows[i] >> col & 1 == 1 {
                    rows[i] ^= rows[r];
                }
            }
            pivots.push(col);
            r += 1;
        }
        let mut t = 0u32;
        for (row, &col) in rows.iter().zip(&pivots) {
            t |= (row >> l & 1) << col;
        }
        FieldElement(t)
    }
}

impl fmt::Display for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.degree)
    }
}
