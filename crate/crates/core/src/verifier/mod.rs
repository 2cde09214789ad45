//! Property checks over a whole factorisation, the closed-form predictions
//! they are compared against, and the suite driver.

mod checks;
mod scans;
mod suite;

pub use checks::{check_c1f, check_hb1f, check_u1f, HbOptions, PairMode, TripleMode, UniformReports};
pub use scans::{
    minus_one_overlap, overlap_discriminant_check, overlap_distribution, trace_condition_scan, DiscriminantCandidate,
    DiscriminantReport, MinusOneOverlap, TraceScan,
};
pub use suite::{render_text, run_suite, Expectation, QReport, SuiteConfig, SuiteReport, SuiteSummary};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::factorisation::{check_residue, FactorError, Factorisation};
use crate::field::{is_prime, prime_power};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("q = {0} is not congruent to 2 mod 3")]
    BadResidue(u32),
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u32),
    #[error("{what} = {value} is outside {range}")]
    OutOfRange {
        what: &'static str,
        value: u32,
        range: &'static str,
    },
    #[error("extension degree {0} is even")]
    EvenDegree(u32),
    #[error("expected GF(5^l) with l odd and l > 1, got GF({0})")]
    WrongField(u32),
    #[error("alpha lies in the prime subfield")]
    AlphaInSubfield,
    #[error("invalid suite config: {0}")]
    Config(String),
    #[error("checkpoint line {line}: {message}")]
    Checkpoint { line: usize, message: String },
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<crate::field::FieldError> for VerifyError {
    fn from(e: crate::field::FieldError) -> Self {
        VerifyError::Factor(e.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    C1f,
    U1f,
    Uc1f,
    Hb1f,
}

impl std::fmt::Display for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Property::C1f => "c1f",
            Property::U1f => "u1f",
            Property::Uc1f => "uc1f",
            Property::Hb1f => "hb1f",
        })
    }
}

/// Computed truth value of a property. Serialises as `true`, `false` or
/// `"indeterminate"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Fails,
    Indeterminate,
}

impl Outcome {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Outcome::Holds
        } else {
            Outcome::Fails
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Outcome::Holds => Some(true),
            Outcome::Fails => Some(false),
            Outcome::Indeterminate => None,
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Holds => "true",
            Outcome::Fails => "false",
            Outcome::Indeterminate => "indeterminate",
        })
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.as_bool() {
            Some(b) => s.serialize_bool(b),
            None => s.serialize_str("indeterminate"),
        }
    }
}

/// A factor named by index and canonical label (field element indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FactorRef {
    pub index: usize,
    pub alpha: u32,
    pub beta: u32,
}

impl FactorRef {
    pub fn of(fam: &Factorisation, index: usize) -> Self {
        let l = fam.factor(index).label();
        FactorRef {
            index,
            alpha: l.alpha.index(),
            beta: l.beta.index(),
        }
    }
}

pub(crate) fn refs(fam: &Factorisation, indices: &[usize]) -> Vec<FactorRef> {
    indices.iter().map(|&i| FactorRef::of(fam, i)).collect()
}

/// Every label of every listed factor lies in the prime subfield.
pub(crate) fn labels_in_prime_subfield(fam: &Factorisation, indices: &[usize]) -> bool {
    let f = fam.field();
    indices.iter().all(|&i| {
        fam.labels_of(i)
            .iter()
            .any(|l| f.in_prime_subfield(l.alpha) && f.in_prime_subfield(l.beta))
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Disconnected {
        factors: Vec<FactorRef>,
        components: Vec<Vec<u32>>,
        prime_subfield_labels: bool,
    },
    Overlap {
        factors: Vec<FactorRef>,
        overlap: usize,
        repeated_pairs: Vec<(u32, u32)>,
    },
    NonIsomorphic {
        reference: Vec<FactorRef>,
        factors: Vec<FactorRef>,
    },
    NoHamiltonCycle {
        factors: Vec<FactorRef>,
        disconnected: bool,
    },
    Timeout {
        factors: Vec<FactorRef>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    /// Pairs or triples examined.
    pub tasks: u64,
    #[serde(skip_serializing_if = "is_zero")]
    pub timeouts: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

fn is_zero(x: &u64) -> bool {
    *x == 0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub name: Property,
    pub mode: String,
    pub computed: Outcome,
    pub predicted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub stats: Stats,
}

impl PropertyReport {
    pub fn is_discrepancy(&self) -> bool {
        self.computed.as_bool().is_some_and(|c| c != self.predicted)
    }

    pub fn is_indeterminate(&self) -> bool {
        self.computed == Outcome::Indeterminate
    }
}

fn validate(q: u32) -> Result<(), VerifyError> {
    prime_power(q).ok_or(VerifyError::NotPrimePower(q))?;
    check_residue(q).map_err(|_| VerifyError::BadResidue(q))
}

/// Connected iff `q` is 2, 5 or 11, or `2^p` for an odd prime `p`.
pub fn predict_c1f(q: u32) -> Result<bool, VerifyError> {
    validate(q)?;
    Ok(match prime_power(q) {
        _ if matches!(q, 2 | 5 | 11) => true,
        Some((2, l)) => l > 2 && is_prime(l),
        _ => false,
    })
}

/// Uniform iff `q` is 2, 5 or 8; these are also uniform-connected.
pub fn predict_u1f(q: u32) -> Result<bool, VerifyError> {
    validate(q)?;
    Ok(matches!(q, 2 | 5 | 8))
}

/// Hamilton-Berge prediction, taken to coincide with the connected case.
pub fn predict_hb1f(q: u32) -> Result<bool, VerifyError> {
    predict_c1f(q)
}

pub fn predict(property: Property, q: u32) -> Result<bool, VerifyError> {
    match property {
        Property::C1f => predict_c1f(q),
        Property::U1f | Property::Uc1f => predict_u1f(q),
        Property::Hb1f => predict_hb1f(q),
    }
}

/// Process exit code for a set of reports: 1 on any discrepancy, else 2 on
/// any indeterminate result, else 0.
pub fn exit_code<'a>(reports: impl IntoIterator<Item = &'a PropertyReport>) -> i32 {
    let mut code = 0;
    for r in reports {
        if r.is_discrepancy() {
            return 1;
        }
        if r.is_indeterminate() {
            code = 2;
        }
    }
    code
}
