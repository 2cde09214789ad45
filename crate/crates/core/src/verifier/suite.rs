use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{check_c1f, check_hb1f, check_u1f, HbOptions, PairMode, TripleMode};
use super::scans::{
    minus_one_overlap, overlap_discriminant_check, overlap_distribution, trace_condition_scan, MinusOneOverlap,
    TraceScan,
};
use super::{Property, PropertyReport, VerifyError};
use crate::factorisation::{Factorisation, PartitionReport};
use crate::field::FieldSpec;
use crate::group::{classify_all, early_exit_sound, ClosurePolicy};
use crate::hypergraph::{factors_connected, SearchBudget};
use crate::projective::ProjectiveLine;

/// Suite configuration, read from TOML. Every key is optional; an empty
/// document runs nothing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub q: Vec<u32>,
    pub seed: u64,
    /// Time limit per Hamilton cycle search.
    pub budget_ms: u64,
    /// Largest q also given a full pairwise connectivity sweep.
    pub c1f_full_max: u32,
    /// Largest q given a full triple sweep; above it triples contain `F_{1,0}`.
    pub hb1f_full_max: u32,
    /// q values whose triple sweep is skipped.
    pub hb1f_skip: Vec<u32>,
    /// q values whose triple sweep is a seeded sample of `hb1f_samples`.
    pub hb1f_sampled: Vec<u32>,
    pub hb1f_samples: usize,
    /// Largest q for which connectivity is cross-checked against
    /// transitivity of the generated group.
    pub transitivity_max: u32,
    /// Odd degrees l for the GF(2^l) trace scans.
    pub trace_ell: Vec<u32>,
    /// Include wall-clock timings; off by default.
    pub timings: bool,
    /// Overrides of the predicted values.
    pub expect: Vec<Expectation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub q: u32,
    pub property: Property,
    pub value: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            q: Vec::new(),
            seed: 1,
            budget_ms: 10_000,
            c1f_full_max: 17,
            hb1f_full_max: 11,
            hb1f_skip: Vec::new(),
            hb1f_sampled: Vec::new(),
            hb1f_samples: 10_000,
            transitivity_max: 17,
            trace_ell: Vec::new(),
            timings: false,
            expect: Vec::new(),
        }
    }
}

impl SuiteConfig {
    /// Every q = 2 mod 3 prime power up to 125, with the q = 32 triple sweep
    /// left to the slow profile.
    pub fn default_suite() -> Self {
        SuiteConfig {
            q: vec![2, 5, 8, 11, 17, 23, 29, 32, 41, 47, 53, 59, 125],
            hb1f_skip: vec![32],
            trace_ell: vec![3, 5, 7, 9, 11, 13],
            ..Default::default()
        }
    }

    /// The default suite plus the q = 32 triple sweep and a sampled q = 128 run.
    pub fn slow_suite() -> Self {
        let mut c = Self::default_suite();
        c.q.push(128);
        c.hb1f_skip.clear();
        c.hb1f_sampled = vec![128];
        c
    }

    pub fn from_toml(text: &str) -> Result<Self, VerifyError> {
        toml::from_str(text).map_err(|e| VerifyError::Config(e.to_string()))
    }

    fn triple_mode(&self, q: u32) -> Option<TripleMode> {
        if self.hb1f_skip.contains(&q) {
            None
        } else if self.hb1f_sampled.contains(&q) {
            Some(TripleMode::Sampled {
                n: self.hb1f_samples,
                seed: self.seed,
            })
        } else if q <= self.hb1f_full_max {
            Some(TripleMode::Full)
        } else {
            Some(TripleMode::Reduced)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Histograms {
    pub overlap: BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subgroup_classes: Option<BTreeMap<String, usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QScans {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minus_one_overlap: Option<MinusOneOverlap>,
    /// Connectivity of `F_{1,0} u F` agrees with transitivity of `<f, m_F>`
    /// for every `F`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transitivity_matches_connectivity: Option<bool>,
    /// Over GF(5^l): alphas outside GF(5) checked, and how many had an
    /// overlap-4 partner with a square discriminant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant: Option<DiscriminantSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminantSummary {
    pub alphas: usize,
    pub confirmed: usize,
    pub identity_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QReport {
    pub q: u32,
    pub field: FieldSpec,
    pub factors: usize,
    pub partition: PartitionReport,
    pub properties: Vec<PropertyReport>,
    pub histograms: Histograms,
    pub scans: QScans,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteSummary {
    /// `q/property` entries whose computed value differs from the prediction.
    pub discrepancies: Vec<String>,
    pub indeterminate: Vec<String>,
    /// Other failed internal consistency checks.
    pub inconsistencies: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub reports: Vec<QReport>,
    pub scans: GlobalScans,
    pub summary: SuiteSummary,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GlobalScans {
    pub trace: Vec<TraceScan>,
}

impl SuiteReport {
    pub fn exit_code(&self) -> i32 {
        if !self.summary.discrepancies.is_empty() || !self.summary.inconsistencies.is_empty() {
            1
        } else if !self.summary.indeterminate.is_empty() {
            2
        } else {
            0
        }
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyReport> {
        self.reports.iter().flat_map(|r| &r.properties)
    }
}

fn run_q(q: u32, config: &SuiteConfig) -> Result<QReport, VerifyError> {
    let fam = Factorisation::with_order(q)?;
    let timings = config.timings;
    let mut properties = vec![check_c1f(&fam, PairMode::Reduced, timings)?];
    if q <= config.c1f_full_max {
        properties.push(check_c1f(&fam, PairMode::Full, timings)?);
    }
    let uniform = check_u1f(&fam, timings)?;
    properties.push(uniform.u1f);
    properties.push(uniform.uc1f);
    if let Some(mode) = config.triple_mode(q) {
        let opts = HbOptions {
            mode,
            budget: SearchBudget {
                time_limit: Some(Duration::from_millis(config.budget_ms)),
            },
            checkpoint: None,
            timings,
        };
        properties.push(check_hb1f(&fam, &opts)?);
    }
    for p in &mut properties {
        if let Some(e) = config.expect.iter().find(|e| e.q == q && e.property == p.name) {
            p.predicted = e.value;
        }
    }

    let field = fam.field();
    let line = ProjectiveLine::new(field);
    let subgroup_classes = early_exit_sound(q).then(|| {
        let mut hist = BTreeMap::new();
        for c in classify_all(&fam, ClosurePolicy::EarlyExit) {
            *hist.entry(c.class.to_string()).or_insert(0) += 1;
        }
        hist
    });
    let transitivity_matches_connectivity = (q <= config.transitivity_max).then(|| {
        (1..fam.len()).into_par_iter().all(|j| {
            let gens = [
                line.make_f(),
                line.make_m_label(fam.factor(j).label()).expect("alpha is nonzero"),
            ];
            crate::group::is_transitive(&line, &gens)
                == factors_connected(&[fam.factor(0), fam.factor(j)], fam.vertex_count())
        })
    });
    let discriminant = if field.characteristic() == 5 && field.degree() % 2 == 1 && field.degree() > 1 {
        let reports: Vec<_> = field
            .elements()
            .filter(|&a| !field.in_prime_subfield(a))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|a| overlap_discriminant_check(&fam, a))
            .collect::<Result<_, _>>()?;
        Some(DiscriminantSummary {
            alphas: reports.len(),
            confirmed: reports.iter().filter(|r| r.confirmed).count(),
            identity_holds: reports.iter().all(|r| r.identity_holds),
        })
    } else {
        None
    };

    Ok(QReport {
        q,
        field: field.spec(),
        factors: fam.len(),
        partition: fam.verify_partition(),
        properties,
        histograms: Histograms {
            overlap: overlap_distribution(&fam),
            subgroup_classes,
        },
        scans: QScans {
            minus_one_overlap: minus_one_overlap(&fam),
            transitivity_matches_connectivity,
            discriminant,
        },
    })
}

/// Runs every configured check, in the configured order of q.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport, VerifyError> {
    let reports = config
        .q
        .iter()
        .map(|&q| run_q(q, config))
        .collect::<Result<Vec<_>, _>>()?;
    let trace = config
        .trace_ell
        .iter()
        .map(|&l| trace_condition_scan(l))
        .collect::<Result<Vec<_>, _>>()?;

    let mut summary = SuiteSummary::default();
    for r in &reports {
        for p in &r.properties {
            let tag = format!("q={}/{}/{}", r.q, p.name, p.mode);
            if p.is_discrepancy() {
                summary.discrepancies.push(tag);
            } else if p.is_indeterminate() {
                summary.indeterminate.push(tag);
            }
        }
        if !r.partition.is_partition() {
            summary.inconsistencies.push(format!("q={}/partition", r.q));
        }
        if r.scans.transitivity_matches_connectivity == Some(false) {
            summary.inconsistencies.push(format!("q={}/transitivity", r.q));
        }
        if let Some(m) = &r.scans.minus_one_overlap {
            if m.overlap != m.algebraic || m.overlap != m.predicted {
                summary.inconsistencies.push(format!("q={}/minus_one_overlap", r.q));
            }
        }
        if let Some(d) = &r.scans.discriminant {
            if d.confirmed != d.alphas || !d.identity_holds {
                summary.inconsistencies.push(format!("q={}/discriminant", r.q));
            }
        }
        if let Some(h) = &r.histograms.subgroup_classes {
            if h.keys().any(|k| k.starts_with("Other") || k == "C3") {
                summary.inconsistencies.push(format!("q={}/subgroup_classes", r.q));
            }
        }
    }
    for t in &trace {
        if (t.ell > 3) == t.trace_zero_witnesses.is_empty()
            || (t.ell > 3) == t.all_trace1
            || t.poly_root_count as u64 > t.root_bound
        {
            summary.inconsistencies.push(format!("trace/l={}", t.ell));
        }
    }
    Ok(SuiteReport {
        seed: config.seed,
        reports,
        scans: GlobalScans { trace },
        summary,
    })
}

/// Human-readable rendering carrying the same verdicts as the JSON form.
pub fn render_text(report: &SuiteReport) -> String {
    let mut out = String::new();
    for r in &report.reports {
        let modulus: Vec<String> = r.field.modulus.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(
            out,
            "q={} GF({}^{}) modulus={} factors={} edges={}/{} duplicates={} missing={}",
            r.q,
            r.field.p,
            r.field.l,
            modulus.join(","),
            r.factors,
            r.partition.total_edges,
            r.partition.expected_edges,
            r.partition.duplicates,
            r.partition.missing
        );
        for p in &r.properties {
            let flag = if p.is_discrepancy() {
                "DISCREPANCY"
            } else if p.is_indeterminate() {
                "INDETERMINATE"
            } else {
                "ok"
            };
            let _ = writeln!(
                out,
                "  {} [{}] computed={} predicted={} tasks={} {}",
                p.name, p.mode, p.computed, p.predicted, p.stats.tasks, flag
            );
            if let Some(w) = &p.witness {
                let _ = writeln!(out, "    witness {}", serde_json::to_string(w).unwrap_or_default());
            }
        }
        let hist: Vec<String> = r.histograms.overlap.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        let _ = writeln!(out, "  overlaps {}", hist.join(" "));
        if let Some(h) = &r.histograms.subgroup_classes {
            let hist: Vec<String> = h.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            let _ = writeln!(out, "  subgroups {}", hist.join(" "));
        }
        if let Some(m) = &r.scans.minus_one_overlap {
            let _ = writeln!(
                out,
                "  overlap(-1,0)={} algebraic={} five_is_square={}",
                m.overlap, m.algebraic, m.five_is_square
            );
        }
        if let Some(t) = r.scans.transitivity_matches_connectivity {
            let _ = writeln!(out, "  transitivity_matches_connectivity={t}");
        }
        if let Some(d) = &r.scans.discriminant {
            let _ = writeln!(
                out,
                "  discriminant alphas={} confirmed={} identity_holds={}",
                d.alphas, d.confirmed, d.identity_holds
            );
        }
    }
    for t in &report.scans.trace {
        let _ = writeln!(
            out,
            "trace l={} trace_zero_witnesses={} all_trace1={} roots={} bound={} degree={}",
            t.ell,
            t.trace_zero_witnesses.len(),
            t.all_trace1,
            t.poly_root_count,
            t.root_bound,
            t.poly_degree
        );
    }
    let s = &report.summary;
    let _ = writeln!(
        out,
        "summary discrepancies={} indeterminate={} inconsistencies={}",
        s.discrepancies.len(),
        s.indeterminate.len(),
        s.inconsistencies.len()
    );
    for line in s.discrepancies.iter().chain(&s.indeterminate).chain(&s.inconsistencies) {
        let _ = writeln!(out, "  {line}");
    }
    out
}
