use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{labels_in_prime_subfield, predict, refs, Outcome, Property, PropertyReport, Stats, VerifyError, Witness};
use crate::factorisation::Factorisation;
use crate::hypergraph::{
    factors_connected, has_hamilton_berge_cycle, is_isomorphic, pair_overlap, union, BergeOutcome, SearchBudget,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairMode {
    /// Pairs `(F_{1,0}, F)` only.
    Reduced,
    /// Every unordered pair.
    Full,
}

impl PairMode {
    fn name(self) -> &'static str {
        match self {
            PairMode::Reduced => "reduced",
            PairMode::Full => "full",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleMode {
    /// Triples containing `F_{1,0}`.
    Reduced,
    Full,
    /// `n` triples of distinct factors drawn from a seeded generator.
    Sampled {
        n: usize,
        seed: u64,
    },
}

impl TripleMode {
    fn name(self) -> &'static str {
        match self {
            TripleMode::Reduced => "reduced",
            TripleMode::Full => "full",
            TripleMode::Sampled { .. } => "sampled",
        }
    }
}

fn elapsed(start: Instant, timings: bool) -> Option<u64> {
    timings.then(|| start.elapsed().as_millis() as u64)
}

/// All pairs `(i, j)`, `i < j`, in lexicographic order; `i = 0` only in
/// reduced mode.
fn first_failing_pair<T: Send>(
    len: usize,
    mode: PairMode,
    test: impl Fn(usize, usize) -> Option<T> + Sync,
) -> (u64, Option<(usize, usize, T)>) {
    let firsts = match mode {
        PairMode::Reduced => 0..len.min(1),
        PairMode::Full => 0..len,
    };
    let hit = firsts
        .into_par_iter()
        .find_map_first(|i| (i + 1..len).find_map(|j| test(i, j).map(|t| (i, j, t))));
    let total = |i: usize| (i * (2 * len - i - 1) / 2) as u64;
    let tasks = match (&hit, mode) {
        (Some((i, j, _)), _) => total(*i) + (j - i) as u64,
        (None, PairMode::Reduced) => len.saturating_sub(1) as u64,
        (None, PairMode::Full) => total(len),
    };
    (tasks, hit)
}

/// Connectivity of every relevant pairwise union; the witness is the first
/// disconnected pair with its components.
pub fn check_c1f(fam: &Factorisation, mode: PairMode, timings: bool) -> Result<PropertyReport, VerifyError> {
    let start = Instant::now();
    let n = fam.vertex_count();
    let (tasks, hit) = first_failing_pair(fam.len(), mode, |i, j| {
        (!factors_connected(&[fam.factor(i), fam.factor(j)], n)).then_some(())
    });
    let witness = hit.map(|(i, j, ())| {
        let h = union(&[fam.factor(i), fam.factor(j)]).expect("distinct factors");
        Witness::Disconnected {
            factors: refs(fam, &[i, j]),
            components: h.components(),
            prime_subfield_labels: labels_in_prime_subfield(fam, &[i, j]),
        }
    });
    Ok(PropertyReport {
        name: Property::C1f,
        mode: mode.name().into(),
        computed: Outcome::from_bool(witness.is_none()),
        predicted: predict(Property::C1f, fam.q())?,
        witness,
        stats: Stats {
            tasks,
            timeouts: 0,
            elapsed_ms: elapsed(start, timings),
        },
    })
}

/// The uniform and uniform-connected verdicts, computed together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformReports {
    pub u1f: PropertyReport,
    pub uc1f: PropertyReport,
}

/// Stage one compares every overlap with `F_{1,0}` against 2; stage two, run
/// only when all are 2, tests every pairwise union for isomorphism with
/// `F_{1,0} u F_1`.
pub fn check_u1f(fam: &Factorisation, timings: bool) -> Result<UniformReports, VerifyError> {
    let start = Instant::now();
    let q = fam.q();
    let len = fam.len();
    let (mut tasks, overlap_hit) = first_failing_pair(len, PairMode::Reduced, |i, j| {
        let o = pair_overlap(fam.factor(i), fam.factor(j)).expect("distinct factors");
        (o.count != 2).then_some(o)
    });
    let mut witness = overlap_hit.map(|(i, j, o)| Witness::Overlap {
        factors: refs(fam, &[i, j]),
        overlap: o.count,
        repeated_pairs: o.repeated_pairs,
    });
    let mut reference_connected = true;
    if witness.is_none() && len >= 2 {
        let reference = union(&[fam.factor(0), fam.factor(1)]).expect("distinct factors");
        reference_connected = reference.is_connected();
        let (iso_tasks, iso_hit) = first_failing_pair(len, PairMode::Full, |i, j| {
            let h = union(&[fam.factor(i), fam.factor(j)]).expect("distinct factors");
            let phi = is_isomorphic(&reference, &h).expect("same vertex count");
            phi.is_none().then_some(())
        });
        tasks += iso_tasks;
        witness = iso_hit.map(|(i, j, ())| Witness::NonIsomorphic {
            reference: refs(fam, &[0, 1]),
            factors: refs(fam, &[i, j]),
        });
    }
    let uniform = witness.is_none();
    let stats = Stats {
        tasks,
        timeouts: 0,
        elapsed_ms: elapsed(start, timings),
    };
    let uc1f_witness = match (&witness, reference_connected) {
        (Some(w), _) => Some(w.clone()),
        (None, false) => {
            let h = union(&[fam.factor(0), fam.factor(1)]).expect("distinct factors");
            Some(Witness::Disconnected {
                factors: refs(fam, &[0, 1]),
                components: h.components(),
                prime_subfield_labels: labels_in_prime_subfield(fam, &[0, 1]),
            })
        }
        (None, true) => None,
    };
    Ok(UniformReports {
        uc1f: PropertyReport {
            name: Property::Uc1f,
            mode: "reduced".into(),
            computed: Outcome::from_bool(uniform && reference_connected),
            predicted: predict(Property::Uc1f, q)?,
            witness: uc1f_witness,
            stats: stats.clone(),
        },
        u1f: PropertyReport {
            name: Property::U1f,
            mode: "reduced".into(),
            computed: Outcome::from_bool(uniform),
            predicted: predict(Property::U1f, q)?,
            witness,
            stats,
        },
    })
}

#[derive(Clone, Debug)]
pub struct HbOptions {
    pub mode: TripleMode,
    pub budget: SearchBudget,
    /// Resume file of completed triple indices, appended to as the sweep
    /// progresses.
    pub checkpoint: Option<PathBuf>,
    pub timings: bool,
}

impl HbOptions {
    pub fn new(mode: TripleMode) -> Self {
        HbOptions {
            mode,
            budget: SearchBudget::default(),
            checkpoint: None,
            timings: false,
        }
    }
}

const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TripleStatus {
    Hamiltonian,
    NoCycle,
    Timeout,
}

impl TripleStatus {
    fn code(self) -> &'static str {
        match self {
            TripleStatus::Hamiltonian => "ok",
            TripleStatus::NoCycle => "nocycle",
            TripleStatus::Timeout => "timeout",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ok" => TripleStatus::Hamiltonian,
            "nocycle" => TripleStatus::NoCycle,
            "timeout" => TripleStatus::Timeout,
            _ => return None,
        })
    }
}

fn triples(len: usize, mode: TripleMode) -> Box<dyn Iterator<Item = [usize; 3]> + Send> {
    match mode {
        TripleMode::Reduced => Box::new((1..len).flat_map(move |j| (j + 1..len).map(move |k| [0, j, k]))),
        TripleMode::Full => {
            Box::new((0..len).flat_map(move |i| (i + 1..len).flat_map(move |j| (j + 1..len).map(move |k| [i, j, k]))))
        }
        TripleMode::Sampled { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let drawn: Vec<[usize; 3]> = if len < 3 {
                Vec::new()
            } else {
                (0..n)
                    .map(|_| {
                        let mut t = [0; 3];
                        for (slot, v) in t.iter_mut().zip(sample(&mut rng, len, 3)) {
                            *slot = v;
                        }
                        t.sort_unstable();
                        t
                    })
                    .collect()
            };
            Box::new(drawn.into_iter())
        }
    }
}

fn load_checkpoint(path: &PathBuf) -> Result<HashMap<u64, TripleStatus>, VerifyError> {
    let mut done = HashMap::new();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(e.into()),
    };
    for (n, line) in text.lines().enumerate() {
        let bad = |message: &str| VerifyError::Checkpoint {
            line: n + 1,
            message: message.into(),
        };
        let mut parts = line.split_whitespace();
        let (Some(idx), Some(code), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad("expected `<index> <status>`"));
        };
        let idx: u64 = idx.parse().map_err(|_| bad("bad task index"))?;
        let status = TripleStatus::parse(code).ok_or_else(|| bad("unknown status"))?;
        done.insert(idx, status);
    }
    Ok(done)
}

/// Hamilton Berge cycles in every relevant triple union.
///
/// A connectivity pass over all triples runs first and stops at the first
/// disconnected union. Otherwise each union is searched; a search that hits
/// the time budget makes the verdict indeterminate unless some other triple
/// has no cycle.
pub fn check_hb1f(fam: &Factorisation, opts: &HbOptions) -> Result<PropertyReport, VerifyError> {
    let start = Instant::now();
    let len = fam.len();
    let n = fam.vertex_count();
    let mut report = PropertyReport {
        name: Property::Hb1f,
        mode: opts.mode.name().into(),
        computed: Outcome::Holds,
        predicted: predict(Property::Hb1f, fam.q())?,
        witness: None,
        stats: Stats::default(),
    };
    let factors_of = |t: &[usize; 3]| [fam.factor(t[0]), fam.factor(t[1]), fam.factor(t[2])];

    let mut iter = triples(len, opts.mode);
    let mut seen = 0u64;
    loop {
        let chunk: Vec<[usize; 3]> = iter.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let hit = chunk
            .par_iter()
            .position_first(|t| !factors_connected(&factors_of(t), n));
        if let Some(pos) = hit {
            let t = chunk[pos];
            report.computed = Outcome::Fails;
            report.stats.tasks = seen + pos as u64 + 1;
            report.witness = Some(Witness::NoHamiltonCycle {
                factors: refs(fam, &t),
                disconnected: true,
            });
            report.stats.elapsed_ms = elapsed(start, opts.timings);
            return Ok(report);
        }
        seen += chunk.len() as u64;
    }

    let mut done = match &opts.checkpoint {
        Some(p) => load_checkpoint(p)?,
        None => HashMap::new(),
    };
    let mut log = match &opts.checkpoint {
        Some(p) => Some(OpenOptions::new().create(true).append(true).open(p)?),
        None => None,
    };
    let mut iter = triples(len, opts.mode).enumerate();
    let mut first_timeout: Option<[usize; 3]> = None;
    let mut tasks = 0u64;
    loop {
        let chunk: Vec<(usize, [usize; 3])> = iter.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let statuses: Vec<(TripleStatus, bool)> = chunk
            .par_iter()
            .map(|(idx, t)| {
                if let Some(&s) = done.get(&(*idx as u64)) {
                    return (s, false);
                }
                let h = union(&factors_of(t)).expect("distinct factors");
                let s = match has_hamilton_berge_cycle(&h, opts.budget) {
                    BergeOutcome::Found(c) => {
                        debug_assert!(c.is_hamiltonian_in(&h));
                        TripleStatus::Hamiltonian
                    }
                    BergeOutcome::NoCycle => TripleStatus::NoCycle,
                    BergeOutcome::Timeout => TripleStatus::Timeout,
                };
                (s, true)
            })
            .collect();
        if let Some(file) = log.as_mut() {
            let mut buf = String::new();
            for ((idx, _), (s, fresh)) in chunk.iter().zip(&statuses) {
                if *fresh {
                    buf.push_str(&format!("{idx} {}\n", s.code()));
                }
            }
            file.write_all(buf.as_bytes())?;
            file.flush()?;
        }
        for ((idx, t), (s, _)) in chunk.iter().zip(&statuses) {
            done.remove(&(*idx as u64));
            tasks += 1;
            match s {
                TripleStatus::Hamiltonian => {}
                TripleStatus::Timeout => {
                    report.stats.timeouts += 1;
                    first_timeout.get_or_insert(*t);
                }
                TripleStatus::NoCycle => {
                    report.computed = Outcome::Fails;
                    report.stats.tasks = tasks;
                    report.witness = Some(Witness::NoHamiltonCycle {
                        factors: refs(fam, t),
                        disconnected: false,
                    });
                    report.stats.elapsed_ms = elapsed(start, opts.timings);
                    return Ok(report);
                }
            }
        }
    }
    report.stats.tasks = tasks;
    if let Some(t) = first_timeout {
        report.computed = Outcome::Indeterminate;
        report.witness = Some(Witness::Timeout { factors: refs(fam, &t) });
    }
    report.stats.elapsed_ms = elapsed(start, opts.timings);
    Ok(report)
}
