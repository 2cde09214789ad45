//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Reference values are recomputed here from first
//! principles rather than taken from the library.

use std::collections::{BTreeMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperfactor::factorisation::{is_base_label, Factorisation, OneFactor};
use hyperfactor::group::{classify_all, generate, ClosurePolicy, SubgroupClass};
use hyperfactor::hypergraph::{
    has_hamilton_berge_cycle, overlap_algebraic, pair_overlap, union, BergeOutcome, SearchBudget,
};
use hyperfactor::projective::{Label, ProjectiveLine};
use hyperfactor::verifier::{
    check_c1f, check_hb1f, check_u1f, run_suite, trace_condition_scan, HbOptions, Outcome, PairMode, SuiteConfig,
    TripleMode, Witness,
};

const ORDERS: [u32; 13] = [2, 5, 8, 11, 17, 23, 29, 32, 41, 47, 53, 59, 125];
const C1F_TRUE: [u32; 5] = [2, 5, 8, 11, 32];
const U1F_TRUE: [u32; 3] = [2, 5, 8];

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

// ---- oracles ----

fn choose3(n: u64) -> u64 {
    n * (n - 1) * (n - 2) / 6
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn psl_order(q: u64) -> u64 {
    q * (q * q - 1) / gcd(2, q - 1)
}

fn is_qr_brute(a: u64, p: u64) -> bool {
    (1..p).any(|x| x * x % p == a % p)
}

/// Union-find components over the vertices of the given factors.
fn connected(factors: &[&OneFactor], n: usize) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for f in factors {
        for e in f.edges() {
            let [a, b, c] = e.vertices().map(|v| v as usize);
            for (x, y) in [(a, b), (b, c)] {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                parent[rx] = ry;
            }
        }
    }
    let root = find(&mut parent, 0);
    (0..n).all(|v| find(&mut parent, v) == root)
}

/// Pairs inside an edge of `b` that also lie inside an edge of `a`.
fn overlap_oracle(a: &OneFactor, b: &OneFactor) -> usize {
    let pairs: HashSet<(u32, u32)> = a
        .edges()
        .iter()
        .flat_map(|e| {
            let [x, y, z] = e.vertices();
            [(x.min(y), x.max(y)), (x.min(z), x.max(z)), (y.min(z), y.max(z))]
        })
        .collect();
    b.edges()
        .iter()
        .map(|e| {
            let [x, y, z] = e.vertices();
            [(x, y), (x, z), (y, z)]
                .iter()
                .filter(|&&(u, v)| pairs.contains(&(u.min(v), u.max(v))))
                .count()
        })
        .sum()
}

/// Whether the group generated by the permutations moves every point to every other.
fn perms_transitive(perms: &[Vec<u32>]) -> bool {
    let n = perms[0].len();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for p in perms {
            let y = p[x] as usize;
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// GF(2^l) as bit vectors modulo the first irreducible found by trial division.
struct Gf2 {
    ell: u32,
    modulus: u64,
}

impl Gf2 {
    fn new(ell: u32) -> Self {
        let pmod = |mut a: u64, b: u64| {
            let db = 63 - b.leading_zeros();
            while a != 0 && 63 - a.leading_zeros() >= db {
                a ^= b << (63 - a.leading_zeros() - db);
            }
            a
        };
        let modulus = ((1u64 << ell) + 1..1u64 << (ell + 1))
            .step_by(2)
            .find(|&m| (2u64..1 << (ell / 2 + 1)).all(|d| pmod(m, d) != 0))
            .expect("irreducible exists");
        Gf2 { ell, modulus }
    }

    fn mul(&self, mut a: u64, mut b: u64) -> u64 {
        let mut r = 0;
        while b != 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> self.ell & 1 == 1 {
                a ^= self.modulus;
            }
        }
        r
    }

    fn pow(&self, a: u64, mut e: u64) -> u64 {
        let (mut base, mut r) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    fn inv(&self, a: u64) -> u64 {
        self.pow(a, (1 << self.ell) - 2)
    }

    fn trace(&self, a: u64) -> u64 {
        let (mut t, mut x) = (0, a);
        for _ in 0..self.ell {
            t ^= x;
            x = self.mul(x, x);
        }
        t
    }
}

// ---- criteria ----

fn construction() -> Check {
    let mut slowest = Duration::ZERO;
    for q in ORDERS {
        let start = Instant::now();
        let fam = Factorisation::with_order(q).map_err(|e| e.to_string())?;
        let n = q as u64 + 1;
        ensure!(
            fam.len() as u64 == q as u64 * (q as u64 - 1) / 2,
            "q={q}: {} factors",
            fam.len()
        );
        let mut seen = HashSet::new();
        let mut duplicates = 0u64;
        for f in fam.factors() {
            let mut cover = vec![0u8; n as usize];
            for e in f.edges() {
                let mut v = e.vertices();
                v.sort_unstable();
                for x in v {
                    cover[x as usize] += 1;
                }
                if !seen.insert(v) {
                    duplicates += 1;
                }
            }
            ensure!(
                cover.iter().all(|&c| c == 1),
                "q={q}: {} is not a perfect matching",
                f.label()
            );
        }
        let missing = choose3(n) - seen.len() as u64;
        ensure!(
            duplicates == 0 && missing == 0,
            "q={q}: {duplicates} duplicate, {missing} missing edges"
        );
        ensure!(
            fam.verify_partition().is_partition(),
            "q={q}: library partition check disagrees"
        );
        let t = start.elapsed();
        ensure!(t < Duration::from_secs(30), "q={q}: took {t:?}");
        slowest = slowest.max(t);
    }
    Ok(format!(
        "{} orders, slowest {:.2}s",
        ORDERS.len(),
        slowest.as_secs_f64()
    ))
}

fn c1f() -> Check {
    let mut runs = 0;
    for q in ORDERS {
        let fam = Factorisation::with_order(q).unwrap();
        let modes: &[PairMode] = if q <= 17 {
            &[PairMode::Reduced, PairMode::Full]
        } else {
            &[PairMode::Reduced]
        };
        for &mode in modes {
            runs += 1;
            let r = check_c1f(&fam, mode, false).map_err(|e| e.to_string())?;
            let want = C1F_TRUE.contains(&q);
            ensure!(
                r.computed == Outcome::from_bool(want),
                "q={q} {}: computed {}",
                r.mode,
                r.computed
            );
            ensure!(
                Outcome::from_bool(r.predicted) == r.computed,
                "q={q}: prediction {} vs {}",
                r.predicted,
                r.computed
            );
            if want {
                continue;
            }
            let Some(Witness::Disconnected { factors, .. }) = &r.witness else {
                return Err(format!("q={q}: no disconnection witness"));
            };
            let fs: Vec<&OneFactor> = factors.iter().map(|f| fam.factor(f.index)).collect();
            ensure!(!connected(&fs, q as usize + 1), "q={q}: witness union is connected");
            if q == 125 {
                for f in factors {
                    let in_gf5 = fam
                        .labels_of(f.index)
                        .iter()
                        .any(|l| l.alpha.index() < 5 && l.beta.index() < 5);
                    ensure!(in_gf5, "q=125: witness factor {} has no GF(5) label", f.index);
                }
            }
        }
    }
    Ok(format!("{runs} runs match, witnesses replayed"))
}

fn u1f() -> Check {
    for q in ORDERS {
        let fam = Factorisation::with_order(q).unwrap();
        let r = check_u1f(&fam, false).map_err(|e| e.to_string())?;
        if U1F_TRUE.contains(&q) {
            ensure!(r.u1f.computed == Outcome::Holds, "q={q}: u1f {}", r.u1f.computed);
            ensure!(r.uc1f.computed == Outcome::Holds, "q={q}: uc1f {}", r.uc1f.computed);
            if fam.len() > 1 {
                let expected_pairs = (fam.len() * (fam.len() - 1) / 2) as u64;
                ensure!(
                    r.u1f.stats.tasks >= expected_pairs,
                    "q={q}: only {} isomorphism tasks",
                    r.u1f.stats.tasks
                );
            }
            continue;
        }
        ensure!(r.u1f.computed == Outcome::Fails, "q={q}: u1f {}", r.u1f.computed);
        let Some(Witness::Overlap { factors, overlap, .. }) = &r.u1f.witness else {
            return Err(format!("q={q}: no overlap witness"));
        };
        let real = overlap_oracle(fam.factor(factors[0].index), fam.factor(factors[1].index));
        ensure!(
            real == *overlap && real != 2,
            "q={q}: witness overlap {overlap}, recount {real}"
        );
    }
    Ok("all orders match, overlap witnesses recounted".into())
}

fn minus_one_overlap() -> Check {
    let mut seen = Vec::new();
    for (q, want) in [(11u32, 3usize), (29, 3), (17, 1), (23, 1)] {
        let fam = Factorisation::with_order(q).unwrap();
        let f = fam.field();
        let label = Label::new(f.element(q - 1), f.element(0));
        let j = fam.index_of(label).unwrap();
        let got = overlap_oracle(fam.factor(0), fam.factor(j));
        let lib = pair_overlap(fam.factor(0), fam.factor(j)).unwrap().count;
        let rule = if is_qr_brute(5, q as u64) { 3 } else { 1 };
        ensure!(
            got == want && lib == want && rule == want,
            "q={q}: recount {got}, library {lib}, rule {rule}"
        );
        seen.push(format!("{q}->{got}"));
    }
    Ok(seen.join(" "))
}

fn algebraic_overlap() -> Check {
    let mut exhaustive = 0;
    for q in ORDERS.into_iter().filter(|&q| q <= 32) {
        let fam = Factorisation::with_order(q).unwrap();
        let f = fam.field();
        for a in 1..q {
            for b in 0..q {
                let label = Label::new(f.element(a), f.element(b));
                if is_base_label(f, label) {
                    continue;
                }
                let j = fam.index_of(label).unwrap();
                let alg = overlap_algebraic(f, label).unwrap().count;
                let comb = overlap_oracle(fam.factor(0), fam.factor(j));
                ensure!(alg == comb, "q={q} {label}: algebraic {alg}, recount {comb}");
                exhaustive += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for q in [125u32, 128] {
        let fam = Factorisation::with_order(q).unwrap();
        let f = fam.field();
        let mut done = 0;
        while done < 1000 {
            let label = Label::new(f.element(rng.gen_range(1..q)), f.element(rng.gen_range(0..q)));
            if is_base_label(f, label) {
                continue;
            }
            let j = fam.index_of(label).unwrap();
            let alg = overlap_algebraic(f, label).unwrap().count;
            let comb = overlap_oracle(fam.factor(0), fam.factor(j));
            ensure!(alg == comb, "q={q} {label}: algebraic {alg}, recount {comb}");
            done += 1;
        }
    }
    Ok(format!(
        "{exhaustive} labels exhaustively, 1000 random each for 125 and 128"
    ))
}

fn connectivity_transitivity() -> Check {
    let mut checked = 0;
    for q in [5u32, 8, 11, 17] {
        let fam = Factorisation::with_order(q).unwrap();
        let line = ProjectiveLine::new(fam.field());
        let classes = classify_all(&fam, ClosurePolicy::EarlyExit);
        let f = line.permutation(&line.make_f());
        for (j, c) in (1..fam.len()).zip(&classes) {
            let m = line.permutation(&line.make_m_label(fam.factor(j).label()).unwrap());
            let trans = perms_transitive(&[f.clone(), m]);
            let conn = connected(&[fam.factor(0), fam.factor(j)], q as usize + 1);
            ensure!(
                trans == conn && c.transitive == trans,
                "q={q} factor {j}: transitive {trans}, connected {conn}"
            );
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs"))
}

fn subgroups() -> Check {
    let allowed = [
        SubgroupClass::A4,
        SubgroupClass::S4,
        SubgroupClass::A5,
        SubgroupClass::FullPsl,
    ];
    let mut notes = Vec::new();
    for q in [11u32, 17, 23] {
        let fam = Factorisation::with_order(q).unwrap();
        let early = classify_all(&fam, ClosurePolicy::EarlyExit);
        let exact = classify_all(&fam, ClosurePolicy::Exact);
        let mut hist: BTreeMap<String, usize> = BTreeMap::new();
        for (e, x) in early.iter().zip(&exact) {
            ensure!(
                allowed.contains(&e.class),
                "q={q} ({}, {}): class {}",
                e.alpha,
                e.beta,
                e.class
            );
            let order = x.order.unwrap() as u64;
            let by_order = match order {
                12 => SubgroupClass::A4,
                24 => SubgroupClass::S4,
                60 => SubgroupClass::A5,
                n if n == psl_order(q as u64) => SubgroupClass::FullPsl,
                n => return Err(format!("q={q}: exact order {n}")),
            };
            ensure!(by_order == e.class, "q={q}: early {} vs exact order {order}", e.class);
            *hist.entry(e.class.to_string()).or_default() += 1;
        }
        if q != 11 {
            ensure!(hist.contains_key("A4"), "q={q}: no A4 class");
        }
        notes.push(format!("{q}:{hist:?}"));
    }
    for q in [8u32, 32] {
        let fam = Factorisation::with_order(q).unwrap();
        let line = ProjectiveLine::new(fam.field());
        let want = psl_order(q as u64) as usize;
        for j in 1..fam.len() {
            let gens = [line.make_f(), line.make_m_label(fam.factor(j).label()).unwrap()];
            let g = generate(&line, &gens, None).map_err(|e| e.to_string())?;
            ensure!(g.order() == want, "q={q} factor {j}: order {}", g.order());
        }
        notes.push(format!("{q}:all {want}"));
    }
    Ok(notes.join(" "))
}

fn trace_scans() -> Check {
    let mut notes = Vec::new();
    for ell in [3u32, 5, 7, 9, 11, 13] {
        let s = trace_condition_scan(ell).map_err(|e| e.to_string())?;
        let gf = Gf2::new(ell);
        let size = 1u64 << ell;
        let witnesses = (1..size)
            .filter(|&a| {
                let c = gf.mul(a, a) ^ a ^ 1;
                let c2inv = gf.inv(gf.mul(c, c));
                gf.trace(gf.mul(a, c2inv)) == 0 || gf.trace(gf.mul(gf.mul(a, a), c2inv)) == 0
            })
            .count();
        let roots = (2..size).filter(|&x| gf.trace(x ^ gf.inv(x)) == 1).count();
        let bound = (1usize << (ell - 1)) + (1 << (ell - 2));
        ensure!(
            s.trace_zero_witnesses.len() == witnesses,
            "l={ell}: {} witnesses, oracle {witnesses}",
            s.trace_zero_witnesses.len()
        );
        ensure!(
            s.poly_root_count == roots,
            "l={ell}: {} roots, oracle {roots}",
            s.poly_root_count
        );
        ensure!(
            s.all_trace1 == (roots as u64 == size - 2),
            "l={ell}: all_trace1 {}",
            s.all_trace1
        );
        ensure!(roots <= bound, "l={ell}: {roots} roots above {bound}");
        if ell == 3 {
            ensure!(
                witnesses == 0 && s.all_trace1,
                "l=3: witnesses {witnesses}, all_trace1 {}",
                s.all_trace1
            );
        } else {
            ensure!(
                witnesses > 0 && !s.all_trace1,
                "l={ell}: witnesses {witnesses}, all_trace1 {}",
                s.all_trace1
            );
        }
        notes.push(format!("{ell}:{witnesses}/{roots}"));
    }
    Ok(notes.join(" "))
}

fn hb1f() -> Check {
    let mut notes = Vec::new();
    for q in [5u32, 8, 11] {
        let fam = Factorisation::with_order(q).unwrap();
        let r = check_hb1f(&fam, &HbOptions::new(TripleMode::Full)).map_err(|e| e.to_string())?;
        let k = fam.len() as u64;
        ensure!(r.computed == Outcome::Holds, "q={q} full: {}", r.computed);
        ensure!(
            r.stats.tasks == k * (k - 1) * (k - 2) / 6,
            "q={q}: {} triples",
            r.stats.tasks
        );
        notes.push(format!("{q}:{}", r.stats.tasks));
    }

    let fam = Factorisation::with_order(32).unwrap();
    let start = Instant::now();
    let r = check_hb1f(&fam, &HbOptions::new(TripleMode::Reduced)).map_err(|e| e.to_string())?;
    ensure!(r.computed == Outcome::Holds, "q=32 reduced: {}", r.computed);
    ensure!(
        start.elapsed() < Duration::from_secs(1800),
        "q=32 reduced took {:?}",
        start.elapsed()
    );
    notes.push(format!("32:{} in {:.1}s", r.stats.tasks, start.elapsed().as_secs_f64()));

    let fam = Factorisation::with_order(125).unwrap();
    let f = fam.field();
    let pick = |a: u32, b: u32| fam.index_of(Label::new(f.element(a), f.element(b))).unwrap();
    let triple = [fam.factor(0), fam.factor(pick(1, 1)), fam.factor(pick(2, 0))];
    ensure!(!connected(&triple, 126), "q=125: GF(5) triple is connected");
    let h = union(&triple).unwrap();
    ensure!(
        has_hamilton_berge_cycle(&h, SearchBudget::default()) == BergeOutcome::NoCycle,
        "q=125: GF(5) triple reported a cycle"
    );
    notes.push("125:GF(5) triple disconnected".into());

    let fam = Factorisation::with_order(128).unwrap();
    let r = check_hb1f(&fam, &HbOptions::new(TripleMode::Sampled { n: 10_000, seed: 1 })).map_err(|e| e.to_string())?;
    println!(
        "    info: q=128 sampled 10000 triples computed={} timeouts={}",
        r.computed, r.stats.timeouts
    );
    Ok(notes.join(" "))
}

fn determinism() -> Check {
    let run = || serde_json::to_string_pretty(&run_suite(&SuiteConfig::default_suite()).unwrap()).unwrap();
    let (a, b) = (run(), run());
    ensure!(
        a.as_bytes() == b.as_bytes(),
        "default suite output differs between runs"
    );
    let report = run_suite(&SuiteConfig::default_suite()).unwrap();
    ensure!(
        report.exit_code() == 0,
        "default suite exit code {}",
        report.exit_code()
    );
    Ok(format!("{} bytes identical", a.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("construction soundness", construction),
        ("C1F", c1f),
        ("U1F", u1f),
        ("overlap at (-1,0)", minus_one_overlap),
        ("algebraic overlap", algebraic_overlap),
        ("connectivity vs transitivity", connectivity_transitivity),
        ("subgroup classification", subgroups),
        ("trace scans", trace_scans),
        ("HB1F", hb1f),
        ("deterministic JSON", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let tag = format!("{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| *f == tag || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {tag:>2} PASS {name}: {detail} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("criterion {tag:>2} FAIL {name}: {why} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
