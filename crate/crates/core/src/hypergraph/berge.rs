//! Hamilton Berge cycles as cycles of the vertex-edge incidence graph.
//!
//! A Berge cycle `(v_1, e_1, .., v_m, e_m)` is a cycle `v_1 e_1 v_2 .. e_m v_1`
//! in the bipartite incidence graph, and it is Hamiltonian when it passes
//! through every vertex node. The search decides each incidence link as in
//! or out of the cycle and propagates degree constraints: every vertex node
//! has exactly two links in, every edge node zero or two (exactly two when
//! edges and vertices are equinumerous), and no link may close a cycle
//! missing some vertex. Attempts run
//! under a doubling node limit, each with a rotated branching order; an
//! attempt that exhausts its tree within the limit proves there is no cycle.

use std::time::{Duration, Instant};

use serde::Serialize;

use super::UnionHypergraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub time_limit: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            time_limit: Some(Duration::from_secs(10)),
        }
    }
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        SearchBudget { time_limit: None }
    }

    pub fn millis(ms: u64) -> Self {
        SearchBudget {
            time_limit: Some(Duration::from_millis(ms)),
        }
    }
}

/// A Berge cycle `(v_1, e_1, .., v_m, e_m)`: `edges[i]` joins `vertices[i]`
/// and `vertices[(i + 1) % m]`. Edges are indices into the hypergraph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BergeCycle {
    pub vertices: Vec<u32>,
    pub edges: Vec<u32>,
}

impl BergeCycle {
    /// Replays the cycle against `h`: distinct vertices covering all of `h`,
    /// distinct edges, and every consecutive pair inside its edge.
    pub fn is_hamiltonian_in(&self, h: &UnionHypergraph) -> bool {
        let m = self.vertices.len();
        if m != h.vertex_count() as usize || self.edges.len() != m || m == 0 {
            return false;
        }
        let mut vs = self.vertices.clone();
        vs.sort_unstable();
        vs.dedup();
        let mut es = self.edges.clone();
        es.sort_unstable();
        es.dedup();
        if vs.len() != m || es.len() != m || es.iter().any(|&e| e as usize >= h.edges().len()) {
            return false;
        }
        (0..m).all(|i| {
            let e = &h.edges()[self.edges[i] as usize];
            e.contains(self.vertices[i]) && e.contains(self.vertices[(i + 1) % m])
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BergeOutcome {
    Found(BergeCycle),
    NoCycle,
    Timeout,
}

impl BergeOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, BergeOutcome::Found(_))
    }
}

pub fn has_hamilton_berge_cycle(h: &UnionHypergraph, budget: SearchBudget) -> BergeOutcome {
    let n = h.vertex_count() as usize;
    let m = h.edges().len();
    if n == 0 {
        return BergeOutcome::NoCycle;
    }
    if n == 1 {
        return match h.incident(0).first() {
            Some(&e) => BergeOutcome::Found(BergeCycle {
                vertices: vec![0],
                edges: vec![e],
            }),
            None => BergeOutcome::NoCycle,
        };
    }
    if m < n || !h.is_connected() {
        return BergeOutcome::NoCycle;
    }
    let deadline = budget.time_limit.map(|d| Instant::now() + d);
    for attempt in 0u32.. {
        let node_limit = (RESTART_BASE << attempt.min(40)).max(RESTART_BASE);
        let mut s = Searcher::new(h, deadline, node_limit, attempt as usize);
        match s.run() {
            Step::Done => return BergeOutcome::Found(s.extract()),
            Step::Exhausted => return BergeOutcome::NoCycle,
            Step::Timeout => return BergeOutcome::Timeout,
            Step::Limit => {}
        }
    }
    unreachable!("attempts are unbounded")
}

/// Node limit of the first attempt; each restart doubles it and rotates
/// the branching tie-break.
const RESTART_BASE: u64 = 2048;

const UNKNOWN: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;

#[derive(Clone, Copy)]
enum Undo {
    Link(u32),
    /// Node whose path endpoint and vertex count were overwritten.
    Path(u32, u32, u32),
}

struct Conflict;

enum Step {
    Done,
    Exhausted,
    Timeout,
    Limit,
}

/// Incidence-graph nodes: vertices `0..n`, then edges `n..n+m`.
struct Searcher<'a> {
    h: &'a UnionHypergraph,
    n: usize,
    /// `(vertex node, edge node)` per link.
    links: Vec<(u32, u32)>,
    node_links: Vec<Vec<u32>>,
    required: Vec<bool>,
    state: Vec<u8>,
    ins: Vec<u8>,
    outs: Vec<u8>,
    /// For a path endpoint, the other endpoint.
    end: Vec<u32>,
    /// For a path endpoint, the number of vertex nodes on the path.
    path_vertices: Vec<u32>,
    closed: bool,
    trail: Vec<Undo>,
    queue: Vec<u32>,
    deadline: Option<Instant>,
    nodes: u64,
    node_limit: u64,
    offset: usize,
}

impl<'a> Searcher<'a> {
    fn new(h: &'a UnionHypergraph, deadline: Option<Instant>, node_limit: u64, attempt: usize) -> Self {
        let n = h.vertex_count() as usize;
        let m = h.edges().len();
        let total = n + m;
        let mut links = Vec::with_capacity(3 * m);
        let mut node_links = vec![Vec::new(); total];
        for (e, edge) in h.edges().iter().enumerate() {
            for v in edge.vertices() {
                let id = links.len() as u32;
                links.push((v, (n + e) as u32));
                node_links[v as usize].push(id);
                node_links[n + e].push(id);
            }
        }
        let required = (0..total).map(|x| x < n || m == n).collect();
        Searcher {
            h,
            n,
            state: vec![UNKNOWN; links.len()],
            links,
            node_links,
            required,
            ins: vec![0; total],
            outs: vec![0; total],
            end: (0..total as u32).collect(),
            path_vertices: (0..total).map(|x| (x < n) as u32).collect(),
            closed: false,
            trail: Vec::new(),
            queue: Vec::new(),
            deadline,
            nodes: 0,
            node_limit,
            offset: attempt.wrapping_mul(7919) % total,
        }
    }

    fn run(&mut self) -> Step {
        let initial: Vec<u32> = (0..self.node_links.len() as u32).collect();
        self.queue.extend(initial);
        if self.propagate().is_err() {
            return Step::Exhausted;
        }
        self.search()
    }

    fn set(&mut self, link: u32, value: u8) -> Result<(), Conflict> {
        let cur = self.state[link as usize];
        if cur == value {
            return Ok(());
        }
        if cur != UNKNOWN {
            return Err(Conflict);
        }
        let (a, b) = self.links[link as usize];
        if value == IN {
            if self.closed || self.ins[a as usize] == 2 || self.ins[b as usize] == 2 {
                return Err(Conflict);
            }
            if self.end[a as usize] == b {
                if self.path_vertices[a as usize] as usize != self.n {
                    return Err(Conflict);
                }
                self.closed = true;
            } else {
                let (ea, eb) = (self.end[a as usize], self.end[b as usize]);
                let count = self.path_vertices[a as usize] + self.path_vertices[b as usize];
                for x in [ea, eb] {
                    self.trail
                        .push(Undo::Path(x, self.end[x as usize], self.path_vertices[x as usize]));
                }
                self.end[ea as usize] = eb;
                self.end[eb as usize] = ea;
                self.path_vertices[ea as usize] = count;
                self.path_vertices[eb as usize] = count;
            }
            self.ins[a as usize] += 1;
            self.ins[b as usize] += 1;
        } else {
            self.outs[a as usize] += 1;
            self.outs[b as usize] += 1;
        }
        self.state[link as usize] = value;
        self.trail.push(Undo::Link(link));
        self.queue.push(a);
        self.queue.push(b);
        Ok(())
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("nonempty") {
                Undo::Link(link) => {
                    let (a, b) = self.links[link as usize];
                    if self.state[link as usize] == IN {
                        self.ins[a as usize] -= 1;
                        self.ins[b as usize] -= 1;
                        if self.end[a as usize] == b && self.closed {
                            self.closed = false;
                        }
                    } else {
                        self.outs[a as usize] -= 1;
                        self.outs[b as usize] -= 1;
                    }
                    self.state[link as usize] = UNKNOWN;
                }
                Undo::Path(x, end, count) => {
                    self.end[x as usize] = end;
                    self.path_vertices[x as usize] = count;
                }
            }
        }
        self.queue.clear();
    }

    fn propagate(&mut self) -> Result<(), Conflict> {
        while let Some(x) = self.queue.pop() {
            let x = x as usize;
            let deg = self.node_links[x].len() as u8;
            let (ins, outs) = (self.ins[x], self.outs[x]);
            let unknown = deg - ins - outs;
            if unknown == 0 && ins != 1 && (ins == 2 || !self.required[x]) {
                continue;
            }
            let fill = if ins == 2 {
                Some(OUT)
            } else if self.required[x] {
                match ins + unknown {
                    0 | 1 => return Err(Conflict),
                    2 => Some(IN),
                    _ => None,
                }
            } else {
                match (ins, unknown) {
                    (1, 0) => return Err(Conflict),
                    (1, 1) => Some(IN),
                    (0, 1) => Some(OUT),
                    _ => None,
                }
            };
            if let Some(value) = fill {
                for i in 0..self.node_links[x].len() {
                    let link = self.node_links[x][i];
                    if self.state[link as usize] == UNKNOWN {
                        self.set(link, value)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Unknown link to branch on: at a path endpoint with the fewest open
    /// links, else at any node with an open link.
    fn choose(&self) -> Option<u32> {
        let mut best: Option<(u8, u32)> = None;
        let mut fallback = None;
        let total = self.node_links.len();
        for x in (0..total).map(|i| (i + self.offset) % total) {
            let ls = &self.node_links[x];
            let unknown = ls.len() as u8 - self.ins[x] - self.outs[x];
            if unknown == 0 {
                continue;
            }
            let first = *ls
                .iter()
                .find(|&&l| self.state[l as usize] == UNKNOWN)
                .expect("counted");
            if self.ins[x] == 1 && best.is_none_or(|(u, _)| unknown < u) {
                best = Some((unknown, first));
            }
            fallback.get_or_insert(first);
        }
        best.map(|(_, l)| l).or(fallback)
    }

    fn search(&mut self) -> Step {
        self.nodes += 1;
        if self.nodes & 1023 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Step::Timeout;
        }
        if self.nodes > self.node_limit {
            return Step::Limit;
        }
        if self.closed {
            return Step::Done;
        }
        let Some(link) = self.choose() else {
            return Step::Exhausted;
        };
        for value in [IN, OUT] {
            let mark = self.trail.len();
            if self.set(link, value).is_ok() && self.propagate().is_ok() {
                match self.search() {
                    Step::Exhausted => {}
                    other => return other,
                }
            }
            self.undo_to(mark);
        }
        Step::Exhausted
    }

    /// Walks the closed cycle from vertex 0.
    fn extract(&self) -> BergeCycle {
        let other_in = |x: u32, from: u32| -> u32 {
            self.node_links[x as usize]
                .iter()
                .copied()
                .find(|&l| self.state[l as usize] == IN && l != from)
                .expect("cycle nodes have two links in")
        };
        let mut vertices = Vec::with_capacity(self.n);
        let mut edges = Vec::with_capacity(self.n);
        let mut v = 0u32;
        let mut via = u32::MAX;
        loop {
            vertices.push(v);
            let l1 = other_in(v, via);
            let e = self.links[l1 as usize].1;
            edges.push(e - self.n as u32);
            let l2 = other_in(e, l1);
            v = self.links[l2 as usize].0;
            via = l2;
            if v == 0 {
                break;
            }
        }
        let cycle = BergeCycle { vertices, edges };
        debug_assert!(cycle.is_hamiltonian_in(self.h));
        cycle
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorisation::{Edge, Factorisation};
    use crate::hypergraph::union;
    use rand::{Rng, SeedableRng};

    /// Oracle: every cyclic vertex order from vertex 0, with edges assigned
    /// to consecutive pairs by backtracking.
    fn brute_force(h: &UnionHypergraph) -> bool {
        let n = h.vertex_count() as usize;
        fn assign(h: &UnionHypergraph, order: &[u32], i: usize, used: &mut Vec<bool>) -> bool {
            if i == order.len() {
                return true;
            }
            let (a, b) = (order[i], order[(i + 1) % order.len()]);
            for (e, edge) in h.edges().iter().enumerate() {
                if !used[e] && edge.contains(a) && edge.contains(b) {
                    used[e] = true;
                    if assign(h, order, i + 1, used) {
                        return true;
                    }
                    used[e] = false;
                }
            }
            false
        }
        fn permute(h: &UnionHypergraph, order: &mut Vec<u32>, k: usize) -> bool {
            if k == order.len() {
                return assign(h, order, 0, &mut vec![false; h.edges().len()]);
            }
            for i in k..order.len() {
                order.swap(k, i);
                if permute(h, order, k + 1) {
                    return true;
                }
                order.swap(k, i);
            }
            false
        }
        let mut order: Vec<u32> = (0..n as u32).collect();
        n > 0 && permute(h, &mut order, 1)
    }

    #[test]
    fn edgeless_has_no_cycle() {
        let h = UnionHypergraph::from_edges(4, vec![]);
        assert_eq!(
            has_hamilton_berge_cycle(&h, SearchBudget::unlimited()),
            BergeOutcome::NoCycle
        );
    }

    #[test]
    fn tiny_cycle() {
        let h = UnionHypergraph::from_edges(
            4,
            vec![
                Edge::new([0, 1, 3]),
                Edge::new([1, 2, 3]),
                Edge::new([0, 2, 3]),
                Edge::new([0, 1, 2]),
            ],
        );
        match has_hamilton_berge_cycle(&h, SearchBudget::unlimited()) {
            BergeOutcome::Found(c) => assert!(c.is_hamiltonian_in(&h)),
            other => panic!("expected a cycle, got {other:?}"),
        }
    }

    #[test]
    fn single_edge_cannot_close() {
        let h = UnionHypergraph::from_edges(3, vec![Edge::new([0, 1, 2])]);
        assert_eq!(
            has_hamilton_berge_cycle(&h, SearchBudget::unlimited()),
            BergeOutcome::NoCycle
        );
    }

    #[test]
    fn agrees_with_brute_force_on_random_hypergraphs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut found = 0;
        for _ in 0..400 {
            let n = rng.gen_range(3..=7u32);
            let m = rng.gen_range(n - 1..=n + 2);
            let edges = (0..m)
                .map(|_| {
                    let picked = rand::seq::index::sample(&mut rng, n as usize, 3);
                    Edge::new([picked.index(0) as u32, picked.index(1) as u32, picked.index(2) as u32])
                })
                .collect();
            let h = UnionHypergraph::from_edges(n, edges);
            let fast = has_hamilton_berge_cycle(&h, SearchBudget::unlimited());
            assert_eq!(fast.is_found(), brute_force(&h), "{h:?}");
            if let BergeOutcome::Found(c) = fast {
                assert!(c.is_hamiltonian_in(&h));
                found += 1;
            }
        }
        assert!(
            found > 20 && found < 380,
            "sample should mix both outcomes, got {found}"
        );
    }

    #[test]
    fn every_q5_triple_is_hamiltonian() {
        let fam = Factorisation::with_order(5).unwrap();
        let k = fam.len();
        for a in 0..k {
            for b in a + 1..k {
                for c in b + 1..k {
                    let h = union(&[fam.factor(a), fam.factor(b), fam.factor(c)]).unwrap();
                    assert!(brute_force(&h));
                    match has_hamilton_berge_cycle(&h, SearchBudget::unlimited()) {
                        BergeOutcome::Found(cyc) => assert!(cyc.is_hamiltonian_in(&h)),
                        other => panic!("triple {a} {b} {c}: {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn disconnected_triple_over_gf125() {
        let fam = Factorisation::with_order(125).unwrap();
        let f = fam.field();
        let pick = |a| {
            fam.index_of(crate::projective::Label::new(f.constant(a), f.constant(0)))
                .unwrap()
        };
        let h = union(&[fam.factor(pick(1)), fam.factor(pick(2)), fam.factor(pick(3))]).unwrap();
        assert!(!h.is_connected());
        assert_eq!(
            has_hamilton_berge_cycle(&h, SearchBudget::default()),
            BergeOutcome::NoCycle
        );
    }

    #[test]
    fn replay_rejects_broken_cycles() {
        let h = UnionHypergraph::from_edges(
            3,
            vec![Edge::new([0, 1, 2]), Edge::new([0, 1, 2]), Edge::new([0, 1, 2])],
        );
        let good = BergeCycle {
            vertices: vec![0, 1, 2],
            edges: vec![0, 1, 2],
        };
        assert!(good.is_hamiltonian_in(&h));
        let reused = BergeCycle {
            vertices: vec![0, 1, 2],
            edges: vec![0, 0, 2],
        };
        assert!(!reused.is_hamiltonian_in(&h));
    }
}
