use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::{HypergraphError, UnionHypergraph};

/// Isomorphism-invariant summary of a union hypergraph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnionInvariants {
    pub vertices: u32,
    pub edges: usize,
    pub degree_sequence: Vec<usize>,
    /// Vertex pairs lying together in two or more edges.
    pub repeated_pairs: usize,
    pub component_sizes: Vec<usize>,
}

pub fn invariants(h: &UnionHypergraph) -> UnionInvariants {
    let n = h.vertex_count();
    let pd = pair_degrees(h);
    let repeated_pairs = (0..n as usize)
        .flat_map(|i| (i + 1..n as usize).map(move |j| (i, j)))
        .filter(|&(i, j)| pd[i * n as usize + j] >= 2)
        .count();
    let mut degree_sequence: Vec<usize> = (0..n).map(|v| h.degree(v)).collect();
    degree_sequence.sort_unstable();
    let mut component_sizes: Vec<usize> = h.components().iter().map(|c| c.len()).collect();
    component_sizes.sort_unstable();
    UnionInvariants {
        vertices: n,
        edges: h.edges().len(),
        degree_sequence,
        repeated_pairs,
        component_sizes,
    }
}

fn pair_degrees(h: &UnionHypergraph) -> Vec<u8> {
    let n = h.vertex_count() as usize;
    let mut pd = vec![0u8; n * n];
    for e in h.edges() {
        for (a, b) in e.pairs() {
            let (a, b) = (a as usize, b as usize);
            pd[a * n + b] += 1;
            pd[b * n + a] += 1;
        }
    }
    pd
}

/// Per-vertex refinement key: degree, component size and the sorted
/// nonzero pair degrees to other vertices.
fn signatures(h: &UnionHypergraph, pd: &[u8]) -> Vec<(usize, usize, Vec<u8>)> {
    let n = h.vertex_count() as usize;
    let mut comp_size = vec![0usize; n];
    for c in h.components() {
        for &v in &c {
            comp_size[v as usize] = c.len();
        }
    }
    (0..n)
        .map(|v| {
            let mut profile: Vec<u8> = pd[v * n..(v + 1) * n].iter().copied().filter(|&d| d > 0).collect();
            profile.sort_unstable();
            (h.degree(v as u32), comp_size[v], profile)
        })
        .collect()
}

/// Searches for a vertex bijection `phi` with `phi(E1) = E2`.
///
/// Backtracking over vertices of `h1` in breadth-first order, pruned by the
/// vertex signatures and by pair degrees between already-mapped vertices.
/// Returns `phi` as a vector indexed by vertices of `h1`.
pub fn is_isomorphic(h1: &UnionHypergraph, h2: &UnionHypergraph) -> Result<Option<Vec<u32>>, HypergraphError> {
    if h1.vertex_count() != h2.vertex_count() {
        return Err(HypergraphError::SizeMismatch);
    }
    let n = h1.vertex_count() as usize;
    if h1.edges().len() != h2.edges().len() {
        return Ok(None);
    }
    let (pd1, pd2) = (pair_degrees(h1), pair_degrees(h2));
    let (sig1, sig2) = (signatures(h1, &pd1), signatures(h2, &pd2));
    let (mut s1, mut s2) = (sig1.clone(), sig2.clone());
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return Ok(None);
    }

    let order = search_order(h1);
    let mut position = vec![0usize; n];
    for (k, &v) in order.iter().enumerate() {
        position[v as usize] = k;
    }
    // Edges of h1 whose last vertex in search order sits at each position.
    let mut completes: Vec<Vec<[u32; 3]>> = vec![Vec::new(); n];
    for e in h1.edges() {
        let vs = e.vertices();
        let last = vs.iter().map(|&v| position[v as usize]).max().unwrap();
        completes[last].push(vs);
    }
    let targets: HashSet<[u32; 3]> = h2.edges().iter().map(|e| e.vertices()).collect();

    let mut state = Search {
        n,
        order: &order,
        pd1: &pd1,
        pd2: &pd2,
        sig1: &sig1,
        sig2: &sig2,
        completes: &completes,
        targets: &targets,
        phi: vec![u32::MAX; n],
        used: vec![false; n],
    };
    Ok(state.extend(0).then_some(state.phi))
}

fn search_order(h: &UnionHypergraph) -> Vec<u32> {
    let n = h.vertex_count() as usize;
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start as u32]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &ei in h.incident(v) {
                for w in h.edges()[ei as usize].vertices() {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    order
}

struct Search<'a> {
    n: usize,
    order: &'a [u32],
    pd1: &'a [u8],
    pd2: &'a [u8],
    sig1: &'a [(usize, usize, Vec<u8>)],
    sig2: &'a [(usize, usize, Vec<u8>)],
    completes: &'a [Vec<[u32; 3]>],
    targets: &'a HashSet<[u32; 3]>,
    phi: Vec<u32>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn extend(&mut self, k: usize) -> bool {
        if k == self.n {
            return true;
        }
        let v = self.order[k] as usize;
        for w in 0..self.n {
            if self.used[w] || self.sig1[v] != self.sig2[w] || !self.consistent(k, v, w) {
                continue;
            }
            self.phi[v] = w as u32;
            self.used[w] = true;
            if self.edges_hold(k) && self.extend(k + 1) {
                return true;
            }
            self.used[w] = false;
            self.phi[v] = u32::MAX;
        }
        false
    }

    fn consistent(&self, k: usize, v: usize, w: usize) -> bool {
        let n = self.n;
        self.order[..k].iter().all(|&u| {
            let u = u as usize;
            let pu = self.phi[u] as usize;
            self.pd1[v * n + u] == self.pd2[w * n + pu]
        })
    }

    fn edges_hold(&self, k: usize) -> bool {
        self.completes[k].iter().all(|vs| {
            let mut image = vs.map(|v| self.phi[v as usize]);
            image.sort_unstable();
            self.targets.contains(&image)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorisation::{Edge, Factorisation};
    use crate::hypergraph::union;

    fn replay(h1: &UnionHypergraph, h2: &UnionHypergraph, phi: &[u32]) -> bool {
        let mut seen = phi.to_vec();
        seen.sort_unstable();
        seen.dedup();
        let targets: HashSet<_> = h2.edges().iter().map(|e| e.vertices()).collect();
        seen.len() == phi.len()
            && h1.edges().iter().all(|e| {
                let mut img = e.vertices().map(|v| phi[v as usize]);
                img.sort_unstable();
                targets.contains(&img)
            })
    }

    #[test]
    fn self_isomorphism() {
        let fam = Factorisation::with_order(8).unwrap();
        let h = union(&[fam.factor(0), fam.factor(5)]).unwrap();
        let phi = is_isomorphic(&h, &h).unwrap().unwrap();
        assert!(replay(&h, &h, &phi));
    }

    #[test]
    fn all_q5_unions_are_isomorphic() {
        let fam = Factorisation::with_order(5).unwrap();
        let reference = union(&[fam.factor(0), fam.factor(1)]).unwrap();
        for i in 0..fam.len() {
            for j in i + 1..fam.len() {
                let h = union(&[fam.factor(i), fam.factor(j)]).unwrap();
                let phi = is_isomorphic(&reference, &h).unwrap().expect("isomorphic");
                assert!(replay(&reference, &h, &phi));
            }
        }
    }

    #[test]
    fn q11_has_non_isomorphic_unions() {
        let fam = Factorisation::with_order(11).unwrap();
        let f = fam.field();
        let j = fam
            .index_of(crate::projective::Label::new(f.constant(-1), f.constant(0)))
            .unwrap();
        let three = union(&[fam.factor(0), fam.factor(j)]).unwrap();
        let two = (1..fam.len())
            .map(|k| union(&[fam.factor(0), fam.factor(k)]).unwrap())
            .find(|h| invariants(h).repeated_pairs == 2)
            .expect("an overlap-2 union exists for q = 11");
        assert_eq!(invariants(&three).repeated_pairs, 3);
        assert_eq!(is_isomorphic(&three, &two).unwrap(), None);
    }

    #[test]
    fn size_mismatch_and_relabelled_copy() {
        let a = UnionHypergraph::from_edges(
            6,
            vec![Edge::new([0, 1, 2]), Edge::new([3, 4, 5]), Edge::new([0, 3, 4])],
        );
        let b = UnionHypergraph::from_edges(
            6,
            vec![Edge::new([5, 4, 3]), Edge::new([0, 1, 2]), Edge::new([5, 0, 1])],
        );
        let phi = is_isomorphic(&a, &b).unwrap().unwrap();
        assert!(replay(&a, &b, &phi));
        let c = UnionHypergraph::from_edges(7, vec![]);
        assert_eq!(is_isomorphic(&a, &c), Err(HypergraphError::SizeMismatch));
        let d = UnionHypergraph::from_edges(
            6,
            vec![Edge::new([0, 1, 2]), Edge::new([0, 1, 3]), Edge::new([0, 1, 4])],
        );
        assert_eq!(is_isomorphic(&a, &d).unwrap(), None);
    }
}
