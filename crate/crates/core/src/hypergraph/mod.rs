//! Unions of two or three one-factors and the structural questions asked of
//! them: connectivity, pair overlap, isomorphism and Hamilton Berge cycles.

mod berge;
mod dsu;
mod isomorphism;
mod overlap;

pub use berge::{has_hamilton_berge_cycle, BergeCycle, BergeOutcome, SearchBudget};
pub use dsu::DisjointSets;
pub use isomorphism::{invariants, is_isomorphic, UnionInvariants};
pub use overlap::{overlap_algebraic, pair_overlap, OverlapResult};

use thiserror::Error;

use crate::factorisation::{Edge, OneFactor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("the same factor appears twice")]
    DuplicateFactor,
    #[error("a union needs 2 or 3 factors, got {0}")]
    FactorCount(usize),
    #[error("factors cover different vertex sets")]
    SizeMismatch,
    #[error("pair overlap needs two distinct factors")]
    SameFactor,
    #[error("label names the base factor F_(1,0)")]
    IsBaseFactor,
    #[error("alpha must be nonzero")]
    AlphaZero,
}

/// A 3-uniform hypergraph on `0..n` with per-vertex incidence lists.
///
/// Each edge carries the index of the factor it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionHypergraph {
    n: u32,
    edges: Vec<Edge>,
    source: Vec<usize>,
    incidence: Vec<Vec<u32>>,
}

impl UnionHypergraph {
    /// Hypergraph on `n` vertices with the given edges, all tagged source 0.
    pub fn from_edges(n: u32, edges: Vec<Edge>) -> Self {
        let source = vec![0; edges.len()];
        Self::assemble(n, edges, source)
    }

    fn assemble(n: u32, edges: Vec<Edge>, source: Vec<usize>) -> Self {
        let mut incidence = vec![Vec::new(); n as usize];
        for (i, e) in edges.iter().enumerate() {
            for v in e.vertices() {
                incidence[v as usize].push(i as u32);
            }
        }
        UnionHypergraph {
            n,
            edges,
            source,
            incidence,
        }
    }

    pub fn vertex_count(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_source(&self, i: usize) -> usize {
        self.source[i]
    }

    pub fn incident(&self, v: u32) -> &[u32] {
        &self.incidence[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.incidence[v as usize].len()
    }

    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut d = DisjointSets::new(self.n as usize);
        for e in &self.edges {
            let [a, b, c] = e.vertices();
            d.union(a, b);
            d.union(a, c);
        }
        d.blocks()
    }

    pub fn is_connected(&self) -> bool {
        let mut d = DisjointSets::new(self.n as usize);
        for e in &self.edges {
            let [a, b, c] = e.vertices();
            d.union(a, b);
            d.union(a, c);
            if d.components() == 1 {
                return true;
            }
        }
        d.components() <= 1
    }
}

/// Union of 2 or 3 distinct one-factors on the same point set.
pub fn union(factors: &[&OneFactor]) -> Result<UnionHypergraph, HypergraphError> {
    if !(2..=3).contains(&factors.len()) {
        return Err(HypergraphError::FactorCount(factors.len()));
    }
    let n = vertex_count_of(factors[0]);
    for (i, a) in factors.iter().enumerate() {
        if vertex_count_of(a) != n {
            return Err(HypergraphError::SizeMismatch);
        }
        if factors[..i].iter().any(|b| b.same_edges(a)) {
            return Err(HypergraphError::DuplicateFactor);
        }
    }
    let mut edges = Vec::new();
    let mut source = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        edges.extend_from_slice(f.edges());
        source.extend(std::iter::repeat_n(i, f.edges().len()));
    }
    Ok(UnionHypergraph::assemble(n, edges, source))
}

fn vertex_count_of(f: &OneFactor) -> u32 {
    f.edges().len() as u32 * 3
}

/// Connectivity of the union of two factors without materialising it.
pub fn pair_connected(a: &OneFactor, b: &OneFactor, n: u32) -> bool {
    factors_connected(&[a, b], n)
}

/// Connectivity of the union of any factors, by union-find over their edges.
pub fn factors_connected(factors: &[&OneFactor], n: u32) -> bool {
    let mut d = DisjointSets::new(n as usize);
    for f in factors {
        for e in f.edges() {
            let [a, b, c] = e.vertices();
            d.union(a, b);
            d.union(a, c);
        }
    }
    d.components() == 1
}
