//! Construction and verification of the 1-factorisations of the complete
//! 3-uniform hypergraph on PG(1,q) whose factors are the orbit partitions of
//! the order-3 conjugates of `x -> 1/(1-x)`.

pub mod cli;
pub mod factorisation;
pub mod field;
pub mod group;
pub mod hypergraph;
pub mod projective;
pub mod verifier;
