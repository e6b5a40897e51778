//! Exact finite-group machinery for intersecting-set analysis: finite
//! fields, group enumeration, coset actions, derangement graphs, and
//! maximum-clique certificates.

pub mod action;
pub mod catalog;
pub mod ekrgraph;
pub mod finfield;
pub mod groupcore;
pub mod lattice;
pub mod linalg;
pub mod spec;
pub mod witnesses;
