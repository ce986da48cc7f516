//! Irreversible k-conversion sets: the threshold process, an exhaustive
//! solver, the polynomial algorithm for maximum degree 3 built on linear
//! 2-polymatroids, the 3-SAT reduction for maximum degree 4, and seed
//! constructions on toroidal grids.

pub mod deg3;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod percolation;
pub mod polymatroid;
pub mod satred;
pub mod torus;
