//! Linear assignment: a shortest-augmenting-path solver for rectangular
//! matrices and Murty's ranked enumeration on top of it.

mod lsap;
mod murty;

pub use lsap::{solve_rectangular, solve_rows, CostMatrix};
pub use murty::{murty, RankedAssignment};
