//! Polynomials, hyperbola branches and branch intersection.

mod branch;
mod polynomial;

pub use branch::{intersect_branches, Bound, Branch, BranchPoint, HypersurfaceSpec, OpenInterval, Side, Sigma};
pub use polynomial::{Monomial, Polynomial};
