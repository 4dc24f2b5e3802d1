//! Domains bounded by hyperbola-branch hypersurfaces, the real algebraic
//! manifolds that project onto them, and numerical checks of their
//! structure.
//!
//! A domain is assembled from an increasing sequence `t_1 < ... < t_l` and a
//! 0/1 label per interval `(t_j, t_{j+1})`. The first coordinate of the
//! associated manifold maps onto `[t_1, t_l]`, has singular values exactly at
//! the `t_j`, and has bounded fibres over the intervals labelled 0.
//!
//! The geometry is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`, which is also what the file formats use.

pub mod algebra;
pub mod domain;
pub mod error;
pub mod io;
pub mod linalg;
pub mod manifold;
pub mod plot;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Polynomial = algebra::Polynomial<f64>;
pub type Branch = algebra::Branch<f64>;
pub type HypersurfaceSpec = algebra::HypersurfaceSpec<f64>;
pub type FactorDomain = domain::FactorDomain<f64>;
pub type DomainSpec = domain::DomainSpec<f64>;
pub type NcConfig = domain::NcConfig<f64>;
pub type NcReport = domain::NcReport<f64>;
pub type ManifoldSystem = manifold::ManifoldSystem<f64>;
pub type PointOnM = manifold::PointOnM<f64>;
pub type FiberConfig = manifold::FiberConfig<f64>;
pub type FiberReport = manifold::FiberReport<f64>;
pub type SingularReport = manifold::SingularReport<f64>;

pub use algebra::{intersect_branches, Side, Sigma};
pub use domain::{build_domain, check_nc, BuildOptions, Label, Mode};
pub use manifold::build_system;
