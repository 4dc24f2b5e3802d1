//! The sphere-bundle system over a domain, sampling, rank tests and fibre
//! analysis.

mod analysis;
mod components;
mod system;

pub use analysis::{CornerCheck, FiberConfig, FiberReport, SingularReport};
pub use components::{epsilon_components, Clustering};
pub use system::{build_system, ManifoldSystem, PointOnM, DEFAULT_BLOCK};
