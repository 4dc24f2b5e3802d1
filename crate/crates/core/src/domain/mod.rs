//! Domains bounded by hyperbola-branch hypersurfaces and their verification.

mod factor;
mod nc;
mod spec;

pub use factor::{Corner, FactorDomain, FactorKind, Interval};
pub use nc::{check_nc, deficient_kinds, ConditionReport, NcConfig, NcReport, RankEntry, Status};
pub use spec::{build_domain, BuildOptions, CornerRecord, DomainSpec, Label, Mode, SliceEntry};
