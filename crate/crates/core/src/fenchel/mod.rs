//! Young–Fenchel conjugation.
//!
//! Two independent routes are provided. The *discrete* route samples a
//! function on a tensor grid and returns the exact maximum of `⟨x, y⟩ − f(x)`
//! over grid nodes, computed axis by axis with a linear-time convex-hull scan.
//! The *pointwise* route maximizes a concave objective directly by coordinate
//! ascent and is used wherever an accurate single value is needed.

mod discrete;
mod grid;
mod identities;
mod pointwise;

pub use discrete::{
    conjugate_1d, conjugate_nd, conjugate_nd_with, ConjugateResult,
    HullConjugate,
};
pub use grid::{log_substitute, Axis, DomainTag, SampledFunction};
pub use identities::{
    divergence_profile, entropy_sum, log_conjugate_grid, verify_entropy_identity,
    verify_entropy_inequality, verify_with_refinement, DivergenceProfile, GridConfig, IdentityKind, IdentityReport,
    ProbeSet, RefinementReport,
};
pub use pointwise::{conjugate_at, log_conjugate_at, maximize_concave, Maximum, MaximizeOptions};
