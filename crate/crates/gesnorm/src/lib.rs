//! Generalized expected-shortfall (GES) norms and the tooling built on them.
//!
//! A distortion function `g` (nondecreasing on `[0,1]` with `g(0) = 0` and
//! `g(1) = 1`) induces a family of norms on `R^n` indexed by a level
//! `alpha`. The scaled member is
//!
//! ```text
//! <<x>>_alpha = min_t { t + (1/(1-alpha)) * sum_i c_i * max(|x|_(i) - t, 0) }
//! ```
//!
//! where `|x|_(1) <= ... <= |x|_(n)` are the sorted magnitudes and
//! `c_i = g(i/n) - g((i-1)/n)`. The non-scaled member is `n * (1-alpha)`
//! times the scaled one. For `g(u) = u` these reduce to the expected-
//! shortfall (CVaR) functional of the magnitudes.
//!
//! The crate provides:
//!
//! * [`distortion`]: distortion functions and their duals;
//! * [`norm`]: weight extraction, scaled/non-scaled norm evaluation by the
//!   closed-form breakpoint representation and by the defining minimization,
//!   alpha profiles, and unit-disk boundaries;
//! * [`owl`]: ordered weighted L1 (OWL) norms, their duals, the OWL view of
//!   GES norms, and an LP oracle for cross-checking;
//! * [`simplex`]: a dense two-phase primal simplex solver;
//! * [`projection`]: norm-projection onto polyhedra by a single LP (convex
//!   distortions), by exhaustive sort enumeration, and by an exact
//!   branch-and-bound over sort assignments (any distortion);
//! * [`instance`]: reproducible random projection instances and alpha sweeps;
//! * [`anomaly`]: rolling-window anomaly detection on return series with a
//!   GES-norm rule and three reference detectors (modified Z-score,
//!   peaks-over-threshold, isolation forest), plus overlap tabulation.

pub mod anomaly;
pub mod distortion;
pub mod instance;
pub mod norm;
pub mod owl;
pub mod projection;
pub mod rng;
pub mod simplex;

pub use distortion::{Distortion, DistortionKind};
pub use instance::{alpha_sweep, generate_instance, ProjectionInstance, SweepRow};
pub use norm::{
    alpha_profile, nonscaled_ges_norm, scaled_ges_norm, scaled_ges_norm_oracle,
    unit_disk_boundary, BoundaryPoint, NormError, NormQuery, NormWeights, ProfilePoint,
};
pub use owl::{dual_via_lp_oracle, ges_dual_norm, ges_owl_weights, owl_dual, owl_norm, OwlWeights};
pub use projection::{
    project_enumerate, project_lp, project_milp, MilpModel, MilpOptions, MilpProjection,
    Polyhedron, ProjError, Projection,
};
pub use rng::SplitMix64;
pub use simplex::{lp_solve, LpError, LpProblem, LpSolution, LpStatus};
