//! Variational solver for the radial Kirchhoff problem with two weighted
//! critical terms on the unit ball of ℝ³:
//!
//! `−(a + b‖∇u‖²)Δu = |x|^{α₁}|u|^{4+2α₁}u + μ|x|^{α₂}|u|^{4+2α₂}u + λ|x|^β|u|^{q−2}u`, `u = 0` on `∂B`.
//!
//! Radial profiles live on a graded P1 grid ([`radial`]). The energy and its
//! gradient are in [`functional`]; ground states come from Nehari-constrained
//! descent ([`ground_state`]) and are cross-checked against a path-deformation
//! mountain-pass solver ([`mountain_pass`]). Closed-form constants and
//! compactness levels are in [`extremals`] and [`thresholds`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assumptions;
pub mod error;
pub mod extremals;
pub mod functional;
pub mod ground_state;
pub mod mountain_pass;
pub mod nehari;
pub mod params;
pub mod quadrature;
pub mod radial;
pub mod root;
pub mod special;
pub mod sweep;
pub mod thresholds;

pub use assumptions::{check_assumptions, AssumptionCheck, AssumptionReport, Regime};
pub use error::{Error, Result};
pub use extremals::{
    best_constant, cutoff_asymptotics, estimate_embedding_constant, interpolation_params,
    rayleigh_quotient, t_epsilon_bounds, verify_extremal_pde, AsymptoticsReport, CutoffFamily,
    ExtremalProfile, InterpolationParams,
};
pub use functional::{energy, pairing, riesz_gradient, EnergyBreakdown, FiberIntegrals, Functional};
pub use ground_state::{ground_state_search, GroundStateResult, InitProfile, SearchOptions};
pub use mountain_pass::{
    mountain_pass_search, verify_mp_geometry, GeometryReport, MountainPassOptions,
    MountainPassResult,
};
pub use nehari::{project_nehari, FiberMap, NehariResult};
pub use params::{critical_exponent, NonlinearityModel, ProblemParams};
pub use radial::{
    h1_inner, h1_norm_sq, lp_weighted_norm, make_grid, weighted_integral, GridSpec,
    RadialFunction, RadialGrid, OMEGA3,
};
pub use sweep::{lambda_sweep, SweepReport, SweepRow};
pub use thresholds::{
    compare_report, solve_nu_roots, threshold_double_positive, threshold_for, threshold_single,
    Comparison, ThresholdReport,
};
