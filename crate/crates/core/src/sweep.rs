use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::extremals::plateau;
use crate::functional::Functional;
use crate::nehari::FiberMap;
use crate::params::ProblemParams;
use crate::radial::{RadialFunction, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub t: f64,
    pub fiber_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// `(b‖v₀‖⁴ / ∫|x|^{α₁}|v₀|^{6+2α₁})^{1/(2+2α₁)}`, the root without perturbation.
    pub upper_bound: f64,
    pub strictly_decreasing: bool,
    pub all_below_bound: bool,
}

/// `φ(r) r^{−k}` with the plateau cut-off; the origin node takes the value at the first node.
pub fn singular_cutoff(grid: Arc<RadialGrid>, k: f64) -> Result<RadialFunction> {
    let r1 = grid.nodes()[1];
    RadialFunction::from_fn(grid, |r| plateau(r) * r.max(r1).powf(-k))
}

/// Nehari scaling `t_λ` of `v0` for each `λ` in a strictly increasing positive list.
///
/// The direction integrals do not depend on `λ`, so they are computed once.
pub fn lambda_sweep(
    functional: &Functional,
    v0: &RadialFunction,
    lambdas: &[f64],
) -> Result<SweepReport> {
    if lambdas.is_empty() {
        return Err(invalid("no lambda values given"));
    }
    if lambdas.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(invalid("every lambda must be positive"));
    }
    if lambdas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("lambdas must be strictly increasing"));
    }
    if v0.is_zero() {
        return Err(invalid("direction must be nonzero"));
    }
    let p = *functional.params();
    let with_h = functional.with_params(ProblemParams { lambda: 1.0, ..p })?;
    let base: FiberMap = with_h.fiber(v0)?;
    let fi = base.integrals;
    let upper_bound = (p.b * fi.norm_sq * fi.norm_sq / fi.k1).powf(1.0 / (2.0 + 2.0 * p.alpha1));

    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let root = base.with_lambda(lambda).maximize()?;
        rows.push(SweepRow {
            lambda,
            t: root.t,
            fiber_energy: root.value,
        });
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].t < w[0].t);
    let all_below_bound = rows.iter().all(|r| r.t <= upper_bound);
    Ok(SweepReport {
        rows,
        upper_bound,
        strictly_decreasing,
        all_below_bound,
    })
}
