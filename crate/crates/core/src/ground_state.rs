//! Minimisation of `Φ` over the Nehari manifold by projected H¹ gradient descent.

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::extremals::CutoffFamily;
use crate::functional::Functional;
use crate::params::ProblemParams;
use crate::radial::{h1_inner, h1_norm_sq, RadialFunction, RadialGrid};

/// Armijo sufficient-decrease constant.
pub const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;
const DIVERGENCE_RUN: usize = 20;
const NOISE_ULPS: f64 = 512.0;
const NOISE_TRIALS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchOptions {
    pub max_iters: usize,
    /// Initial trial step in the H¹ metric.
    pub step: f64,
    /// Relative dual-residual tolerance: stop once `‖Φ′‖ < tol · max(1, m)`.
    pub tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_iters: 5000,
            step: 1.0,
            tol: 1e-6,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be positive"));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(invalid("step must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        Ok(())
    }
}

/// Starting profiles for the descent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InitProfile {
    /// `1 − r`, normalised in H¹.
    OneMinusR,
    /// Cut-off bubble `u_{ε,α₁}`.
    Bubble { epsilon: f64 },
    /// The cut-off bubble whose Nehari projection has the lowest energy
    /// among a log-spaced range of concentrations.
    BubbleScan,
}

impl FromStr for InitProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-minus-r" => Ok(InitProfile::OneMinusR),
            "bubble" => Ok(InitProfile::Bubble { epsilon: 0.2 }),
            "bubble-scan" => Ok(InitProfile::BubbleScan),
            other => Err(invalid(format!(
                "unknown init profile '{other}' (one-minus-r, bubble, bubble-scan)"
            ))),
        }
    }
}

impl InitProfile {
    pub fn name(&self) -> &'static str {
        match self {
            InitProfile::OneMinusR => "one-minus-r",
            InitProfile::Bubble { .. } => "bubble",
            InitProfile::BubbleScan => "bubble-scan",
        }
    }

    pub fn build(&self, functional: &Functional) -> Result<RadialFunction> {
        let grid = functional.grid().clone();
        let alpha1 = functional.params().alpha1;
        let u = match *self {
            InitProfile::OneMinusR => RadialFunction::from_fn(grid, |r| 1.0 - r)?,
            InitProfile::Bubble { epsilon } => CutoffFamily::new(epsilon, alpha1)?.on_grid(grid)?,
            InitProfile::BubbleScan => {
                let (eps, _) = scan_bubbles(functional, &grid)?;
                CutoffFamily::new(eps, alpha1)?.on_grid(grid)?
            }
        };
        Ok(u.scaled(1.0 / h1_norm_sq(&u).sqrt()))
    }
}

/// Lowest Nehari level among cut-off bubbles with `ε` from 0.5 down to a few
/// first-cell widths, 8 samples per decade. Returns `(ε, level)`.
pub fn scan_bubbles(functional: &Functional, grid: &Arc<RadialGrid>) -> Result<(f64, f64)> {
    let alpha1 = functional.params().alpha1;
    let eps_min = (grid.nodes()[1] * 20.0).max(1e-6);
    let eps_max = 0.5;
    let count = ((eps_max / eps_min).log10() * 8.0).ceil() as usize + 1;
    let mut best = (eps_max, f64::INFINITY);
    for i in 0..count {
        let eps = eps_max * (eps_min / eps_max).powf(i as f64 / (count - 1) as f64);
        let u = CutoffFamily::new(eps, alpha1)?.on_grid(grid.clone())?;
        if let Ok(res) = functional.project(&u) {
            if res.fiber_energy < best.1 {
                best = (eps, res.fiber_energy);
            }
        }
    }
    if best.1.is_finite() {
        Ok(best)
    } else {
        Err(Error::NoRoot { lo: eps_min, hi: eps_max })
    }
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub minimizer: RadialFunction,
    pub level_m: f64,
    /// `‖Φ′(minimizer)‖` in the dual of H¹₀.
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub params: ProblemParams,
    /// `λ = 0`: the infimum is not attained and `converged` is always false.
    pub reference_mode: bool,
    /// Nehari level after each accepted step, starting with the projected initial guess.
    pub energy_trace: Vec<f64>,
}

impl GroundStateResult {
    pub fn relative_residual(&self) -> f64 {
        self.dual_residual / self.level_m.abs().max(1.0)
    }
}

/// Nehari-constrained descent from `init`.
///
/// Each step moves against the Riesz gradient and rescales back onto the manifold;
/// the trial length comes from the Barzilai-Borwein quotient of the previous step
/// and is halved until the Armijo condition on the Nehari level holds. Once the
/// decrease Armijo asks for drops below the rounding noise of the level, steps
/// are accepted instead when they keep the level flat to within a few ulps and
/// lower the residual.
pub fn ground_state_search(
    functional: &Functional,
    init: &RadialFunction,
    opts: &SearchOptions,
) -> Result<GroundStateResult> {
    opts.validate()?;
    if init.is_zero() || h1_norm_sq(init) == 0.0 {
        return Err(invalid("initial profile must be nonzero"));
    }
    let reference_mode = functional.params().lambda == 0.0;

    let start = functional.project(init)?;
    let mut u = start.projected;
    let mut m = start.fiber_energy;
    let (mut g, mut res) = functional.gradient_and_residual(&u)?;
    let mut trace = vec![m];
    let mut step = opts.step;
    let mut iterations = 0;
    let mut converged = false;
    let mut increases = 0usize;

    for it in 1..=opts.max_iters {
        if res < opts.tol * m.abs().max(1.0) {
            converged = true;
            break;
        }
        iterations = it;
        let gsq = res * res;
        let noise = NOISE_ULPS * f64::EPSILON * m.abs().max(1.0);
        let mut accepted = None;
        let mut trial = step;
        // Armijo while the required decrease is above rounding noise
        for _ in 0..MAX_HALVINGS {
            if ARMIJO_C * trial * gsq < noise {
                break;
            }
            let v = u.combine(1.0, &g, -trial)?;
            if let Ok(pv) = functional.project(&v) {
                if pv.fiber_energy <= m - ARMIJO_C * trial * gsq {
                    accepted = Some((pv, None));
                    break;
                }
            }
            trial *= 0.5;
        }
        if accepted.is_none() {
            // level differences are unresolvable: require a flat level and a smaller residual
            let mut trial = step;
            for _ in 0..NOISE_TRIALS {
                let v = u.combine(1.0, &g, -trial)?;
                if let Ok(pv) = functional.project(&v) {
                    if pv.fiber_energy <= m + noise {
                        let (gn, rn) = functional.gradient_and_residual(&pv.projected)?;
                        if rn < res {
                            accepted = Some((pv, Some((gn, rn))));
                            break;
                        }
                    }
                }
                trial *= 0.5;
            }
        }
        let Some((pv, cached)) = accepted else {
            break;
        };
        let (gn, rn) = match cached {
            Some(x) => x,
            None => functional.gradient_and_residual(&pv.projected)?,
        };
        let s = pv.projected.combine(1.0, &u, -1.0)?;
        let y = gn.combine(1.0, &g, -1.0)?;
        let sy = h1_inner(&s, &y)?;
        let ss = h1_norm_sq(&s);
        step = if sy > 0.0 && ss > 0.0 {
            ss / sy
        } else {
            2.0 * trial
        };

        if pv.fiber_energy > m {
            increases += 1;
            if increases >= DIVERGENCE_RUN {
                return Err(Error::NonConvergence {
                    iterations: it,
                    reason: "energy increased on 20 consecutive steps".into(),
                    trace,
                });
            }
        } else {
            increases = 0;
        }
        u = pv.projected;
        m = pv.fiber_energy;
        g = gn;
        res = rn;
        trace.push(m);
    }
    if !converged && res < opts.tol * m.abs().max(1.0) {
        converged = true;
    }

    Ok(GroundStateResult {
        minimizer: u,
        level_m: m,
        dual_residual: res,
        iterations,
        converged: converged && !reference_mode,
        params: *functional.params(),
        reference_mode,
        energy_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::NonlinearityModel;
    use crate::radial::make_grid;

    fn functional(n: usize, lambda: f64, a: f64) -> Functional {
        let p = ProblemParams {
            a,
            b: 1.0,
            mu: 0.0,
            lambda,
            alpha1: 0.0,
            alpha2: -0.5,
            beta: 0.0,
        };
        Functional::new(make_grid(n, 2.0).unwrap(), p, NonlinearityModel::new(5.0).unwrap())
            .unwrap()
    }

    #[test]
    fn zero_init_rejected() {
        let f = functional(64, 1.0, 0.0);
        let z = RadialFunction::zeros(f.grid().clone());
        let e = ground_state_search(&f, &z, &SearchOptions::default()).unwrap_err();
        assert!(matches!(e, Error::InvalidArgument(_)));
    }

    #[test]
    fn init_names() {
        assert_eq!("bubble".parse::<InitProfile>().unwrap(), InitProfile::Bubble { epsilon: 0.2 });
        assert!("sphere".parse::<InitProfile>().is_err());
        let f = functional(128, 1.0, 0.0);
        for p in [InitProfile::OneMinusR, InitProfile::Bubble { epsilon: 0.2 }, InitProfile::BubbleScan] {
            let u = p.build(&f).unwrap();
            assert!((h1_norm_sq(&u) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn descent_is_monotone_and_converges_with_large_lambda() {
        let f = functional(256, 100.0, 1.0);
        let init = InitProfile::OneMinusR.build(&f).unwrap();
        let res = ground_state_search(&f, &init, &SearchOptions::default()).unwrap();
        assert!(res.converged, "{} {}", res.dual_residual, res.iterations);
        for w in res.energy_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs());
        }
        assert!(res.level_m > 0.0);
    }

    #[test]
    fn reference_mode_never_converges() {
        let f = functional(128, 0.0, 0.0);
        let init = InitProfile::Bubble { epsilon: 0.2 }.build(&f).unwrap();
        let opts = SearchOptions {
            max_iters: 50,
            ..Default::default()
        };
        let res = ground_state_search(&f, &init, &opts).unwrap();
        assert!(!res.converged);
        assert!(res.reference_mode);
    }
}
