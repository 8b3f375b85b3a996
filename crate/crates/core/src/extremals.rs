//! Best constants of the weighted Sobolev inequality
//! `‖∇u‖² ≥ S_α (∫|x|^α |u|^{6+2α})^{2/(6+2α)}` in ℝ³, their extremal bubbles
//! `U_{ε,α}` and the cut-off test functions built from them.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::functional::Functional;
use crate::params::{critical_exponent, NonlinearityModel, ProblemParams};
use crate::quadrature::{composite, geometric_breaks};
use crate::radial::{
    h1_norm_sq, lp_weighted_norm, make_grid, weighted_integral_fn, RadialFunction, RadialGrid,
    OMEGA3,
};
use crate::special::{beta, ln_gamma};
use crate::thresholds::threshold_for;

/// `S_α`, closed form. Requires `α > −2`.
pub fn best_constant(alpha: f64) -> Result<f64> {
    if !(alpha > -2.0) || !alpha.is_finite() {
        return Err(invalid(format!("alpha must exceed -2, got {alpha}")));
    }
    let k = 2.0 + alpha;
    let m = 3.0 + alpha;
    // Γ(2m/k) overflows once α is within about 0.01 of -2, so work with logarithms
    let ln_inner = (OMEGA3 / k).ln() + 2.0 * ln_gamma(m / k) - ln_gamma(2.0 * m / k);
    Ok(m * (k / m * ln_inner).exp())
}

/// The bubble `U_{ε,α}(r) = c ε^{1/2} (ε^{2+α} + r^{2+α})^{-1/(2+α)}`, `c = (3+α)^{1/(4+2α)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalProfile {
    pub epsilon: f64,
    pub alpha: f64,
}

impl ExtremalProfile {
    pub fn new(epsilon: f64, alpha: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(alpha > -2.0) {
            return Err(invalid(format!("alpha must exceed -2, got {alpha}")));
        }
        Ok(ExtremalProfile { epsilon, alpha })
    }

    fn k(&self) -> f64 {
        2.0 + self.alpha
    }

    pub fn amplitude(&self) -> f64 {
        (3.0 + self.alpha).powf(1.0 / (4.0 + 2.0 * self.alpha))
    }

    pub fn eval(&self, r: f64) -> f64 {
        let k = self.k();
        let d = self.epsilon.powf(k) + r.powf(k);
        self.amplitude() * self.epsilon.sqrt() * d.powf(-1.0 / k)
    }

    /// `U′(r)`.
    pub fn derivative(&self, r: f64) -> f64 {
        let k = self.k();
        let d = self.epsilon.powf(k) + r.powf(k);
        -self.amplitude() * self.epsilon.sqrt() * r.powf(k - 1.0) * d.powf(-1.0 / k - 1.0)
    }
}

/// Smooth plateau: 1 on `[0, 1/3]`, 0 on `[2/3, ∞)`, quintic smoothstep between.
pub fn plateau(r: f64) -> f64 {
    if r <= 1.0 / 3.0 {
        1.0
    } else if r >= 2.0 / 3.0 {
        0.0
    } else {
        let s = 3.0 * r - 1.0;
        1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

pub fn plateau_derivative(r: f64) -> f64 {
    if r <= 1.0 / 3.0 || r >= 2.0 / 3.0 {
        0.0
    } else {
        let s = 3.0 * r - 1.0;
        -3.0 * 30.0 * s * s * (1.0 - s) * (1.0 - s)
    }
}

/// `u_{ε,α} = plateau · U_{ε,α}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffFamily {
    pub epsilon: f64,
    pub alpha: f64,
}

impl CutoffFamily {
    pub fn new(epsilon: f64, alpha: f64) -> Result<Self> {
        ExtremalProfile::new(epsilon, alpha)?;
        Ok(CutoffFamily { epsilon, alpha })
    }

    fn bubble(&self) -> ExtremalProfile {
        ExtremalProfile {
            epsilon: self.epsilon,
            alpha: self.alpha,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let p = plateau(r);
        if p == 0.0 {
            0.0
        } else {
            p * self.bubble().eval(r)
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let b = self.bubble();
        plateau_derivative(r) * b.eval(r) + plateau(r) * b.derivative(r)
    }

    /// Nodal interpolant on `grid`.
    pub fn on_grid(&self, grid: Arc<RadialGrid>) -> Result<RadialFunction> {
        RadialFunction::from_fn(grid, |r| self.eval(r))
    }
}

/// Quadrature estimate of the Rayleigh quotient of a bubble over ℝ³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighEstimate {
    /// Quotient over the whole space: ball of radius `R` plus the tail.
    pub quotient: f64,
    /// Quotient with both integrals truncated at `R`.
    pub truncated: f64,
    /// Analytic bound `ω₃ c² ε / R` on the gradient mass outside `R`.
    pub tail_bound: f64,
}

/// `‖∇U‖² / (∫|x|^α U^{6+2α})^{2/(6+2α)}` for `U = U_{ε,α}` on ℝ³.
///
/// The ball `|x| < R` uses geometric Gauss panels (`per_decade` per decade);
/// the exterior is mapped onto `(0, 1]` by `r = R/s`.
pub fn rayleigh_quotient(
    alpha: f64,
    epsilon: f64,
    r_truncate: f64,
    per_decade: usize,
) -> Result<RayleighEstimate> {
    if !(r_truncate >= 10.0) {
        return Err(invalid(format!("R must be at least 10, got {r_truncate}")));
    }
    if per_decade == 0 {
        return Err(invalid("per_decade must be positive"));
    }
    let u = ExtremalProfile::new(epsilon, alpha)?;
    let p = critical_exponent(alpha);
    let grad = |r: f64| {
        let d = u.derivative(r);
        OMEGA3 * r * r * d * d
    };
    let crit = |r: f64| OMEGA3 * r.powf(2.0 + alpha) * u.eval(r).powf(p);

    let lo = epsilon * 1e-8;
    let breaks = geometric_breaks(lo, r_truncate, per_decade);
    let g_in = composite(&breaks, 16, grad);
    let c_in = composite(&breaks, 16, crit);

    // ∫_R^∞ f(r) dr = ∫_0^1 f(R/s) R/s² ds
    let tail_breaks = geometric_breaks(1e-12, 1.0, per_decade);
    let map = |f: &dyn Fn(f64) -> f64, s: f64| {
        if s == 0.0 {
            0.0
        } else {
            let r = r_truncate / s;
            f(r) * r_truncate / (s * s)
        }
    };
    let g_out = composite(&tail_breaks, 16, |s| map(&grad, s));
    let c_out = composite(&tail_breaks, 16, |s| map(&crit, s));

    let q = |g: f64, c: f64| g / c.powf(2.0 / p);
    let amp = u.amplitude();
    Ok(RayleighEstimate {
        quotient: q(g_in + g_out, c_in + c_out),
        truncated: q(g_in, c_in),
        tail_bound: OMEGA3 * amp * amp * epsilon / r_truncate,
    })
}

/// Max relative residual of `−ΔU = r^α U^{5+2α}` for `U = U_{1,α}` at the given radii.
///
/// The flux `r²U′` is differentiated with a sixth-order central stencil. It tends
/// to `−c` at infinity, so for `r ≥ 1` the stencil is applied to `r²U′ + c`,
/// evaluated without cancellation, to keep rounding below the fast-decaying right side.
pub fn verify_extremal_pde(alpha: f64, radii: &[f64]) -> Result<f64> {
    let u = ExtremalProfile::new(1.0, alpha)?;
    let k = u.k();
    let c = u.amplitude();
    let flux = |r: f64| r * r * u.derivative(r);
    let shifted = |r: f64| -c * (-(k + 1.0) / k * r.powf(-k).ln_1p()).exp_m1();
    let mut worst: f64 = 0.0;
    for &r in radii {
        if !(1e-2..=1e2).contains(&r) {
            return Err(invalid(format!("radius {r} outside [1e-2, 1e2]")));
        }
        let h = 2e-3 * r;
        let flux = |x: f64| if r >= 1.0 { shifted(x) } else { flux(x) };
        let d = (45.0 * (flux(r + h) - flux(r - h)) - 9.0 * (flux(r + 2.0 * h) - flux(r - 2.0 * h))
            + (flux(r + 3.0 * h) - flux(r - 3.0 * h)))
            / (60.0 * h);
        let lap = d / (r * r);
        let rhs = r.powf(alpha) * u.eval(r).powf(5.0 + 2.0 * alpha);
        worst = worst.max((-lap - rhs).abs() / rhs.abs());
    }
    Ok(worst)
}

/// Log-spaced radii in `[1e-2, 1e2]`.
pub fn default_pde_radii(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / (count.max(2) - 1) as f64))
        .collect()
}

/// `K̃ = ∫_{ℝ³} |x|^{α₂} U_{1,α₁}^{6+2α₂}`, finite when `α₂ < α₁`.
pub fn k_tilde(alpha1: f64, alpha2: f64) -> Result<f64> {
    if !(alpha1 > alpha2) || !(alpha2 > -2.0) {
        return Err(invalid("alpha1 must exceed alpha2 > -2"));
    }
    let u = ExtremalProfile::new(1.0, alpha1)?;
    let k = 2.0 + alpha1;
    let p = critical_exponent(alpha2);
    let x = (alpha2 + 3.0) / k;
    Ok(OMEGA3 * u.amplitude().powf(p) / k * beta(x, p / k - x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub epsilons: Vec<f64>,
    pub grad: Vec<f64>,
    pub crit1: Vec<f64>,
    pub crit2: Option<Vec<f64>>,
    pub limit_grad: f64,
    pub limit_crit2: Option<f64>,
    pub slope_grad: f64,
    pub slope_crit1: f64,
    pub slope_crit2: Option<f64>,
}

fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Integrals of the cut-off bubble `u_{ε,α₁}` over the unit ball and the
/// log-log slopes of their deviations from the `ε → 0` limits.
///
/// The limits of the gradient and first critical integrals are `S^{(3+α₁)/(2+α₁)}`;
/// the second critical integral tends to [`k_tilde`].
pub fn cutoff_asymptotics(
    alpha1: f64,
    alpha2: Option<f64>,
    epsilons: &[f64],
    grid: &RadialGrid,
) -> Result<AsymptoticsReport> {
    if epsilons.len() < 4 {
        return Err(invalid("at least 4 epsilons are required"));
    }
    for w in epsilons.windows(2) {
        if !(w[1] < w[0]) {
            return Err(invalid("epsilons must be strictly decreasing"));
        }
    }
    if !(epsilons[0] <= 0.2) || !(epsilons[epsilons.len() - 1] > 0.0) {
        return Err(invalid("epsilons must lie in (0, 0.2]"));
    }
    let s = best_constant(alpha1)?;
    let limit = s.powf((3.0 + alpha1) / (2.0 + alpha1));
    let p1 = critical_exponent(alpha1);
    let k_lim = match alpha2 {
        Some(a2) => Some(k_tilde(alpha1, a2)?),
        None => None,
    };

    let mut grad = Vec::new();
    let mut crit1 = Vec::new();
    let mut crit2 = Vec::new();
    for &eps in epsilons {
        let u = CutoffFamily::new(eps, alpha1)?;
        grad.push(weighted_integral_fn(grid, 2.0, |r| u.derivative(r).powi(2))?);
        crit1.push(weighted_integral_fn(grid, 2.0 + alpha1, |r| u.eval(r).powf(p1))?);
        if let Some(a2) = alpha2 {
            let p2 = critical_exponent(a2);
            crit2.push(weighted_integral_fn(grid, 2.0 + a2, |r| u.eval(r).powf(p2))?);
        }
    }
    let dev = |v: &[f64], lim: f64| v.iter().map(|x| x - lim).collect::<Vec<_>>();
    let slope_crit2 = k_lim.map(|k| loglog_slope(epsilons, &dev(&crit2, k)));
    Ok(AsymptoticsReport {
        epsilons: epsilons.to_vec(),
        slope_grad: loglog_slope(epsilons, &dev(&grad, limit)),
        slope_crit1: loglog_slope(epsilons, &dev(&crit1, limit)),
        slope_crit2,
        grad,
        crit1,
        crit2: alpha2.map(|_| crit2),
        limit_grad: limit,
        limit_crit2: k_lim,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TEpsilonEntry {
    pub epsilon: f64,
    pub t: f64,
    pub fiber_energy: f64,
    pub below_threshold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TEpsilonReport {
    pub entries: Vec<TEpsilonEntry>,
    pub threshold: f64,
    /// `[min, max]` of `t_ε`, only claimed when every ε is at most 0.2.
    pub bracket: Option<(f64, f64)>,
}

/// Nehari scaling of each cut-off bubble `u_{ε,α₁}`.
pub fn t_epsilon_bounds(
    functional: &Functional,
    epsilons: &[f64],
) -> Result<TEpsilonReport> {
    let p = functional.params();
    if !(p.lambda > 0.0) {
        return Err(invalid("lambda must be positive"));
    }
    let threshold = threshold_for(p)?.level;
    let mut entries = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let u = CutoffFamily::new(eps, p.alpha1)?.on_grid(functional.grid().clone())?;
        let res = functional.project(&u)?;
        entries.push(TEpsilonEntry {
            epsilon: eps,
            t: res.t_u,
            fiber_energy: res.fiber_energy,
            below_threshold: res.fiber_energy < threshold,
        });
    }
    let bracket = if !entries.is_empty() && epsilons.iter().all(|&e| e <= 0.2) {
        let lo = entries.iter().map(|e| e.t).fold(f64::INFINITY, f64::min);
        let hi = entries.iter().map(|e| e.t).fold(0.0, f64::max);
        Some((lo, hi))
    } else {
        None
    };
    Ok(TEpsilonReport {
        entries,
        threshold,
        bracket,
    })
}

/// Constants of the two interpolation inequalities between weighted critical norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationParams {
    pub gamma: f64,
    pub xi: f64,
    pub m_int: f64,
    pub theta: f64,
    pub delta: f64,
    pub varsigma: f64,
    pub c_tilde: f64,
    /// `S_δ`, the best constant entering the second inequality.
    pub s_delta: f64,
}

impl InterpolationParams {
    /// Right side of `‖u‖_{L^{2*(γ)}(r^γ)} ≤ C̃ ‖u‖^{1−θ} ‖u‖^θ_{L^{2*(ξ)}(r^ξ)}`.
    pub fn first_bound(&self, h1: f64, norm_xi: f64) -> f64 {
        self.c_tilde * h1.powf(1.0 - self.theta) * norm_xi.powf(self.theta)
    }

    /// Right side of `‖u‖_{L^{2*(ξ)}(r^ξ)} ≤ S_δ^{(ς−1)/2} ‖u‖^{1−ς} ‖u‖^ς_{L^{2*(γ)}(r^γ)}`.
    pub fn second_bound(&self, h1: f64, norm_gamma: f64) -> f64 {
        self.s_delta.powf(0.5 * (self.varsigma - 1.0))
            * h1.powf(1.0 - self.varsigma)
            * norm_gamma.powf(self.varsigma)
    }

    /// Both sides of both inequalities for `u`: `[(lhs1, rhs1), (lhs2, rhs2)]`.
    pub fn evaluate(&self, u: &RadialFunction) -> Result<[(f64, f64); 2]> {
        let h1 = h1_norm_sq(u).sqrt();
        let ng = lp_weighted_norm(u, critical_exponent(self.gamma), self.gamma)?;
        let nx = lp_weighted_norm(u, critical_exponent(self.xi), self.xi)?;
        Ok([
            (ng, self.first_bound(h1, nx)),
            (nx, self.second_bound(h1, ng)),
        ])
    }
}

pub fn interpolation_params(gamma_: f64, xi: f64, m_int: f64) -> Result<InterpolationParams> {
    if !(xi > -2.0) || !(gamma_ > xi) {
        return Err(invalid("need gamma > xi > -2"));
    }
    let pg = critical_exponent(gamma_);
    let px = critical_exponent(xi);
    let m_max = pg * (2.0 + xi) / (2.0 + gamma_);
    if !(m_int > 0.0 && m_int <= m_max) {
        return Err(invalid(format!("m_int must lie in (0, {m_max}], got {m_int}")));
    }
    let theta = px / pg;
    let delta = (xi * pg - gamma_ * m_int) / (pg - m_int);
    Ok(InterpolationParams {
        gamma: gamma_,
        xi,
        m_int,
        theta,
        delta,
        varsigma: m_int / px,
        c_tilde: OMEGA3.powf(0.5 * (theta - 1.0)),
        s_delta: best_constant(delta)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingEstimate {
    pub estimate: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
}

/// `inf ‖u‖² / ‖u‖²_{L^p(B; r^β)}` over the discrete radial space, by nonlinear
/// inverse iteration: `u ← K⁻¹(r^β |u|^{p−2}u)`, renormalised each step.
pub fn estimate_embedding_constant(
    p: f64,
    beta_: f64,
    grid: &Arc<RadialGrid>,
    max_iters: usize,
    tol: f64,
) -> Result<EmbeddingEstimate> {
    if !(beta_ > -2.0) {
        return Err(invalid("beta must exceed -2"));
    }
    let top = critical_exponent(beta_);
    if !(p >= 1.0 && p <= top) {
        return Err(invalid(format!("p must lie in [1, {top}], got {p}")));
    }
    let table = grid.weights(2.0 + beta_)?;
    let quotient = |u: &RadialFunction| -> Result<f64> {
        let n = grid.integrate_nodal(u.values(), &table, |x| x.abs().powf(p));
        Ok(h1_norm_sq(u) / n.powf(2.0 / p))
    };
    let mut u = RadialFunction::from_fn(grid.clone(), |r| 1.0 - r * r)?;
    u = u.scaled(1.0 / h1_norm_sq(&u).sqrt());
    let mut q = quotient(&u)?;
    let mut trace = vec![q];
    let mut iterations = 0;
    for it in 1..=max_iters {
        iterations = it;
        let mut rhs = vec![0.0; grid.node_count() + 1];
        grid.accumulate_nodal(
            u.values(),
            &table,
            1.0,
            |x| x.abs().powf(p - 2.0) * x,
            &mut rhs,
        );
        let mut next = grid.solve_stiffness(&rhs)?;
        let n = grid.node_count();
        next[n] = 0.0;
        let v = RadialFunction::from_values(grid.clone(), next)?;
        let norm = h1_norm_sq(&v).sqrt();
        if !(norm > 0.0) {
            break;
        }
        u = v.scaled(1.0 / norm);
        let q_new = quotient(&u)?;
        trace.push(q_new);
        let done = (q - q_new).abs() <= tol * q_new;
        q = q_new;
        if done {
            break;
        }
    }
    Ok(EmbeddingEstimate {
        estimate: q,
        iterations,
        trace,
    })
}

/// Default-grid convenience wrapper.
pub fn estimate_embedding_constant_default(p: f64, beta_: f64) -> Result<EmbeddingEstimate> {
    let grid = make_grid(crate::radial::DEFAULT_NODES, crate::radial::DEFAULT_GRADING)?;
    estimate_embedding_constant(p, beta_, &grid, 20_000, 1e-13)
}

/// Nehari scaling of cut-off bubbles under the reference parameters, used to
/// approach the compactness level from above.
pub fn reference_bubble_levels(
    grid: Arc<RadialGrid>,
    params: &ProblemParams,
    nl: &NonlinearityModel,
    epsilons: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let f = Functional::new(grid.clone(), *params, *nl)?;
    epsilons
        .iter()
        .map(|&eps| {
            let u = CutoffFamily::new(eps, params.alpha1)?.on_grid(grid.clone())?;
            Ok((eps, f.project(&u)?.fiber_energy))
        })
        .collect()
}
