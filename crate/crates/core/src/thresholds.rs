use serde::{Deserialize, Serialize};

use crate::assumptions::Regime;
use crate::error::{invalid, Result};
use crate::extremals::{best_constant, interpolation_params};
use crate::ground_state::GroundStateResult;
use crate::params::ProblemParams;

/// Compactness level of one regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub regime: Regime,
    pub level: f64,
    pub a_term: f64,
    pub b_term: f64,
    pub nu_bar: Option<f64>,
    pub nu_tilde: Option<f64>,
    /// Parameters the level was computed for, before any `μ` normalisation.
    pub params: Option<ProblemParams>,
    pub alpha1: f64,
    pub alpha2: Option<f64>,
    pub a: f64,
    pub b: f64,
    /// Scale factor `μ^{p₁/(p₁−p₂)}` applied when `μ ≠ 1` in the positive regime.
    pub mu_scaling: Option<f64>,
}

/// Level for a single effective critical term (`μ ≤ 0`):
/// `(2+α)/(2(3+α)) (aS)^{(3+α)/(2+α)} + (1+α)/(4(3+α)) b^{(3+α)/(1+α)} S^{2(3+α)/(1+α)}`.
pub fn threshold_single(alpha1: f64, a: f64, b: f64) -> Result<ThresholdReport> {
    if !(alpha1 > -1.0) {
        return Err(invalid(format!("alpha1 must exceed -1, got {alpha1}")));
    }
    if !(a >= 0.0) || !(b > 0.0) {
        return Err(invalid("need a >= 0 and b > 0"));
    }
    let s = best_constant(alpha1)?;
    let m = 3.0 + alpha1;
    let a_term = if a == 0.0 {
        0.0
    } else {
        (2.0 + alpha1) / (2.0 * m) * (a * s).powf(m / (2.0 + alpha1))
    };
    let b_term = (1.0 + alpha1) / (4.0 * m)
        * b.powf(m / (1.0 + alpha1))
        * s.powf(2.0 * m / (1.0 + alpha1));
    Ok(ThresholdReport {
        regime: if a == 0.0 {
            Regime::MuZeroDegenerate
        } else {
            Regime::MuZero
        },
        level: a_term + b_term,
        a_term,
        b_term,
        nu_bar: None,
        nu_tilde: None,
        params: None,
        alpha1,
        alpha2: None,
        a,
        b,
        mu_scaling: None,
    })
}

/// Positive root of `c x^{e1} + x^{e2} = rhs` (both exponents positive) by bisection.
fn increasing_root(c: f64, e1: f64, e2: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        return 0.0;
    }
    let f = |x: f64| c * x.powf(e1) + x.powf(e2) - rhs;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // the endpoint with smaller |f|
    if f(lo).abs() < f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// `(ν̄, ν̃)` solving
/// `C̃^{6+2α₁} ν̄^{4+2α₁} + ν̄^{4+2α₂} = a S_{α₂}^{3+α₂}` and
/// `C̃^{6+2α₁} ν̃^{2+2α₁} + ν̃^{2+2α₂} = b S_{α₂}^{3+α₂}`.
pub fn solve_nu_roots(alpha1: f64, alpha2: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    if !(alpha2 > -1.0) || !(alpha1 > alpha2) {
        return Err(invalid("need alpha1 > alpha2 > -1"));
    }
    if !(a >= 0.0) || !(b > 0.0) {
        return Err(invalid("need a >= 0 and b > 0"));
    }
    let ip = interpolation_params(alpha1, alpha2, 2.0_f64.min(
        (6.0 + 2.0 * alpha1) * (2.0 + alpha2) / (2.0 + alpha1),
    ))?;
    let c = ip.c_tilde.powf(6.0 + 2.0 * alpha1);
    let s = best_constant(alpha2)?.powf(3.0 + alpha2);
    let nu_bar = increasing_root(c, 4.0 + 2.0 * alpha1, 4.0 + 2.0 * alpha2, a * s);
    let nu_tilde = increasing_root(c, 2.0 + 2.0 * alpha1, 2.0 + 2.0 * alpha2, b * s);
    Ok((nu_bar, nu_tilde))
}

/// Residuals of the two defining equations at `(ν̄, ν̃)`.
pub fn nu_residuals(alpha1: f64, alpha2: f64, a: f64, b: f64, nu: (f64, f64)) -> Result<(f64, f64)> {
    let c = (4.0 * std::f64::consts::PI)
        .powf(0.5 * ((6.0 + 2.0 * alpha2) / (6.0 + 2.0 * alpha1) - 1.0))
        .powf(6.0 + 2.0 * alpha1);
    let s = best_constant(alpha2)?.powf(3.0 + alpha2);
    let r1 = c * nu.0.powf(4.0 + 2.0 * alpha1) + nu.0.powf(4.0 + 2.0 * alpha2) - a * s;
    let r2 = c * nu.1.powf(2.0 + 2.0 * alpha1) + nu.1.powf(2.0 + 2.0 * alpha2) - b * s;
    Ok((r1, r2))
}

/// Level for `μ = 1`: `(2+α₂)/(2(3+α₂)) a ν̄² + (1+α₂)/(4(3+α₂)) b ν̃⁴`.
pub fn threshold_double_positive(alpha1: f64, alpha2: f64, a: f64, b: f64) -> Result<ThresholdReport> {
    let (nu_bar, nu_tilde) = solve_nu_roots(alpha1, alpha2, a, b)?;
    let m = 3.0 + alpha2;
    let a_term = (2.0 + alpha2) / (2.0 * m) * a * nu_bar * nu_bar;
    let b_term = (1.0 + alpha2) / (4.0 * m) * b * nu_tilde.powi(4);
    Ok(ThresholdReport {
        regime: Regime::MuPositive,
        level: a_term + b_term,
        a_term,
        b_term,
        nu_bar: Some(nu_bar),
        nu_tilde: Some(nu_tilde),
        params: None,
        alpha1,
        alpha2: Some(alpha2),
        a,
        b,
        mu_scaling: None,
    })
}

/// Threshold matching the regime of `p`.
///
/// For `μ > 0` the substitution `u = s v`, `s = μ^{1/(p₁−p₂)}` turns `Φ_{a,μ}` into
/// `s^{p₁} Φ̂` with `â = a s^{2−p₁}`, `b̂ = b s^{4−p₁}` and unit `μ`.
pub fn threshold_for(p: &ProblemParams) -> Result<ThresholdReport> {
    p.validate()?;
    let mut report = if p.mu > 0.0 {
        if p.mu == 1.0 {
            threshold_double_positive(p.alpha1, p.alpha2, p.a, p.b)?
        } else {
            let (p1, p2) = (p.p1(), p.p2());
            let s = p.mu.powf(1.0 / (p1 - p2));
            let a_hat = p.a * s.powf(2.0 - p1);
            let b_hat = p.b * s.powf(4.0 - p1);
            let mut r = threshold_double_positive(p.alpha1, p.alpha2, a_hat, b_hat)?;
            let scale = s.powf(p1);
            r.level *= scale;
            r.a_term *= scale;
            r.b_term *= scale;
            r.a = p.a;
            r.b = p.b;
            r.mu_scaling = Some(scale);
            r
        }
    } else {
        let mut r = threshold_single(p.alpha1, p.a, p.b)?;
        r.regime = Regime::infer(p);
        r.alpha2 = Some(p.alpha2);
        r
    };
    report.params = Some(*p);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub below: bool,
    pub margin: f64,
}

/// `below = level_m < threshold` (strict), `margin = threshold − level_m`.
pub fn compare_report(gs: &GroundStateResult, tr: &ThresholdReport) -> Result<Comparison> {
    let p = &gs.params;
    let matches = match &tr.params {
        Some(tp) => tp == p,
        None => {
            tr.alpha1 == p.alpha1
                && tr.a == p.a
                && tr.b == p.b
                && tr.alpha2.is_none_or(|a2| a2 == p.alpha2)
                && (tr.regime == Regime::MuPositive) == (p.mu > 0.0)
        }
    };
    if !matches {
        return Err(invalid(
            "ground state and threshold were computed for different parameters",
        ));
    }
    Ok(Comparison {
        below: gs.level_m < tr.level,
        margin: tr.level - gs.level_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_degenerate() {
        let s0 = best_constant(0.0).unwrap();
        let r = threshold_single(0.0, 0.0, 1.0).unwrap();
        assert!((r.level - s0.powi(6) / 12.0).abs() < 1e-10 * r.level);
        assert!((r.level - 2251.67).abs() < 0.01);
        assert_eq!(r.a_term, 0.0);
    }

    #[test]
    fn single_with_a() {
        let s0 = best_constant(0.0).unwrap();
        let r0 = threshold_single(0.0, 0.0, 1.0).unwrap();
        let r1 = threshold_single(0.0, 1.0, 1.0).unwrap();
        let extra = s0.powf(1.5) / 3.0;
        assert!((r1.level - r0.level - extra).abs() < 1e-10);
        assert!((extra - 4.2735).abs() < 5e-4);
        assert!((r1.level - 2255.95).abs() < 0.01);
        assert!(threshold_single(-1.0, 0.0, 1.0).is_err());
        assert!(threshold_single(0.0, 0.0, 1e-9).unwrap().level < 1e-20);
    }

    #[test]
    fn nu_roots_quadratic_case() {
        let (nb, nt) = solve_nu_roots(1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(nb, 0.0);
        let c = 1.0 / (4.0 * std::f64::consts::PI);
        let s3 = best_constant(0.0).unwrap().powi(3);
        let x = (-1.0 + (1.0 + 4.0 * c * s3).sqrt()) / (2.0 * c);
        assert!((nt * nt - x).abs() < 1e-9 * x);
        assert!((x - 39.60).abs() < 0.01);
        let r = nu_residuals(1.0, 0.0, 0.0, 1.0, (nb, nt)).unwrap();
        assert!(r.0.abs() < 1e-10 && r.1.abs() < 1e-10);
    }

    #[test]
    fn double_positive_level() {
        let r = threshold_double_positive(1.0, 0.0, 0.0, 1.0).unwrap();
        let nt = r.nu_tilde.unwrap();
        assert!((r.level - nt.powi(4) / 12.0).abs() < 1e-10 * r.level);
        assert!((r.level - 130.7).abs() < 0.1);
        assert_eq!(r.a_term, 0.0);
        let r2 = threshold_double_positive(1.0, 0.0, 0.0, 1.5).unwrap();
        assert!(r2.level > r.level);
    }

    #[test]
    fn mu_rescaling_identity() {
        let p = ProblemParams {
            a: 0.7,
            b: 1.3,
            mu: 2.5,
            lambda: 1.0,
            alpha1: 1.0,
            alpha2: 0.0,
            beta: 0.0,
        };
        let r = threshold_for(&p).unwrap();
        let r1 = threshold_for(&ProblemParams { mu: 1.0, ..p }).unwrap();
        assert!(r.level > 0.0 && r1.level > 0.0);
        // mu → 1 continuity
        let rn = threshold_for(&ProblemParams { mu: 1.0 + 1e-9, ..p }).unwrap();
        assert!((rn.level - r1.level).abs() < 1e-6 * r1.level);
    }
}
