//! Projection onto the Nehari manifold along rays `t ↦ t u`.
//!
//! For fixed `u` the energy along the ray is the scalar fiber
//! `φ(t) = a t²A/2 + b t⁴A²/4 − t^{p₁}K₁/p₁ − μ t^{p₂}K₂/p₂ − λ t^q H/q`
//! and `t u` is on the manifold exactly when `φ′(t) = 0`. Roots are located on
//! the reduced derivative `g(t) = φ′(t)/t`, which is positive near the origin
//! whenever the quartic Kirchhoff term (or `a > 0`) dominates there.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::functional::{FiberIntegrals, Functional};
use crate::params::{NonlinearityModel, ProblemParams};
use crate::radial::RadialFunction;
use crate::root::safeguarded_newton;

/// Number of log-spaced samples used to look for sign changes of `g`.
pub const SCAN_POINTS: usize = 512;
/// Default lower end of the root bracket.
pub const T_MIN: f64 = 1e-8;

/// The scalar fiber of `Φ` through a fixed direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberMap {
    pub a: f64,
    pub b: f64,
    pub mu: f64,
    pub lambda: f64,
    pub p1: f64,
    pub p2: f64,
    pub q: f64,
    pub integrals: FiberIntegrals,
}

impl FiberMap {
    pub fn new(p: &ProblemParams, nl: &NonlinearityModel, integrals: FiberIntegrals) -> Self {
        FiberMap {
            a: p.a,
            b: p.b,
            mu: p.mu,
            lambda: p.lambda,
            p1: p.p1(),
            p2: p.p2(),
            q: nl.q,
            integrals,
        }
    }

    /// Same direction, different `λ`. The integrals do not depend on `λ`
    /// except for `H`, which must have been computed (nonzero `λ` or explicitly).
    pub fn with_lambda(&self, lambda: f64) -> Self {
        FiberMap { lambda, ..*self }
    }

    /// `φ(t) = Φ(t u)`.
    pub fn phi(&self, t: f64) -> f64 {
        let FiberIntegrals { norm_sq: a_, k1, k2, hq } = self.integrals;
        let t2 = t * t;
        0.5 * self.a * t2 * a_ + 0.25 * self.b * t2 * t2 * a_ * a_
            - t.powf(self.p1) * k1 / self.p1
            - self.mu_term(t.powf(self.p2) * k2 / self.p2)
            - self.lambda_term(t.powf(self.q) * hq / self.q)
    }

    fn mu_term(&self, x: f64) -> f64 {
        if self.mu == 0.0 {
            0.0
        } else {
            self.mu * x
        }
    }

    fn lambda_term(&self, x: f64) -> f64 {
        if self.lambda == 0.0 {
            0.0
        } else {
            self.lambda * x
        }
    }

    /// `φ(t) − t²g(t)/4`, which equals `φ(t)` at a root of `g`. The Kirchhoff
    /// term drops out, so for `μ ≥ 0` this is a sum of positive terms and is
    /// evaluated without cancellation.
    pub fn level_on_manifold(&self, t: f64) -> f64 {
        let FiberIntegrals { norm_sq: a_, k1, k2, hq } = self.integrals;
        0.25 * self.a * t * t * a_
            + (0.25 - 1.0 / self.p1) * t.powf(self.p1) * k1
            + self.mu_term((0.25 - 1.0 / self.p2) * t.powf(self.p2) * k2)
            + self.lambda_term((0.25 - 1.0 / self.q) * t.powf(self.q) * hq)
    }

    /// `φ′(t)`.
    pub fn dphi(&self, t: f64) -> f64 {
        t * self.g(t)
    }

    /// Reduced derivative `g(t) = φ′(t)/t`.
    pub fn g(&self, t: f64) -> f64 {
        self.g_and_dg(t).0
    }

    /// `g(t)` and `g′(t)`.
    pub fn g_and_dg(&self, t: f64) -> (f64, f64) {
        let FiberIntegrals { norm_sq: a_, k1, k2, hq } = self.integrals;
        let (e1, e2, eq) = (self.p1 - 2.0, self.p2 - 2.0, self.q - 2.0);
        let t1 = t.powf(e1) * k1;
        let t2 = self.mu_term(t.powf(e2) * k2);
        let tq = self.lambda_term(t.powf(eq) * hq);
        let g = self.a * a_ + self.b * t * t * a_ * a_ - t1 - t2 - tq;
        let dg = 2.0 * self.b * t * a_ * a_ - (e1 * t1 + e2 * t2 + eq * tq) / t;
        (g, dg)
    }

    /// Upper end of the bracket: large enough that the first critical term
    /// dominates every positive contribution to `g`.
    pub fn upper_bound(&self) -> f64 {
        let FiberIntegrals { norm_sq: a_, k1, k2, .. } = self.integrals;
        let e1 = self.p1 - 2.0;
        let e2 = self.p2 - 2.0;
        let mut t = 1.0_f64;
        if self.a > 0.0 {
            t = t.max((4.0 * self.a * a_ / k1).powf(1.0 / e1));
        }
        t = t.max((4.0 * self.b * a_ * a_ / k1).powf(1.0 / (e1 - 2.0)));
        if self.mu < 0.0 && k2 > 0.0 {
            t = t.max((4.0 * -self.mu * k2 / k1).powf(1.0 / (e1 - e2)));
        }
        2.0 * t
    }

    /// Unique-or-best positive maximizer of the fiber.
    pub fn maximize(&self) -> Result<FiberRoot> {
        let FiberIntegrals { norm_sq, k1, .. } = self.integrals;
        if !(norm_sq > 0.0) || !(k1 > 0.0) {
            return Err(invalid("direction must be nonzero"));
        }
        let mut lo = T_MIN;
        let mut tries = 0;
        while self.g(lo) <= 0.0 {
            lo *= 1e-2;
            tries += 1;
            if tries > 8 {
                return Err(Error::NoRoot { lo, hi: T_MIN });
            }
        }
        let mut hi = self.upper_bound().max(lo * 10.0);
        let mut grow = 0;
        while self.g(hi) >= 0.0 {
            hi *= 2.0;
            grow += 1;
            if grow > 200 || !hi.is_finite() {
                return Err(Error::NoRoot { lo, hi });
            }
        }

        let (llo, lhi) = (lo.ln(), hi.ln());
        let step = (lhi - llo) / (SCAN_POINTS - 1) as f64;
        let mut prev_t = lo;
        let mut prev_g = self.g(lo);
        let mut changes = 0usize;
        let mut best: Option<(f64, f64, f64)> = None; // (phi, lo, hi)
        for i in 1..SCAN_POINTS {
            let t = if i == SCAN_POINTS - 1 {
                hi
            } else {
                (llo + step * i as f64).exp()
            };
            let gt = self.g(t);
            if gt.signum() != prev_g.signum() {
                changes += 1;
                // + to − marks a local maximum of φ
                if prev_g > 0.0 {
                    let root = self.refine(prev_t, t);
                    let val = self.phi(root);
                    if best.is_none_or(|(b, _, _)| val > b) {
                        best = Some((val, prev_t, t));
                    }
                }
            }
            prev_t = t;
            prev_g = gt;
        }
        let (_, blo, bhi) = best.ok_or(Error::NoRoot { lo, hi })?;
        let t = self.refine(blo, bhi);
        Ok(FiberRoot {
            t,
            value: self.level_on_manifold(t),
            bracket: (blo, bhi),
            sign_changes: changes,
        })
    }

    fn refine(&self, lo: f64, hi: f64) -> f64 {
        // Newton in s = ln t keeps the iteration scale-free.
        let s = safeguarded_newton(
            |s| {
                let t = s.exp();
                let (g, dg) = self.g_and_dg(t);
                (g, dg * t)
            },
            lo.ln(),
            hi.ln(),
            1e-15,
            200,
        );
        s.exp()
    }
}

/// Maximizer of a fiber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberRoot {
    pub t: f64,
    /// Fiber value at `t`, from [`FiberMap::level_on_manifold`].
    pub value: f64,
    pub bracket: (f64, f64),
    pub sign_changes: usize,
}

#[derive(Debug, Clone)]
pub struct NehariResult {
    pub t_u: f64,
    pub projected: RadialFunction,
    pub fiber_energy: f64,
    pub root_bracket: (f64, f64),
    /// Only one sign change of the fiber derivative was seen in the scan.
    pub unique: bool,
    /// `⟨Φ′(t u), t u⟩ / ‖t u‖²`.
    pub membership_residual: f64,
}

impl Functional {
    pub fn fiber(&self, u: &RadialFunction) -> Result<FiberMap> {
        Ok(FiberMap::new(
            self.params(),
            self.nonlinearity(),
            self.fiber_integrals(u)?,
        ))
    }

    /// Scales `u` onto the Nehari manifold.
    pub fn project(&self, u: &RadialFunction) -> Result<NehariResult> {
        if u.is_zero() {
            return Err(invalid("cannot project the zero function"));
        }
        let fiber = self.fiber(u)?;
        let root = fiber.maximize()?;
        let t = root.t;
        Ok(NehariResult {
            t_u: t,
            projected: u.scaled(t),
            fiber_energy: root.value,
            root_bracket: root.bracket,
            unique: root.sign_changes == 1,
            membership_residual: fiber.g(t) / fiber.integrals.norm_sq,
        })
    }
}

/// Nehari projection of `u` for the given parameters.
pub fn project_nehari(
    u: &RadialFunction,
    p: &ProblemParams,
    nl: &NonlinearityModel,
) -> Result<NehariResult> {
    if u.is_zero() {
        return Err(invalid("cannot project the zero function"));
    }
    Functional::new(u.grid().clone(), *p, *nl)?.project(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::make_grid;
    use std::f64::consts::PI;

    fn params(lambda: f64) -> ProblemParams {
        ProblemParams {
            a: 0.0,
            b: 1.0,
            mu: 0.0,
            lambda,
            alpha1: 0.0,
            alpha2: -0.5,
            beta: 0.0,
        }
    }

    #[test]
    fn closed_form_root_without_perturbation() {
        let g = make_grid(1024, 2.0).unwrap();
        let u = RadialFunction::from_fn(g, |r| 1.0 - r).unwrap();
        let nl = NonlinearityModel::new(5.0).unwrap();
        let res = project_nehari(&u, &params(0.0), &nl).unwrap();
        let a = 4.0 * PI / 3.0;
        let k1 = PI / 63.0;
        let t = (a * a / k1).sqrt();
        assert!((res.t_u - t).abs() < 1e-9 * t, "{} vs {t}", res.t_u);
        assert!((res.t_u - 18.76).abs() < 5e-3);
        let e = t.powi(4) * a * a / 12.0;
        assert!((res.fiber_energy - e).abs() < 1e-9 * e);
        assert!((res.fiber_energy - 1.811e5).abs() < 1e2);
        assert!(res.unique);
        assert!(res.membership_residual.abs() < 1e-10);
    }

    #[test]
    fn perturbation_lowers_root() {
        let g = make_grid(512, 2.0).unwrap();
        let u = RadialFunction::from_fn(g, |r| 1.0 - r).unwrap();
        let nl = NonlinearityModel::new(5.0).unwrap();
        let t0 = project_nehari(&u, &params(0.0), &nl).unwrap().t_u;
        let res = project_nehari(&u, &params(1.0), &nl).unwrap();
        assert!(res.t_u < t0);
        // bisection oracle on g
        let f = Functional::new(u.grid().clone(), params(1.0), nl).unwrap();
        let fib = f.fiber(&u).unwrap();
        let (mut lo, mut hi) = (1.0, 100.0);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if fib.g(m) > 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        assert!((res.t_u - lo).abs() < 1e-10 * lo);
    }

    #[test]
    fn zero_rejected() {
        let g = make_grid(32, 2.0).unwrap();
        let nl = NonlinearityModel::new(5.0).unwrap();
        let err = project_nehari(&RadialFunction::zeros(g), &params(1.0), &nl).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn general_closed_form_for_weighted_critical_term() {
        let g = make_grid(512, 2.0).unwrap();
        let u = RadialFunction::from_fn(g.clone(), |r| (1.0 - r * r) * (2.0 - r)).unwrap();
        let nl = NonlinearityModel::new(5.0).unwrap();
        let p = ProblemParams {
            alpha1: 1.5,
            ..params(0.0)
        };
        let f = Functional::new(g, p, nl).unwrap();
        let fi = f.fiber_integrals(&u).unwrap();
        let expected = (fi.norm_sq * fi.norm_sq / fi.k1).powf(1.0 / (2.0 + 2.0 * 1.5));
        let res = f.project(&u).unwrap();
        assert!((res.t_u - expected).abs() < 1e-12 * expected);
    }
}
