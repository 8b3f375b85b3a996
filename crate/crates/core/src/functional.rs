//! The energy
//! `Φ(u) = a/2‖u‖² + b/4‖u‖⁴ − 1/p₁∫|x|^{α₁}|u|^{p₁} − μ/p₂∫|x|^{α₂}|u|^{p₂} − λ∫h F(u)`
//! restricted to the piecewise-linear radial space, its Fréchet pairing and
//! its H¹₀ (Riesz) gradient.
//!
//! The pairing is the exact derivative of the discrete energy: the same
//! quadrature is used for the integrals and for their variations.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::params::{NonlinearityModel, ProblemParams};
use crate::radial::{h1_norm_sq, RadialFunction, RadialGrid, WeightTable};

/// The five terms of `Φ` and their signed sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic_a: f64,
    pub kirchhoff_b: f64,
    pub crit1: f64,
    pub crit2: f64,
    pub perturbation: f64,
    pub total: f64,
}

/// Scalar integrals that determine the fiber `t ↦ Φ(t u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberIntegrals {
    /// `‖u‖²`
    pub norm_sq: f64,
    /// `∫|x|^{α₁}|u|^{p₁}`
    pub k1: f64,
    /// `∫|x|^{α₂}|u|^{p₂}`, zero when `μ = 0`
    pub k2: f64,
    /// `∫ r^β |u|^q`, zero when `λ = 0`
    pub hq: f64,
}

/// `Φ` bound to a grid and a parameter set, with cached quadrature weights.
#[derive(Debug, Clone)]
pub struct Functional {
    grid: Arc<RadialGrid>,
    params: ProblemParams,
    nl: NonlinearityModel,
    crit1: WeightTable,
    crit2: WeightTable,
    pert: WeightTable,
}

impl Functional {
    pub fn new(
        grid: Arc<RadialGrid>,
        params: ProblemParams,
        nl: NonlinearityModel,
    ) -> Result<Self> {
        params.validate()?;
        nl.validate_against(&params)?;
        let crit1 = grid.weights(2.0 + params.alpha1)?;
        let crit2 = grid.weights(2.0 + params.alpha2)?;
        let pert = grid.weights(2.0 + params.beta)?;
        Ok(Functional {
            grid,
            params,
            nl,
            crit1,
            crit2,
            pert,
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn nonlinearity(&self) -> &NonlinearityModel {
        &self.nl
    }

    /// Same grid and model with different scalars.
    pub fn with_params(&self, params: ProblemParams) -> Result<Self> {
        Functional::new(self.grid.clone(), params, self.nl)
    }

    fn check(&self, u: &RadialFunction) -> Result<()> {
        if self.grid.same_as(u.grid()) {
            Ok(())
        } else {
            Err(invalid("function lives on a different grid than the functional"))
        }
    }

    pub fn fiber_integrals(&self, u: &RadialFunction) -> Result<FiberIntegrals> {
        self.check(u)?;
        let p = &self.params;
        let v = u.values();
        let (p1, p2, q) = (p.p1(), p.p2(), self.nl.q);
        let k1 = self.grid.integrate_nodal(v, &self.crit1, |x| x.abs().powf(p1));
        let k2 = if p.mu != 0.0 {
            self.grid.integrate_nodal(v, &self.crit2, |x| x.abs().powf(p2))
        } else {
            0.0
        };
        let hq = if p.lambda != 0.0 {
            self.grid.integrate_nodal(v, &self.pert, |x| x.abs().powf(q))
        } else {
            0.0
        };
        Ok(FiberIntegrals {
            norm_sq: h1_norm_sq(u),
            k1,
            k2,
            hq,
        })
    }

    pub fn energy(&self, u: &RadialFunction) -> Result<EnergyBreakdown> {
        let fi = self.fiber_integrals(u)?;
        Ok(self.breakdown(&fi))
    }

    pub(crate) fn breakdown(&self, fi: &FiberIntegrals) -> EnergyBreakdown {
        let p = &self.params;
        let kinetic_a = 0.5 * p.a * fi.norm_sq;
        let kirchhoff_b = 0.25 * p.b * fi.norm_sq * fi.norm_sq;
        let crit1 = fi.k1 / p.p1();
        let crit2 = p.mu * fi.k2 / p.p2();
        let perturbation = p.lambda * fi.hq / self.nl.q;
        EnergyBreakdown {
            kinetic_a,
            kirchhoff_b,
            crit1,
            crit2,
            perturbation,
            total: kinetic_a + kirchhoff_b - crit1 - crit2 - perturbation,
        }
    }

    /// Nodal representation of `Φ′(u)`: entry `i` is `⟨Φ′(u), φ_i⟩`; the Dirichlet entry is zero.
    pub fn derivative(&self, u: &RadialFunction) -> Result<Vec<f64>> {
        self.check(u)?;
        let p = &self.params;
        let v = u.values();
        let norm_sq = h1_norm_sq(u);
        let mut out = self.grid.apply_stiffness(v);
        let coeff = p.a + p.b * norm_sq;
        for x in out.iter_mut() {
            *x *= coeff;
        }
        let (p1, p2, q) = (p.p1(), p.p2(), self.nl.q);
        self.grid
            .accumulate_nodal(v, &self.crit1, -1.0, |x| x.abs().powf(p1 - 2.0) * x, &mut out);
        if p.mu != 0.0 {
            self.grid.accumulate_nodal(
                v,
                &self.crit2,
                -p.mu,
                |x| x.abs().powf(p2 - 2.0) * x,
                &mut out,
            );
        }
        if p.lambda != 0.0 {
            self.grid.accumulate_nodal(
                v,
                &self.pert,
                -p.lambda,
                |x| x.abs().powf(q - 2.0) * x,
                &mut out,
            );
        }
        let n = self.grid.node_count();
        out[n] = 0.0;
        Ok(out)
    }

    /// `⟨Φ′(u), v⟩`.
    pub fn pairing(&self, u: &RadialFunction, v: &RadialFunction) -> Result<f64> {
        u.check_grid(v)?;
        let d = self.derivative(u)?;
        Ok(d.iter().zip(v.values()).map(|(a, b)| a * b).sum())
    }

    /// The `g ∈ H¹₀` with `⟨∇g, ∇v⟩ = ⟨Φ′(u), v⟩` for every discrete `v`.
    pub fn riesz_gradient(&self, u: &RadialFunction) -> Result<RadialFunction> {
        let d = self.derivative(u)?;
        let g = self.grid.solve_stiffness(&d)?;
        RadialFunction::from_values(self.grid.clone(), g)
    }

    /// Riesz gradient together with its H¹ norm (the dual residual `‖Φ′(u)‖`).
    pub fn gradient_and_residual(&self, u: &RadialFunction) -> Result<(RadialFunction, f64)> {
        let d = self.derivative(u)?;
        let g = self.grid.solve_stiffness(&d)?;
        let norm = d.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt();
        Ok((RadialFunction::from_values(self.grid.clone(), g)?, norm))
    }
}

/// `Φ(u)` broken into its terms.
pub fn energy(
    u: &RadialFunction,
    params: &ProblemParams,
    nl: &NonlinearityModel,
) -> Result<EnergyBreakdown> {
    Functional::new(u.grid().clone(), *params, *nl)?.energy(u)
}

/// `⟨Φ′(u), v⟩`.
pub fn pairing(
    u: &RadialFunction,
    v: &RadialFunction,
    params: &ProblemParams,
    nl: &NonlinearityModel,
) -> Result<f64> {
    u.check_grid(v)?;
    Functional::new(u.grid().clone(), *params, *nl)?.pairing(u, v)
}

/// H¹₀ representative of `Φ′(u)`.
pub fn riesz_gradient(
    u: &RadialFunction,
    params: &ProblemParams,
    nl: &NonlinearityModel,
) -> Result<RadialFunction> {
    Functional::new(u.grid().clone(), *params, *nl)?.riesz_gradient(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{h1_inner, make_grid};
    use std::f64::consts::PI;

    fn params(a: f64, lambda: f64) -> ProblemParams {
        ProblemParams {
            a,
            b: 1.0,
            mu: 0.0,
            lambda,
            alpha1: 0.0,
            alpha2: -0.5,
            beta: 0.0,
        }
    }

    fn q5() -> NonlinearityModel {
        NonlinearityModel::new(5.0).unwrap()
    }

    #[test]
    fn energy_of_linear_profile() {
        let g = make_grid(1024, 2.0).unwrap();
        let u = RadialFunction::from_fn(g, |r| 1.0 - r).unwrap();
        let e0 = energy(&u, &params(0.0, 0.0), &q5()).unwrap();
        let expected = (4.0 * PI / 3.0).powi(2) / 4.0 - (PI / 63.0) / 6.0;
        assert!((e0.total - expected).abs() < 1e-10 * expected);
        assert!((e0.total - 4.37818).abs() < 1e-5);
        let e1 = energy(&u, &params(1.0, 0.0), &q5()).unwrap();
        assert!((e1.total - e0.total - 0.5 * 4.0 * PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn zero_function_has_zero_terms() {
        let g = make_grid(64, 2.0).unwrap();
        let z = RadialFunction::zeros(g);
        let p = ProblemParams {
            mu: -0.3,
            ..params(2.0, 5.0)
        };
        let e = energy(&z, &p, &q5()).unwrap();
        assert_eq!(
            [e.kinetic_a, e.kirchhoff_b, e.crit1, e.crit2, e.perturbation, e.total],
            [0.0; 6]
        );
    }

    #[test]
    fn self_pairing_of_linear_profile() {
        let g = make_grid(1024, 2.0).unwrap();
        let u = RadialFunction::from_fn(g.clone(), |r| 1.0 - r).unwrap();
        let v = pairing(&u, &u, &params(0.0, 0.0), &q5()).unwrap();
        let expected = (4.0 * PI / 3.0).powi(2) - PI / 63.0;
        assert!((v - expected).abs() < 1e-10 * expected);
        assert!((v - 17.4961).abs() < 1e-4);
        let z = RadialFunction::zeros(g);
        assert_eq!(pairing(&z, &u, &params(1.0, 1.0), &q5()).unwrap(), 0.0);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let u = RadialFunction::from_fn(make_grid(32, 2.0).unwrap(), |r| 1.0 - r).unwrap();
        let v = RadialFunction::from_fn(make_grid(64, 2.0).unwrap(), |r| 1.0 - r).unwrap();
        assert!(pairing(&u, &v, &params(0.0, 1.0), &q5()).is_err());
    }

    #[test]
    fn riesz_gradient_represents_pairing() {
        let g = make_grid(256, 2.0).unwrap();
        let p = ProblemParams {
            mu: 0.7,
            ..params(0.5, 2.0)
        };
        let f = Functional::new(g.clone(), p, q5()).unwrap();
        let u = RadialFunction::from_fn(g.clone(), |r| 2.0 * (1.0 - r * r) * (1.0 + r)).unwrap();
        let grad = f.riesz_gradient(&u).unwrap();
        for k in 1..=10 {
            let kk = k as f64;
            let v = RadialFunction::from_fn(g.clone(), |r| (kk * r).cos() * (1.0 - r)).unwrap();
            let lhs = h1_inner(&grad, &v).unwrap();
            let rhs = f.pairing(&u, &v).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn breakdown_sum_identity() {
        let g = make_grid(128, 2.0).unwrap();
        let p = ProblemParams {
            mu: -0.2,
            ..params(1.0, 3.0)
        };
        let u = RadialFunction::from_fn(g, |r| 1.3 * (1.0 - r)).unwrap();
        let e = energy(&u, &p, &q5()).unwrap();
        assert_eq!(
            e.total,
            e.kinetic_a + e.kirchhoff_b - e.crit1 - e.crit2 - e.perturbation
        );
    }

    #[test]
    fn invalid_params_rejected() {
        let g = make_grid(16, 1.0).unwrap();
        let u = RadialFunction::from_fn(g, |r| 1.0 - r).unwrap();
        let p = ProblemParams {
            alpha1: -0.6,
            ..params(0.0, 1.0)
        };
        assert!(energy(&u, &p, &q5()).is_err());
        let p = ProblemParams {
            beta: -0.6,
            ..params(0.0, 1.0)
        };
        assert!(energy(&u, &p, &q5()).is_err());
    }
}
