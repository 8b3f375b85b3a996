//! Piecewise-linear radial functions on the unit ball of ℝ³.
//!
//! A radial function `u(|x|)` is stored by its nodal values on a graded grid
//! `r_j = (j/n)^g`, `j = 0..=n`, and interpolated linearly in `r`. The last
//! node carries the Dirichlet condition `u(1) = 0`; the origin node is free.
//!
//! Integrals over the ball reduce to `ω₃ ∫₀¹ w(r) r² dr`. Weighted integrals
//! against `r^σ` (the Jacobian `r²` already folded into `σ`) use exact
//! monomial moments of the linear interpolant on the first cell, where the
//! weight may be singular, and an 8-point Gauss rule on every other cell.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::gauss_legendre;

/// Surface area of the unit sphere in ℝ³.
pub const OMEGA3: f64 = 4.0 * PI;

/// Gauss points per interior cell.
pub const GAUSS_ORDER: usize = 8;

/// Default node count.
pub const DEFAULT_NODES: usize = 1024;
/// Default grading exponent.
pub const DEFAULT_GRADING: f64 = 2.0;

/// Graded grid `0 = r_0 < r_1 < … < r_n = 1`.
#[derive(Debug)]
pub struct RadialGrid {
    node_count: usize,
    grading_exponent: f64,
    nodes: Vec<f64>,
    /// `ω₃ ∫_cell r² dr / h²` for each cell.
    stiffness: Vec<f64>,
    gauss_r: Vec<f64>,
    /// Gauss weights scaled by `ω₃·h/2`.
    gauss_w: Vec<f64>,
    /// Local coordinate of each Gauss point in `[0, 1]`.
    gauss_t: Vec<f64>,
}

/// Grid parameters, as they appear in configs and reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub n: usize,
    pub grading: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n: DEFAULT_NODES,
            grading: DEFAULT_GRADING,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<RadialGrid>> {
        make_grid(self.n, self.grading)
    }
}

/// Builds the grid `r_j = (j/n)^grading`.
pub fn make_grid(n: usize, grading_exponent: f64) -> Result<Arc<RadialGrid>> {
    RadialGrid::new(n, grading_exponent).map(Arc::new)
}

impl RadialGrid {
    pub fn new(n: usize, grading_exponent: f64) -> Result<Self> {
        if n < 4 {
            return Err(invalid(format!("grid needs at least 4 cells, got {n}")));
        }
        if !(grading_exponent >= 1.0) || !grading_exponent.is_finite() {
            return Err(invalid(format!(
                "grading exponent must be >= 1, got {grading_exponent}"
            )));
        }
        let nodes: Vec<f64> = (0..=n)
            .map(|j| {
                if j == n {
                    1.0
                } else {
                    (j as f64 / n as f64).powf(grading_exponent)
                }
            })
            .collect();
        let stiffness = nodes
            .windows(2)
            .map(|c| {
                let (a, b) = (c[0], c[1]);
                let h = b - a;
                OMEGA3 * (a * a + a * b + b * b) / (3.0 * h)
            })
            .collect();
        let (gx, gw) = gauss_legendre(GAUSS_ORDER);
        let cap = (n - 1) * GAUSS_ORDER;
        let mut gauss_r = Vec::with_capacity(cap);
        let mut gauss_w = Vec::with_capacity(cap);
        let mut gauss_t = Vec::with_capacity(cap);
        for cell in nodes.windows(2).skip(1) {
            let (a, b) = (cell[0], cell[1]);
            let half = 0.5 * (b - a);
            for (x, w) in gx.iter().zip(&gw) {
                let t = 0.5 * (x + 1.0);
                gauss_r.push(a + (b - a) * t);
                gauss_w.push(OMEGA3 * half * w);
                gauss_t.push(t);
            }
        }
        Ok(RadialGrid {
            node_count: n,
            grading_exponent,
            nodes,
            stiffness,
            gauss_r,
            gauss_w,
            gauss_t,
        })
    }

    /// Number of cells `n` (there are `n + 1` nodes).
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn grading_exponent(&self) -> f64 {
        self.grading_exponent
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            n: self.node_count,
            grading: self.grading_exponent,
        }
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        std::ptr::eq(self, other)
            || (self.node_count == other.node_count
                && self.grading_exponent == other.grading_exponent)
    }

    /// Quadrature weights for `ω₃ ∫₀¹ r^σ (·) dr`.
    pub fn weights(&self, sigma: f64) -> Result<WeightTable> {
        if !(sigma > -1.0) || !sigma.is_finite() {
            return Err(invalid(format!(
                "weight exponent must exceed -1, got {sigma}"
            )));
        }
        let r1 = self.nodes[1];
        // ∫₀^{r1} r^σ (1 - r/r1) dr and ∫₀^{r1} r^σ (r/r1) dr
        let m0 = r1.powf(sigma + 1.0) / (sigma + 1.0);
        let m1 = r1.powf(sigma + 1.0) / (sigma + 2.0);
        let interior = self
            .gauss_r
            .iter()
            .zip(&self.gauss_w)
            .map(|(r, w)| w * r.powf(sigma))
            .collect();
        Ok(WeightTable {
            sigma,
            first: [OMEGA3 * (m0 - m1), OMEGA3 * m1],
            interior,
        })
    }

    /// `∫ r^σ f(u_h) ` for nodal values `values` with linear interpolation.
    pub(crate) fn integrate_nodal<F: Fn(f64) -> f64>(
        &self,
        values: &[f64],
        table: &WeightTable,
        f: F,
    ) -> f64 {
        let mut total = table.first[0] * f(values[0]) + table.first[1] * f(values[1]);
        for j in 1..self.node_count {
            let (ua, ub) = (values[j], values[j + 1]);
            let base = (j - 1) * GAUSS_ORDER;
            let mut cell = 0.0;
            for k in base..base + GAUSS_ORDER {
                let t = self.gauss_t[k];
                cell += table.interior[k] * f(ua + (ub - ua) * t);
            }
            total += cell;
        }
        total
    }

    /// `out_i += coeff ∫ r^σ f(u_h) φ_i` for the hat functions `φ_i`.
    pub(crate) fn accumulate_nodal<F: Fn(f64) -> f64>(
        &self,
        values: &[f64],
        table: &WeightTable,
        coeff: f64,
        f: F,
        out: &mut [f64],
    ) {
        out[0] += coeff * table.first[0] * f(values[0]);
        out[1] += coeff * table.first[1] * f(values[1]);
        for j in 1..self.node_count {
            let (ua, ub) = (values[j], values[j + 1]);
            let base = (j - 1) * GAUSS_ORDER;
            let (mut left, mut right) = (0.0, 0.0);
            for k in base..base + GAUSS_ORDER {
                let t = self.gauss_t[k];
                let v = table.interior[k] * f(ua + (ub - ua) * t);
                left += v * (1.0 - t);
                right += v * t;
            }
            out[j] += coeff * left;
            out[j + 1] += coeff * right;
        }
    }

    /// `∫ r^σ g(r)` for a pointwise map; the first cell uses the linear interpolant of `g`.
    pub(crate) fn integrate_fn<F: Fn(f64) -> f64>(&self, table: &WeightTable, g: F) -> f64 {
        let mut total = table.first[0] * g(0.0) + table.first[1] * g(self.nodes[1]);
        for (w, r) in table.interior.iter().zip(&self.gauss_r) {
            total += w * g(*r);
        }
        total
    }

    /// Stiffness product `K u` restricted to the free nodes; the Dirichlet entry is zero.
    pub(crate) fn apply_stiffness(&self, values: &[f64]) -> Vec<f64> {
        let n = self.node_count;
        let mut out = vec![0.0; n + 1];
        for (j, c) in self.stiffness.iter().enumerate() {
            let d = c * (values[j] - values[j + 1]);
            out[j] += d;
            out[j + 1] -= d;
        }
        out[n] = 0.0;
        out
    }

    /// Solves `K x = rhs` on the free nodes with `x_n = 0` (Thomas algorithm).
    pub(crate) fn solve_stiffness(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.node_count;
        let c = &self.stiffness;
        let mut diag: Vec<f64> = (0..n)
            .map(|i| if i == 0 { c[0] } else { c[i - 1] + c[i] })
            .collect();
        let mut b: Vec<f64> = rhs[..n].to_vec();
        for i in 1..n {
            let off = -c[i - 1];
            if diag[i - 1] == 0.0 || !diag[i - 1].is_finite() {
                return Err(Error::Internal("singular stiffness system".into()));
            }
            let m = off / diag[i - 1];
            diag[i] -= m * off;
            b[i] -= m * b[i - 1];
        }
        let mut x = vec![0.0; n + 1];
        if diag[n - 1] == 0.0 {
            return Err(Error::Internal("singular stiffness system".into()));
        }
        x[n - 1] = b[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (b[i] + c[i] * x[i + 1]) / diag[i];
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Internal("non-finite stiffness solution".into()));
        }
        Ok(x)
    }

    /// H¹₀ inner product `⟨∇u, ∇v⟩` of nodal vectors.
    pub(crate) fn h1_inner_values(&self, u: &[f64], v: &[f64]) -> f64 {
        self.stiffness
            .iter()
            .enumerate()
            .map(|(j, c)| c * (u[j] - u[j + 1]) * (v[j] - v[j + 1]))
            .sum()
    }
}

/// Precomputed quadrature weights for one exponent σ.
#[derive(Debug, Clone)]
pub struct WeightTable {
    sigma: f64,
    first: [f64; 2],
    interior: Vec<f64>,
}

impl WeightTable {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Piecewise-linear radial profile with `u(1) = 0`.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialFunction {
    /// Wraps nodal values; the last value must be exactly zero.
    pub fn from_values(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count + 1 {
            return Err(invalid(format!(
                "expected {} nodal values, got {}",
                grid.node_count + 1,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value at node {i}")));
        }
        if values[grid.node_count] != 0.0 {
            return Err(invalid("Dirichlet condition u(1) = 0 violated"));
        }
        Ok(RadialFunction { grid, values })
    }

    /// Samples `f` at the nodes; the boundary value is forced to zero.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<RadialGrid>, f: F) -> Result<Self> {
        let n = grid.node_count;
        let values = grid
            .nodes
            .iter()
            .enumerate()
            .map(|(j, &r)| if j == n { 0.0 } else { f(r) })
            .collect();
        Self::from_values(grid, values)
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let values = vec![0.0; grid.node_count + 1];
        RadialFunction { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        RadialFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &RadialFunction, b: f64) -> Result<Self> {
        self.check_grid(other)?;
        Ok(RadialFunction {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    /// Linear interpolation at `r ∈ [0, 1]`.
    pub fn eval(&self, r: f64) -> f64 {
        let nodes = &self.grid.nodes;
        if r <= 0.0 {
            return self.values[0];
        }
        if r >= 1.0 {
            return 0.0;
        }
        let j = nodes.partition_point(|x| *x <= r).saturating_sub(1);
        let (a, b) = (nodes[j], nodes[j + 1]);
        let t = (r - a) / (b - a);
        self.values[j] * (1.0 - t) + self.values[j + 1] * t
    }

    pub(crate) fn check_grid(&self, other: &RadialFunction) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(invalid("radial functions live on different grids"))
        }
    }
}

/// `ω₃ ∫₀¹ r^σ g(r) dr` for the piecewise-linear `g`.
pub fn weighted_integral(g: &RadialFunction, sigma: f64) -> Result<f64> {
    let table = g.grid.weights(sigma)?;
    Ok(g.grid.integrate_nodal(&g.values, &table, |v| v))
}

/// `ω₃ ∫₀¹ r^σ g(r) dr` for a pointwise map `g`.
pub fn weighted_integral_fn<F: Fn(f64) -> f64>(
    grid: &RadialGrid,
    sigma: f64,
    g: F,
) -> Result<f64> {
    let table = grid.weights(sigma)?;
    let v = grid.integrate_fn(&table, g);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidInput("integrand is not finite".into()))
    }
}

/// `‖u‖² = ω₃ ∫₀¹ u′(r)² r² dr`, exact for the piecewise-linear `u`.
pub fn h1_norm_sq(u: &RadialFunction) -> f64 {
    u.grid.h1_inner_values(&u.values, &u.values)
}

/// `⟨∇u, ∇v⟩`.
pub fn h1_inner(u: &RadialFunction, v: &RadialFunction) -> Result<f64> {
    u.check_grid(v)?;
    Ok(u.grid.h1_inner_values(&u.values, &v.values))
}

/// `(ω₃ ∫₀¹ r^{2+α} |u|^p dr)^{1/p}`.
pub fn lp_weighted_norm(u: &RadialFunction, p: f64, alpha: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid(format!("p must be >= 1, got {p}")));
    }
    if !(alpha > -2.0) {
        return Err(invalid(format!("alpha must exceed -2, got {alpha}")));
    }
    let table = u.grid.weights(2.0 + alpha)?;
    let s = u.grid.integrate_nodal(&u.values, &table, |v| v.abs().powf(p));
    Ok(s.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn graded_nodes() {
        let g = make_grid(8, 2.0).unwrap();
        for (j, r) in g.nodes().iter().enumerate() {
            assert_eq!(*r, (j as f64 / 8.0).powi(2));
        }
        let g = make_grid(4, 1.0).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn grid_preconditions() {
        assert!(matches!(make_grid(2, 1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_grid(3, 2.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_grid(16, 0.5), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_grid(16, f64::NAN), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn nodes_strictly_increasing_and_end_at_one() {
        let g = make_grid(1024, 3.0).unwrap();
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*g.nodes().last().unwrap(), 1.0);
    }

    #[test]
    fn ball_volume_and_monomials() {
        let g = make_grid(64, 2.0).unwrap();
        let one = weighted_integral_fn(&g, 2.0, |_| 1.0).unwrap();
        assert!(close(one, 4.0 * PI / 3.0, 1e-13));
        for alpha in [-1.5, -0.5, 0.0, 1.0, 2.5] {
            let v = weighted_integral_fn(&g, 2.0 + alpha, |_| 1.0).unwrap();
            assert!(close(v, OMEGA3 / (3.0 + alpha), 1e-12), "alpha = {alpha}");
        }
    }

    #[test]
    fn beta_function_oracle() {
        // ω₃ ∫ (1-r)⁶ r² dr = 4π B(3, 7) = π/63
        let g = make_grid(256, 2.0).unwrap();
        let u = RadialFunction::from_fn(g.clone(), |r| (1.0 - r).powi(6)).unwrap();
        let v = weighted_integral_fn(&g, 2.0, |r| (1.0 - r).powi(6)).unwrap();
        assert!(close(v, PI / 63.0, 1e-12));
        // the piecewise-linear interpolant is only second-order accurate
        let v = weighted_integral(&u, 2.0).unwrap();
        assert!(close(v, PI / 63.0, 1e-3));
    }

    #[test]
    fn singular_weight_rejected() {
        let g = make_grid(16, 1.0).unwrap();
        assert!(matches!(
            weighted_integral_fn(&g, -1.0, |_| 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            weighted_integral_fn(&g, 2.0, |r| 1.0 / r),
            Err(Error::InvalidInput(_))
        ));
        assert!(RadialFunction::from_fn(g, |r| 1.0 / r).is_err());
    }

    #[test]
    fn h1_of_linear_profile() {
        let g = make_grid(37, 1.7).unwrap();
        let u = RadialFunction::from_fn(g.clone(), |r| 1.0 - r).unwrap();
        assert!(close(h1_norm_sq(&u), 4.0 * PI / 3.0, 1e-13));
        assert_eq!(h1_norm_sq(&RadialFunction::zeros(g)), 0.0);
    }

    #[test]
    fn h1_eigenfunction_oracle() {
        // u = sin(πr)/r: ‖u‖² = π² ‖u‖²_{L²} = π² · 2π
        let g = make_grid(2048, 2.0).unwrap();
        let f = |r: f64| if r == 0.0 { PI } else { (PI * r).sin() / r };
        let u = RadialFunction::from_fn(g.clone(), f).unwrap();
        let l2 = weighted_integral_fn(&g, 2.0, |r| f(r) * f(r)).unwrap();
        assert!(close(l2, 2.0 * PI, 1e-10));
        assert!(close(h1_norm_sq(&u), 2.0 * PI.powi(3), 1e-5));
    }

    #[test]
    fn weighted_norms_of_linear_profile() {
        let g = make_grid(1024, 2.0).unwrap();
        let u = RadialFunction::from_fn(g, |r| 1.0 - r).unwrap();
        // Gauss points evaluate |u_h|^p exactly for linear u_h
        let l2 = lp_weighted_norm(&u, 2.0, 0.0).unwrap();
        assert!(close(l2, (2.0 * PI / 15.0).sqrt(), 1e-12));
        let l6 = lp_weighted_norm(&u, 6.0, 0.0).unwrap();
        assert!(close(l6, (PI / 63.0).powf(1.0 / 6.0), 1e-12));
        assert!(matches!(lp_weighted_norm(&u, 0.5, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(lp_weighted_norm(&u, 2.0, -2.0), Err(Error::InvalidArgument(_))));
        let zero = u.scaled(0.0);
        assert_eq!(lp_weighted_norm(&zero, 3.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn quadrature_converges_at_second_order_on_graded_grids() {
        // g(r) = r^{1/2}(1 - r) against r^{1/2}: exact ω₃/6
        let exact = OMEGA3 / 6.0;
        let mut errs = Vec::new();
        for n in [32, 64, 128, 256, 512] {
            let g = make_grid(n, 2.0).unwrap();
            let u = RadialFunction::from_fn(g, |r| r.sqrt() * (1.0 - r)).unwrap();
            errs.push((weighted_integral(&u, 0.5).unwrap() - exact).abs());
        }
        for w in errs.windows(2) {
            assert!(w[0] / w[1] > 3.8, "{errs:?}");
        }
    }

    #[test]
    fn stiffness_solve_inverts_apply() {
        let g = make_grid(300, 2.0).unwrap();
        let u = RadialFunction::from_fn(g.clone(), |r| (3.0 * r).cos() * (1.0 - r * r)).unwrap();
        let ku = g.apply_stiffness(u.values());
        let x = g.solve_stiffness(&ku).unwrap();
        for (a, b) in x.iter().zip(u.values()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn refinement_preserves_h1_of_piecewise_linear() {
        // doubling the nodes of a uniform grid keeps a coarse piecewise-linear u exact
        let coarse = make_grid(64, 1.0).unwrap();
        let fine = make_grid(128, 1.0).unwrap();
        let u = RadialFunction::from_fn(coarse, |r| (1.0 - r) * (2.0 + (7.0 * r).sin())).unwrap();
        let v = RadialFunction::from_fn(fine, |r| u.eval(r)).unwrap();
        let (a, b) = (h1_norm_sq(&u), h1_norm_sq(&v));
        assert!(((a - b) / a).abs() < 1e-10);
    }

    #[test]
    fn eval_interpolates() {
        let g = make_grid(10, 1.0).unwrap();
        let u = RadialFunction::from_fn(g, |r| 1.0 - r).unwrap();
        assert!((u.eval(0.55) - 0.45).abs() < 1e-15);
        assert_eq!(u.eval(1.0), 0.0);
        assert_eq!(u.eval(0.0), 1.0);
    }
}
