//! Fixtures shared by the criterion benchmarks in `benches/`.

use kirchhoff_core::{make_grid, Functional, NonlinearityModel, ProblemParams, RadialFunction};

/// Degenerate single-critical-term problem on an `n`-cell grid, with the
/// profile `1 − r` as the evaluation point.
pub fn fixture(n: usize) -> (Functional, RadialFunction) {
    let params = ProblemParams {
        a: 0.0,
        b: 1.0,
        mu: 0.0,
        lambda: 1.0,
        alpha1: 0.0,
        alpha2: -0.5,
        beta: 0.0,
    };
    let grid = make_grid(n, 2.0).expect("valid grid");
    let nl = NonlinearityModel::new(5.0).expect("valid exponent");
    let f = Functional::new(grid.clone(), params, nl).expect("valid parameters");
    let u = RadialFunction::from_fn(grid, |r| 1.0 - r).expect("finite profile");
    (f, u)
}
