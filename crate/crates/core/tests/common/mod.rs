#![allow(dead_code)]

use std::sync::Arc;

use kirchhoff_core::extremals::CutoffFamily;
use kirchhoff_core::{NonlinearityModel, ProblemParams, RadialFunction, RadialGrid};
use rand::Rng;

pub fn degenerate() -> ProblemParams {
    ProblemParams {
        a: 0.0,
        b: 1.0,
        mu: 0.0,
        lambda: 1.0,
        alpha1: 0.0,
        alpha2: -0.5,
        beta: 0.0,
    }
}

/// The four parameter sets used for the ground-state checks, one per regime.
pub fn regime_instances() -> [(&'static str, ProblemParams); 4] {
    let base = degenerate();
    [
        ("a=0 mu=0 lambda=1", base),
        ("a=1 mu=0 lambda=100", ProblemParams { a: 1.0, lambda: 100.0, ..base }),
        (
            "a=0 mu=1 alpha1=1 alpha2=0 lambda=100",
            ProblemParams { mu: 1.0, alpha1: 1.0, alpha2: 0.0, lambda: 100.0, ..base },
        ),
        ("a=0 mu=-0.05 alpha2=-0.5 lambda=1", ProblemParams { mu: -0.05, ..base }),
    ]
}

pub fn q5() -> NonlinearityModel {
    NonlinearityModel::new(5.0).unwrap()
}

/// A smooth random radial profile vanishing at `r = 1`: a random cosine series
/// times `1 − r`, plus a randomly concentrated bubble.
pub fn random_profile<R: Rng>(grid: &Arc<RadialGrid>, rng: &mut R) -> RadialFunction {
    let coeffs: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let offset = rng.gen_range(0.5..2.0);
    let bump = rng.gen_range(0.0..1.0);
    let eps = 10f64.powf(rng.gen_range(-2.0..-0.5));
    let bubble = CutoffFamily::new(eps, 0.0).unwrap();
    RadialFunction::from_fn(grid.clone(), |r| {
        let series: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (k as f64 * std::f64::consts::PI * r).cos())
            .sum();
        (1.0 - r) * (offset + 0.5 * series) + bump * bubble.eval(r) * eps.sqrt()
    })
    .unwrap()
}

pub fn max_abs_diff(u: &RadialFunction, v: &RadialFunction) -> f64 {
    u.values()
        .iter()
        .zip(v.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

pub fn max_abs(u: &RadialFunction) -> f64 {
    u.values().iter().map(|a| a.abs()).fold(0.0, f64::max)
}
