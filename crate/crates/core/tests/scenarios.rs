mod common;

use kirchhoff_core::extremals::t_epsilon_bounds;
use kirchhoff_core::sweep::singular_cutoff;
use kirchhoff_core::*;

use common::*;

#[test]
fn h1_norm_unchanged_by_nested_refinement() {
    let coarse = make_grid(64, 2.0).unwrap();
    let fine = make_grid(128, 2.0).unwrap();
    let u = RadialFunction::from_fn(coarse, |r| (1.0 - r) * (2.0 + (5.0 * r).sin())).unwrap();
    let v = RadialFunction::from_fn(fine, |r| u.eval(r)).unwrap();
    let (a, b) = (h1_norm_sq(&u), h1_norm_sq(&v));
    assert!((a - b).abs() < 1e-10 * a, "{a} vs {b}");
}

#[test]
fn t_epsilon_stays_bracketed_for_small_epsilon() {
    let f = Functional::new(make_grid(1024, 2.0).unwrap(), degenerate(), q5()).unwrap();
    let rep = t_epsilon_bounds(&f, &[0.2, 0.1, 0.05, 0.02]).unwrap();
    let (lo, hi) = rep.bracket.unwrap();
    assert!(lo > 0.0 && hi.is_finite() && lo <= hi);
    assert!(rep.entries.iter().all(|e| e.t >= lo && e.t <= hi));
    // too large for the asymptotic regime: computed, but no bracket claimed
    let wide = t_epsilon_bounds(&f, &[0.5, 0.2]).unwrap();
    assert_eq!(wide.entries.len(), 2);
    assert!(wide.bracket.is_none());
}

#[test]
fn concentrated_bubbles_fall_below_threshold_on_fine_grid() {
    let f = Functional::new(make_grid(4096, 3.0).unwrap(), degenerate(), q5()).unwrap();
    let rep = t_epsilon_bounds(&f, &[1e-3, 3e-4, 1e-4]).unwrap();
    assert!(rep.entries.iter().any(|e| e.below_threshold), "{rep:?}");
}

#[test]
fn degenerate_ground_state_from_linear_profile() {
    let f = Functional::new(make_grid(1024, 2.0).unwrap(), degenerate(), q5()).unwrap();
    let init = InitProfile::OneMinusR.build(&f).unwrap();
    let gs = ground_state_search(&f, &init, &SearchOptions::default()).unwrap();
    assert!(gs.converged, "residual {} after {}", gs.dual_residual, gs.iterations);
    let tr = threshold_for(&degenerate()).unwrap();
    let cmp = compare_report(&gs, &tr).unwrap();
    assert!(cmp.below && cmp.margin > 0.0, "{} vs {}", gs.level_m, tr.level);
    for w in gs.energy_trace.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12));
    }
}

#[test]
fn mountain_pass_maximum_bounds_ground_level() {
    let (_, p) = regime_instances()[1];
    let f = Functional::new(make_grid(512, 2.0).unwrap(), p, q5()).unwrap();
    let init = InitProfile::OneMinusR.build(&f).unwrap();
    let gs = ground_state_search(&f, &init, &SearchOptions::default()).unwrap();
    let mp = mountain_pass_search(&f, &MountainPassOptions::default()).unwrap();
    assert!(mp.endpoint_energy < 0.0);
    assert!(mp.path[0].is_zero());
    assert!(mp.level_cstar >= gs.level_m * (1.0 - 1e-9));
    assert!((mp.level_cstar - gs.level_m).abs() < 1e-2 * gs.level_m);
    let top = mp.path_energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(mp.level_cstar >= top * (1.0 - 1e-12));
}

#[test]
fn geometry_holds_with_positive_second_term() {
    let (_, p) = regime_instances()[2];
    let f = Functional::new(make_grid(512, 2.0).unwrap(), p, q5()).unwrap();
    let g = verify_mp_geometry(&f).unwrap();
    assert!(g.ok, "{}", g.message);
    assert!(g.kappa.unwrap() > 0.0 && g.rho.unwrap() > 0.0);
}

#[test]
fn sweep_over_four_lambdas() {
    let f = Functional::new(make_grid(1024, 2.0).unwrap(), degenerate(), q5()).unwrap();
    let v0 = singular_cutoff(f.grid().clone(), 0.25).unwrap();
    let rep = lambda_sweep(&f, &v0, &[1.0, 10.0, 100.0, 1000.0]).unwrap();
    assert!(rep.strictly_decreasing && rep.all_below_bound);
    let energies: Vec<f64> = rep.rows.iter().map(|r| r.fiber_energy).collect();
    assert!(energies.windows(2).all(|w| w[1] < w[0]));
    let err = lambda_sweep(&f, &v0, &[0.0, 1.0]).unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(_)));
}

#[test]
fn reference_mode_stays_above_threshold() {
    let p = ProblemParams { lambda: 0.0, ..degenerate() };
    let f = Functional::new(make_grid(512, 2.0).unwrap(), p, q5()).unwrap();
    let init = InitProfile::Bubble { epsilon: 0.05 }.build(&f).unwrap();
    let opts = SearchOptions { max_iters: 200, ..Default::default() };
    let gs = ground_state_search(&f, &init, &opts).unwrap();
    assert!(!gs.converged && gs.reference_mode);
    let cmp = compare_report(&gs, &threshold_for(&p).unwrap()).unwrap();
    assert!(!cmp.below && cmp.margin < 0.0);
}

#[test]
fn comparison_rejects_mismatched_inputs() {
    let f = Functional::new(make_grid(128, 2.0).unwrap(), regime_instances()[1].1, q5()).unwrap();
    let init = InitProfile::OneMinusR.build(&f).unwrap();
    let gs = ground_state_search(&f, &init, &SearchOptions::default()).unwrap();
    let other = ProblemParams { alpha1: 0.5, ..*f.params() };
    let tr = threshold_for(&other).unwrap();
    assert!(matches!(compare_report(&gs, &tr), Err(Error::InvalidArgument(_))));
}

#[test]
fn negative_mu_uses_single_term_level() {
    let (_, p) = regime_instances()[3];
    let tr = threshold_for(&p).unwrap();
    assert_eq!(tr.regime, Regime::MuNegative);
    assert_eq!(tr.level, threshold_single(0.0, 0.0, 1.0).unwrap().level);
}

#[test]
fn critical_embedding_estimate_sits_above_best_constant() {
    let grid = make_grid(512, 2.0).unwrap();
    let est = estimate_embedding_constant(6.0, 0.0, &grid, 200, 1e-10).unwrap();
    let s0 = best_constant(0.0).unwrap();
    assert!(est.estimate > s0 && est.estimate < 1.5 * s0, "{}", est.estimate);
    assert!(estimate_embedding_constant(7.0, 0.0, &grid, 10, 1e-10).is_err());
}
