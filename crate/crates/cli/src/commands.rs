use std::sync::Arc;
use std::time::Instant;

use kirchhoff_core::extremals::{default_pde_radii, CutoffFamily};
use kirchhoff_core::sweep::singular_cutoff;
use kirchhoff_core::{
    best_constant, check_assumptions, compare_report, cutoff_asymptotics, ground_state_search,
    mountain_pass_search, rayleigh_quotient, threshold_for, verify_extremal_pde, AssumptionReport,
    Functional, GridSpec, GroundStateResult, InitProfile, RadialFunction, RadialGrid, Regime,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{apply_override, RunConfig};
use crate::error::CliError;
use crate::report::{csv_string, Cell};

/// Results and diagnostics of one command. A failure still carries whatever
/// was computed, so the report can be written before exiting nonzero.
pub struct Outcome {
    pub results: Value,
    pub diagnostics: Value,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(results: Value, diagnostics: Value) -> Self {
        Outcome {
            results,
            diagnostics,
            failure: None,
        }
    }
}

pub fn constants(alphas: &[f64], radius: f64, per_decade: usize) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    for &alpha in alphas {
        let closed = best_constant(alpha)?;
        let q = rayleigh_quotient(alpha, 1.0, radius, per_decade)?;
        rows.push(json!({
            "alpha": alpha,
            "closed_form": closed,
            "quadrature": q.quotient,
            "truncated": q.truncated,
            "tail_bound": q.tail_bound,
            "relative_gap": (q.quotient - closed).abs() / closed,
        }));
    }
    Ok(Outcome::ok(
        Value::Array(rows),
        json!({"radius": radius, "panels_per_decade": per_decade}),
    ))
}

pub fn extremal_verify(alphas: &[f64], points: usize) -> Result<Outcome, CliError> {
    let radii = default_pde_radii(points);
    let mut rows = Vec::new();
    for &alpha in alphas {
        let res = verify_extremal_pde(alpha, &radii)?;
        rows.push(json!({"alpha": alpha, "max_relative_residual": res, "pass": res < 1e-6}));
    }
    Ok(Outcome::ok(
        Value::Array(rows),
        json!({"radii": {"min": 1e-2, "max": 1e2, "count": radii.len()}}),
    ))
}

pub fn asymptotics(
    alpha1: f64,
    alpha2: Option<f64>,
    eps: &[f64],
    grid: GridSpec,
) -> Result<Outcome, CliError> {
    let g = grid.build()?;
    let rep = cutoff_asymptotics(alpha1, alpha2, eps, &g)?;
    Ok(Outcome::ok(to_value(&rep)?, json!({"grid": grid})))
}

/// Named test directions for the `nehari` command.
pub enum Direction {
    OneMinusR,
    Bubble(f64),
    BubbleScan,
    SingularCutoff(f64),
    Random,
}

impl Direction {
    pub fn parse(name: &str, epsilon: f64, k: f64) -> Result<Self, CliError> {
        Ok(match name {
            "one-minus-r" => Direction::OneMinusR,
            "bubble" => Direction::Bubble(epsilon),
            "bubble-scan" => Direction::BubbleScan,
            "singular-cutoff" => Direction::SingularCutoff(k),
            "random" => Direction::Random,
            other => {
                return Err(CliError::Validation(format!(
                    "unknown direction '{other}' (one-minus-r, bubble, bubble-scan, singular-cutoff, random)"
                )))
            }
        })
    }

    fn build(&self, f: &Functional, seed: u64) -> Result<RadialFunction, CliError> {
        Ok(match *self {
            Direction::OneMinusR => InitProfile::OneMinusR.build(f)?,
            Direction::Bubble(epsilon) => InitProfile::Bubble { epsilon }.build(f)?,
            Direction::BubbleScan => InitProfile::BubbleScan.build(f)?,
            Direction::SingularCutoff(k) => singular_cutoff(f.grid().clone(), k)?,
            Direction::Random => random_direction(f.grid(), seed)?,
        })
    }
}

/// Cosine series times `1 − r` plus a cut-off bubble, all drawn from a seeded stream.
fn random_direction(grid: &Arc<RadialGrid>, seed: u64) -> Result<RadialFunction, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let offset = rng.gen_range(0.5..2.0);
    let weight = rng.gen_range(0.0..1.0);
    let eps: f64 = 10f64.powf(rng.gen_range(-2.0..-0.5));
    let bubble = CutoffFamily::new(eps, 0.0)?;
    Ok(RadialFunction::from_fn(grid.clone(), |r| {
        let s: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (k as f64 * std::f64::consts::PI * r).cos())
            .sum();
        (1.0 - r) * (offset + 0.5 * s) + weight * eps.sqrt() * bubble.eval(r)
    })?)
}

fn functional(cfg: &RunConfig) -> Result<Functional, CliError> {
    Ok(Functional::new(cfg.grid.build()?, cfg.params, cfg.nonlinearity)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Internal(e.to_string()))
}

pub fn nehari(cfg: &RunConfig, dir: &Direction) -> Result<Outcome, CliError> {
    let f = functional(cfg)?;
    let u = dir.build(&f, cfg.seed)?;
    let res = f.project(&u)?;
    let e = f.energy(&res.projected)?;
    Ok(Outcome::ok(
        json!({
            "t_u": res.t_u,
            "fiber_energy": res.fiber_energy,
            "root_bracket": [res.root_bracket.0, res.root_bracket.1],
            "unique": res.unique,
            "membership_residual": res.membership_residual,
            "energy": e,
        }),
        json!({"seed": cfg.seed, "regime": Regime::infer(&cfg.params)}),
    ))
}

/// Runs the assumption checks and decides whether the solver may proceed.
fn gate(cfg: &RunConfig, reference_mode: bool, force: bool) -> Result<AssumptionReport, CliError> {
    let p = &cfg.params;
    if p.lambda == 0.0 && !reference_mode {
        return Err(CliError::Assumption(
            "lambda = 0 is only accepted with --reference-mode".into(),
        ));
    }
    if reference_mode && p.lambda != 0.0 {
        return Err(CliError::Validation("--reference-mode requires lambda = 0".into()));
    }
    let report = check_assumptions(p, &cfg.nonlinearity, Regime::infer(p));
    if !report.ok() && !force && !reference_mode {
        let conditions: Vec<String> = report
            .conditions
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{}: {}", c.name, c.message))
            .collect();
        return Err(CliError::Assumption(format!(
            "{} (rows: {})",
            conditions.join("; "),
            report.failures().join("; ")
        )));
    }
    Ok(report)
}

fn gs_value(gs: &GroundStateResult, profile: bool) -> Value {
    let mut v = json!({
        "level_m": gs.level_m,
        "dual_residual": gs.dual_residual,
        "relative_residual": gs.relative_residual(),
        "iterations": gs.iterations,
        "converged": gs.converged,
        "reference_mode": gs.reference_mode,
    });
    if profile {
        v["minimizer"] = json!({
            "r": gs.minimizer.grid().nodes(),
            "u": gs.minimizer.values(),
        });
    }
    v
}

fn gs_failure(gs: &GroundStateResult) -> Option<CliError> {
    (!gs.converged && !gs.reference_mode).then(|| {
        CliError::NonConvergence(format!(
            "dual residual {:e} after {} iterations",
            gs.dual_residual, gs.iterations
        ))
    })
}

pub struct SolveFlags {
    pub reference_mode: bool,
    pub force: bool,
    pub skip_mountain_pass: bool,
    pub profile: bool,
}

pub fn solve(cfg: &RunConfig, flags: &SolveFlags) -> Result<Outcome, CliError> {
    let assumptions = gate(cfg, flags.reference_mode, flags.force)?;
    let f = functional(cfg)?;
    let start = Instant::now();
    let init = cfg.init_profile().build(&f)?;
    let gs = ground_state_search(&f, &init, &cfg.search_options())?;
    let gs_seconds = start.elapsed().as_secs_f64();
    let mut results = json!({"ground_state": gs_value(&gs, flags.profile)});
    let mut diagnostics = json!({
        "assumptions": to_value(&assumptions)?,
        "ground_state_seconds": gs_seconds,
    });
    let mut failure = gs_failure(&gs);
    if !flags.reference_mode && !flags.skip_mountain_pass {
        let start = Instant::now();
        let mp = mountain_pass_search(&f, &cfg.mountain_pass_options())?;
        diagnostics["mountain_pass_seconds"] = json!(start.elapsed().as_secs_f64());
        let agreement = (mp.level_cstar - gs.level_m).abs() / gs.level_m.abs();
        results["mountain_pass"] = json!({
            "level_cstar": mp.level_cstar,
            "endpoint_energy": mp.endpoint_energy,
            "path_energies": mp.path_energies,
            "iterations": mp.iterations,
            "converged": mp.converged,
        });
        results["agreement"] = json!({"relative_gap": agreement, "within_1e-2": agreement < 1e-2});
        if failure.is_none() && !mp.converged {
            failure = Some(CliError::NonConvergence(format!(
                "mountain pass stopped after {} sweeps",
                mp.iterations
            )));
        }
    }
    Ok(Outcome {
        results,
        diagnostics,
        failure,
    })
}

pub fn threshold(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tr = threshold_for(&cfg.params)?;
    let mut diagnostics = json!({});
    if let (Some(nb), Some(nt), None) = (tr.nu_bar, tr.nu_tilde, tr.mu_scaling) {
        let (r1, r2) = kirchhoff_core::thresholds::nu_residuals(
            cfg.params.alpha1,
            cfg.params.alpha2,
            cfg.params.a,
            cfg.params.b,
            (nb, nt),
        )?;
        diagnostics["nu_residuals"] = json!([r1, r2]);
    }
    Ok(Outcome::ok(to_value(&tr)?, diagnostics))
}

pub fn compare(cfg: &RunConfig, reference_mode: bool, force: bool) -> Result<Outcome, CliError> {
    let assumptions = gate(cfg, reference_mode, force)?;
    let f = functional(cfg)?;
    let init = cfg.init_profile().build(&f)?;
    let gs = ground_state_search(&f, &init, &cfg.search_options())?;
    let tr = threshold_for(&cfg.params)?;
    let cmp = compare_report(&gs, &tr)?;
    Ok(Outcome {
        results: json!({
            "below": cmp.below,
            "margin": cmp.margin,
            "level_m": gs.level_m,
            "threshold": tr.level,
            "ground_state": gs_value(&gs, false),
        }),
        diagnostics: json!({"assumptions": to_value(&assumptions)?}),
        failure: gs_failure(&gs),
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Metric {
    /// Ground-state level against the threshold.
    Level,
    /// Nehari scaling of a fixed direction.
    Scaling,
}

pub struct SweepArgs<'a> {
    pub base: &'a Value,
    pub vary: &'a str,
    pub values: &'a [f64],
    pub jobs: usize,
    pub metric: Metric,
    pub direction: &'a Direction,
    pub force: bool,
    pub skip_mountain_pass: bool,
}

struct PointResult {
    cells: Vec<Cell>,
    below: Option<bool>,
    error: Option<CliError>,
}

fn sweep_point(args: &SweepArgs, value: f64) -> PointResult {
    let failed = |e: CliError| PointResult {
        cells: vec![
            Cell::Num(value),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ],
        below: None,
        error: Some(e),
    };
    let cfg = (|| {
        let mut v = args.base.clone();
        apply_override(&mut v, args.vary, &value.to_string())?;
        RunConfig::from_value(v)
    })();
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => return failed(e),
    };
    let run = || -> Result<PointResult, CliError> {
        let f = functional(&cfg)?;
        let tr = threshold_for(&cfg.params)?;
        match args.metric {
            Metric::Scaling => {
                let u = args.direction.build(&f, cfg.seed)?;
                let res = f.project(&u)?;
                let below = res.fiber_energy < tr.level;
                Ok(PointResult {
                    cells: vec![
                        Cell::Num(value),
                        Cell::Num(res.t_u),
                        Cell::Empty,
                        Cell::Num(tr.level),
                        Cell::Bool(below),
                        Cell::Num(res.membership_residual),
                        Cell::Empty,
                    ],
                    below: Some(below),
                    error: None,
                })
            }
            Metric::Level => {
                gate(&cfg, false, args.force)?;
                let init = cfg.init_profile().build(&f)?;
                let gs = ground_state_search(&f, &init, &cfg.search_options())?;
                let cstar = if args.skip_mountain_pass {
                    Cell::Empty
                } else {
                    Cell::Num(mountain_pass_search(&f, &cfg.mountain_pass_options())?.level_cstar)
                };
                let below = compare_report(&gs, &tr)?.below;
                Ok(PointResult {
                    cells: vec![
                        Cell::Num(value),
                        Cell::Num(gs.level_m),
                        cstar,
                        Cell::Num(tr.level),
                        Cell::Bool(below),
                        Cell::Num(gs.dual_residual),
                        Cell::Int(gs.iterations),
                    ],
                    below: Some(below),
                    error: gs_failure(&gs),
                })
            }
        }
    };
    run().unwrap_or_else(failed)
}

/// Evaluates every sweep point (concurrently, up to `jobs`) and returns the CSV
/// text together with a JSON summary.
pub fn sweep(args: &SweepArgs) -> Result<(String, Outcome), CliError> {
    if args.values.is_empty() {
        return Err(CliError::Validation("--values is empty".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let points: Vec<PointResult> =
        pool.install(|| args.values.par_iter().map(|&v| sweep_point(args, v)).collect());

    let second = match args.metric {
        Metric::Level => "level_m",
        Metric::Scaling => "t_u",
    };
    let header = [args.vary, second, "level_cstar", "threshold", "below", "residual", "iterations"];
    let mut rows = Vec::with_capacity(points.len());
    let mut errors = Vec::new();
    let mut failure: Option<CliError> = None;
    let below: Vec<f64> = args
        .values
        .iter()
        .zip(&points)
        .filter(|(_, p)| p.below == Some(true))
        .map(|(v, _)| *v)
        .collect();
    for (value, p) in args.values.iter().zip(points) {
        if let Some(e) = p.error {
            errors.push(json!({"value": value, "error": e.to_string()}));
            if failure.as_ref().is_none_or(|f| e.exit_code() > f.exit_code()) {
                failure = Some(e);
            }
        }
        rows.push(p.cells);
    }
    let csv = csv_string(&header, &rows)?;
    let min_below = below.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_below = below.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let results = json!({
        "vary": args.vary,
        "values": args.values,
        "below_count": below.len(),
        "smallest_value_below": below.first().map(|_| min_below),
        "largest_value_below": below.first().map(|_| max_below),
    });
    Ok((
        csv,
        Outcome {
            results,
            diagnostics: json!({"errors": errors, "jobs": args.jobs}),
            failure,
        },
    ))
}
