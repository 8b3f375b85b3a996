//! Mountain-pass level by deforming a discrete path from the origin to a
//! negative-energy endpoint (a simplified string method).
//!
//! Interior images take independent Armijo steps against the Riesz gradient,
//! then the path is truncated at the first negative-energy image past its peak
//! and redistributed at equal H¹ arclength. The path starts at `0`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::functional::Functional;
use crate::ground_state::{InitProfile, ARMIJO_C};
use crate::radial::{h1_norm_sq, RadialFunction};

const TRUST: f64 = 0.1;
/// Sweeps without a relative drop of `tol` in the best path maximum before stopping.
pub const PATIENCE: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MountainPassOptions {
    pub path_points: usize,
    pub max_iters: usize,
    /// Relative improvement of the best path maximum that resets the patience counter.
    pub tol: f64,
    pub init: InitProfile,
}

impl Default for MountainPassOptions {
    fn default() -> Self {
        MountainPassOptions {
            path_points: 32,
            max_iters: 2000,
            tol: 1e-6,
            init: InitProfile::OneMinusR,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MountainPassResult {
    pub path: Vec<RadialFunction>,
    pub path_energies: Vec<f64>,
    pub level_cstar: f64,
    pub endpoint_energy: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Scales the Nehari projection of `init` by 2, 4, 8, ... until the energy is negative.
pub fn negative_endpoint(functional: &Functional, init: &RadialFunction) -> Result<RadialFunction> {
    let base = functional.project(init)?.projected;
    let mut t = 2.0;
    for _ in 0..60 {
        let w = base.scaled(t);
        if functional.energy(&w)?.total < 0.0 {
            return Ok(w);
        }
        t *= 2.0;
    }
    Err(Error::Geometry(
        "no negative-energy point found along the initial ray".into(),
    ))
}

fn reparametrize(path: &[RadialFunction], count: usize) -> Result<Vec<RadialFunction>> {
    let mut arc = vec![0.0];
    for w in path.windows(2) {
        let d = w[1].combine(1.0, &w[0], -1.0)?;
        arc.push(arc.last().unwrap() + h1_norm_sq(&d).sqrt());
    }
    let total = *arc.last().unwrap();
    if !(total > 0.0) {
        return Err(Error::Geometry("path collapsed to a point".into()));
    }
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for i in 0..count {
        let s = total * i as f64 / (count - 1) as f64;
        if i == 0 {
            out.push(path[0].clone());
            continue;
        }
        if i == count - 1 {
            out.push(path[path.len() - 1].clone());
            continue;
        }
        while seg + 1 < arc.len() - 1 && arc[seg + 1] < s {
            seg += 1;
        }
        let len = arc[seg + 1] - arc[seg];
        let w = if len > 0.0 { (s - arc[seg]) / len } else { 0.0 };
        out.push(path[seg].combine(1.0 - w, &path[seg + 1], w)?);
    }
    Ok(out)
}

/// Golden-section maximum of `Φ` on the segment `[u, v]`.
fn segment_max(functional: &Functional, u: &RadialFunction, v: &RadialFunction) -> Result<f64> {
    let phi = |s: f64| -> Result<f64> { Ok(functional.energy(&u.combine(1.0 - s, v, s)?)?.total) };
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = phi(c)?;
    let mut fd = phi(d)?;
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = phi(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = phi(d)?;
        }
        if b - a < 1e-7 {
            break;
        }
    }
    Ok(phi(0.0)?.max(phi(1.0)?).max(fc).max(fd))
}

/// Largest energy on the polyline near its highest image.
fn refined_peak(functional: &Functional, path: &[RadialFunction], energies: &[f64]) -> Result<f64> {
    let n = path.len();
    let peak = (0..n)
        .max_by(|&a, &b| energies[a].total_cmp(&energies[b]))
        .unwrap();
    let mut level = energies[peak];
    if peak > 0 {
        level = level.max(segment_max(functional, &path[peak - 1], &path[peak])?);
    }
    if peak + 1 < n {
        level = level.max(segment_max(functional, &path[peak], &path[peak + 1])?);
    }
    Ok(level)
}

fn path_energies(functional: &Functional, path: &[RadialFunction]) -> Result<Vec<f64>> {
    path.iter()
        .map(|u| functional.energy(u).map(|e| e.total))
        .collect()
}

/// Deforms the segment from `0` to a negative-energy endpoint and returns the
/// path with the lowest refined maximum seen.
///
/// The search stops once that best maximum has not dropped by more than
/// `tol` (relative) for [`PATIENCE`] sweeps.
pub fn mountain_pass_search(
    functional: &Functional,
    opts: &MountainPassOptions,
) -> Result<MountainPassResult> {
    if !(functional.params().lambda > 0.0) {
        return Err(invalid("mountain-pass search requires lambda > 0"));
    }
    if opts.path_points < 4 {
        return Err(invalid("path needs at least 4 points"));
    }
    let n = opts.path_points;
    let init = opts.init.build(functional)?;
    let omega = negative_endpoint(functional, &init)?;
    let zero = RadialFunction::zeros(functional.grid().clone());
    let mut path: Vec<RadialFunction> = (0..n)
        .map(|i| omega.scaled(i as f64 / (n - 1) as f64))
        .collect();
    let mut steps = vec![1.0_f64; n];
    let mut energies = path_energies(functional, &path)?;
    let mut best_level = refined_peak(functional, &path, &energies)?;
    let mut best = (path.clone(), energies.clone());
    let mut since_improvement = 0;
    let mut iterations = 0;
    let mut converged = false;

    for it in 1..=opts.max_iters {
        iterations = it;
        let peak = (0..n)
            .max_by(|&a, &b| energies[a].total_cmp(&energies[b]))
            .unwrap();
        let last = (peak + 1..n).find(|&j| energies[j] < 0.0).unwrap_or(n - 1);
        for i in 1..last.min(n - 1) {
            let (g, res) = functional.gradient_and_residual(&path[i])?;
            if res == 0.0 {
                continue;
            }
            // trust region: move each image by at most a tenth of its norm
            let cap = TRUST * h1_norm_sq(&path[i]).sqrt() / res;
            let mut trial = (2.0 * steps[i]).min(cap);
            for _ in 0..50 {
                let v = path[i].combine(1.0, &g, -trial)?;
                let e = functional.energy(&v)?.total;
                if e <= energies[i] - ARMIJO_C * trial * res * res {
                    path[i] = v;
                    energies[i] = e;
                    steps[i] = trial;
                    break;
                }
                trial *= 0.5;
            }
        }

        let peak = (0..n)
            .max_by(|&a, &b| energies[a].total_cmp(&energies[b]))
            .unwrap();
        let end = (peak + 1..n).find(|&j| energies[j] < 0.0).unwrap_or(n - 1);
        path.truncate(end + 1);
        path[0] = zero.clone();
        path = reparametrize(&path, n)?;
        energies = path_energies(functional, &path)?;
        if energies[n - 1] >= 0.0 {
            return Err(Error::Geometry("path endpoint lost negative energy".into()));
        }
        let level = refined_peak(functional, &path, &energies)?;
        if level < best_level - opts.tol * best_level.abs().max(1.0) {
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        if level < best_level {
            best_level = level;
            best = (path.clone(), energies.clone());
        }
        if since_improvement >= PATIENCE {
            converged = true;
            break;
        }
    }

    let (path, energies) = best;
    Ok(MountainPassResult {
        endpoint_energy: energies[n - 1],
        path,
        path_energies: energies,
        level_cstar: best_level,
        iterations,
        converged,
    })
}

/// Result of scanning spheres `‖u‖ = ρ` for the mountain-pass ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    /// Radius with the largest certified minimum over probes, if any is positive.
    pub rho: Option<f64>,
    pub kappa: Option<f64>,
    /// Norm of a point with negative energy, if one was found.
    pub omega_norm: Option<f64>,
    pub ok: bool,
    pub message: String,
}

/// Fixed probe directions, normalised in H¹.
pub fn probe_directions(functional: &Functional) -> Result<Vec<RadialFunction>> {
    let grid = functional.grid().clone();
    let alpha1 = functional.params().alpha1;
    let mut out = Vec::new();
    let mut push = |u: RadialFunction| {
        let n = h1_norm_sq(&u).sqrt();
        if n > 0.0 {
            out.push(u.scaled(1.0 / n));
        }
    };
    push(RadialFunction::from_fn(grid.clone(), |r| 1.0 - r)?);
    push(RadialFunction::from_fn(grid.clone(), |r| 1.0 - r * r)?);
    push(RadialFunction::from_fn(grid.clone(), |r| {
        let x = std::f64::consts::PI * r;
        if x == 0.0 {
            1.0
        } else {
            x.sin() / x
        }
    })?);
    push(RadialFunction::from_fn(grid.clone(), |r| (1.0 - r).powi(3))?);
    for eps in [0.2, 0.05, 0.01] {
        push(crate::extremals::CutoffFamily::new(eps, alpha1)?.on_grid(grid.clone())?);
    }
    Ok(out)
}

/// Scans `ρ` over a log grid and reports the mountain-pass ring and a negative-energy point.
pub fn verify_mp_geometry(functional: &Functional) -> Result<GeometryReport> {
    let probes = probe_directions(functional)?;
    let mut best: Option<(f64, f64)> = None;
    let mut omega_norm = None;
    let count = 241;
    for i in 0..count {
        let rho = 10f64.powf(-6.0 + 12.0 * i as f64 / (count - 1) as f64);
        let mut worst = f64::INFINITY;
        for p in &probes {
            let e = functional.energy(&p.scaled(rho))?.total;
            worst = worst.min(e);
            if e < 0.0 && omega_norm.is_none() {
                omega_norm = Some(rho);
            }
        }
        if worst > 0.0 && best.is_none_or(|(_, k)| worst > k) {
            best = Some((rho, worst));
        }
    }
    let ok = best.is_some() && omega_norm.is_some();
    let message = match (best, omega_norm) {
        (Some((r, k)), Some(w)) => format!("ring at rho = {r:e} with kappa = {k:e}; negative energy at norm {w:e}"),
        (None, _) => "no sphere with positive minimum energy over the probes".into(),
        (_, None) => "no negative-energy point found up to norm 1e6".into(),
    };
    Ok(GeometryReport {
        rho: best.map(|b| b.0),
        kappa: best.map(|b| b.1),
        omega_norm,
        ok,
        message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{NonlinearityModel, ProblemParams};
    use crate::radial::make_grid;

    fn functional(lambda: f64) -> Functional {
        let p = ProblemParams {
            a: 0.0,
            b: 1.0,
            mu: 0.0,
            lambda,
            alpha1: 0.0,
            alpha2: -0.5,
            beta: 0.0,
        };
        Functional::new(make_grid(256, 2.0).unwrap(), p, NonlinearityModel::new(5.0).unwrap())
            .unwrap()
    }

    #[test]
    fn endpoint_has_negative_energy() {
        let f = functional(1.0);
        let init = InitProfile::OneMinusR.build(&f).unwrap();
        let w = negative_endpoint(&f, &init).unwrap();
        assert!(f.energy(&w).unwrap().total < 0.0);
    }

    #[test]
    fn geometry_ring_exists() {
        for lambda in [1.0, 1e8] {
            let rep = verify_mp_geometry(&functional(lambda)).unwrap();
            assert!(rep.ok, "{}", rep.message);
            assert!(rep.kappa.unwrap() > 0.0);
        }
        let small = verify_mp_geometry(&functional(1e8)).unwrap().rho.unwrap();
        let big = verify_mp_geometry(&functional(1.0)).unwrap().rho.unwrap();
        assert!(small < big);
    }

    #[test]
    fn requires_positive_lambda() {
        let f = functional(0.0);
        assert!(mountain_pass_search(&f, &MountainPassOptions::default()).is_err());
    }
}
