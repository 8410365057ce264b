//! Newton iteration `f <- f + M_f(target - D(f))` realizing a target
//! structure near an induced one, on a periodic chart.
//!
//! Iterates are trigonometric maps: after each pointwise inversion the
//! correction field is replaced by its exact trigonometric interpolant, so
//! exact 2-jets are available at every step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freeness::{certify_free, perturb_trig_to_free, random_trig_map, DEFAULT_TOL_RANK};
use crate::dims::{sym2_count, sym3_count};
use crate::invert::invert_field;
use crate::krylov::gmres;
use crate::linearize::apply_l;
use crate::jet::{Chart, Grid, JetField};
use crate::maps::{sample_jets, SmoothMap, TrigMap};
use crate::pullback::pullback_field;
use crate::structure::StatStructure;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Sup-norm over packed `(g, T)` components.
    pub tol_residual: f64,
    /// Fraction of Fourier modes kept after each step; 1 keeps all.
    pub smoothing_cutoff: f64,
    pub step_damping: f64,
    pub tol_rank: f64,
    /// Krylov iterations used to correct each step to an exact discrete
    /// Newton step; 0 applies the pointwise inverse alone.
    pub inner_iters: usize,
    /// Relative residual at which the inner Krylov solve stops.
    pub inner_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iters: 20,
            tol_residual: 1e-10,
            smoothing_cutoff: 1.0,
            step_damping: 1.0,
            tol_rank: DEFAULT_TOL_RANK,
            inner_iters: 200,
            inner_tol: 1e-12,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("solve option {what}")));
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if !(self.tol_residual > 0.0) {
            return bad("tol_residual must be positive");
        }
        if !(self.smoothing_cutoff > 0.0 && self.smoothing_cutoff <= 1.0) {
            return bad("smoothing_cutoff must lie in (0, 1]");
        }
        if !(self.step_damping > 0.0 && self.step_damping <= 1.0) {
            return bad("step_damping must lie in (0, 1]");
        }
        if self.inner_iters > 0 && !(self.inner_tol > 0.0 && self.inner_tol < 1.0) {
            return bad("inner_tol must lie in (0, 1)");
        }
        crate::freeness::check_tol(self.tol_rank)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// Residual sup-norm before the step.
    pub residual: f64,
    /// Minimum `sigma_min / sigma_max` over grid points.
    pub sigma_ratio: f64,
    /// Sup-norm of the applied correction (0 on the final row).
    pub step_norm: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub rows: Vec<TraceRow>,
}

impl SolveTrace {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iteration,residual,sigma_ratio,step_norm\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:e},{:e},{:e}\n",
                r.iteration, r.residual, r.sigma_ratio, r.step_norm
            ));
        }
        s
    }

    /// `residual_{k+1} / residual_k^2` for consecutive rows.
    pub fn contraction_constants(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .filter(|w| w[0].residual > 0.0)
            .map(|w| w[1].residual / (w[0].residual * w[0].residual))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    Stalled,
    LostFreeness,
    MaxIters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub map: TrigMap,
    pub trace: SolveTrace,
    pub status: SolveStatus,
    pub iterations: usize,
    /// `sup |D(result) - target|`, re-measured from the returned map.
    pub final_residual: f64,
}

/// `target - D(f)` and its sup-norm.
pub fn residual(f_jets: &JetField, target: &StatStructure) -> Result<(StatStructure, f64)> {
    target.validate()?;
    let diff = target.sub(&pullback_field(f_jets).structure)?;
    let sup = diff.sup_norm();
    Ok((diff, sup))
}

fn chart_of(grid: &Grid) -> Result<Chart> {
    if !grid.is_periodic() {
        return Err(Error::NotPeriodic);
    }
    Ok(Chart::Grid(grid.clone()))
}

/// One Newton step with the given damping.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub map: TrigMap,
    pub step_norm: f64,
    pub min_ratio: f64,
    pub inner_iterations: usize,
}

fn flatten(s: &StatStructure) -> Vec<f64> {
    s.g.iter()
        .zip(&s.t)
        .flat_map(|(g, t)| g.iter().chain(t.iter()).copied())
        .collect()
}

fn unflatten(v: &[f64], n: usize, points: usize) -> StatStructure {
    let (sg, st) = (sym2_count(n), sym3_count(n));
    let mut out = StatStructure::zeros(n, points);
    for (p, chunk) in v.chunks(sg + st).enumerate() {
        out.g[p].copy_from_slice(&chunk[..sg]);
        out.t[p].copy_from_slice(&chunk[sg..]);
    }
    out
}

/// Trigonometric interpolant of `M_f(rhs)` on the grid.
fn correction_map(
    jets: &JetField,
    grid: &Grid,
    rhs: &StatStructure,
    opts: &SolveOptions,
) -> Result<(TrigMap, f64, f64)> {
    let inv = invert_field(jets, rhs, opts.tol_rank)?;
    let map = TrigMap::interpolate(grid, &inv.y.values, opts.smoothing_cutoff)?;
    Ok((map, inv.y.sup_norm(), inv.min_ratio))
}

/// `L(interp(M_f(rhs)))` at the grid nodes, flattened.
fn discrete_image(
    jets: &JetField,
    grid: &Grid,
    rhs: &StatStructure,
    opts: &SolveOptions,
) -> Result<Vec<f64>> {
    let (corr, _, _) = correction_map(jets, grid, rhs, opts)?;
    let y_jets = sample_jets(&SmoothMap::Trig(corr), &jets.chart)?;
    let mut out = Vec::with_capacity(rhs.len() * (rhs.g[0].len() + rhs.t[0].len()));
    for (fj, yj) in jets.jets.iter().zip(&y_jets.jets) {
        let (g, t) = apply_l(fj, yj)?;
        out.extend(g);
        out.extend(t);
    }
    Ok(out)
}

/// `f + damping * interp(M_f(w))` where `w = target - D(f)`, or, with
/// `inner_iters > 0`, `w` solves `L(interp(M_f(w))) = target - D(f)` at
/// the nodes by GMRES, the pointwise inverse acting as right preconditioner.
pub fn newton_step(
    f: &TrigMap,
    grid: &Grid,
    target: &StatStructure,
    opts: &SolveOptions,
) -> Result<Step> {
    opts.validate()?;
    let chart = chart_of(grid)?;
    let jets = sample_jets(&SmoothMap::Trig(f.clone()), &chart)?;
    let (delta, _) = residual(&jets, target)?;
    let (rhs, inner_iterations) = if opts.inner_iters == 0 {
        (delta, 0)
    } else {
        let (n, points) = (delta.n, delta.len());
        let out = gmres(
            |v| discrete_image(&jets, grid, &unflatten(v, n, points), opts),
            &flatten(&delta),
            opts.inner_tol,
            opts.inner_iters,
        )?;
        (unflatten(&out.x, n, points), out.iterations)
    };
    let (correction, y_norm, min_ratio) = correction_map(&jets, grid, &rhs, opts)?;
    Ok(Step {
        map: f.axpy(opts.step_damping, &correction)?,
        step_norm: opts.step_damping * y_norm,
        min_ratio,
        inner_iterations,
    })
}

fn measure(f: &TrigMap, chart: &Chart, target: &StatStructure) -> Result<f64> {
    let jets = sample_jets(&SmoothMap::Trig(f.clone()), chart)?;
    Ok(residual(&jets, target)?.1)
}

/// Newton iteration until the residual drops below `tol_residual`.
///
/// A step that increases the residual is retried once at half damping.
/// Two consecutive non-decreasing residuals end the run as `Stalled`.
pub fn solve_structure(
    f0: &TrigMap,
    grid: &Grid,
    target: &StatStructure,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    opts.validate()?;
    let chart = chart_of(grid)?;
    f0.check_grid(grid)?;
    let mut f = f0.clone();
    let mut trace = SolveTrace::default();
    let mut res = measure(&f, &chart, target)?;
    let mut non_decreasing = 0;
    let mut status = SolveStatus::MaxIters;
    let mut iterations = 0;

    loop {
        let jets = sample_jets(&SmoothMap::Trig(f.clone()), &chart)?;
        let ratio = certify_free(&jets, opts.tol_rank)?.min_ratio;
        if res <= opts.tol_residual {
            status = SolveStatus::Converged;
            trace.rows.push(TraceRow {
                iteration: iterations,
                residual: res,
                sigma_ratio: ratio,
                step_norm: 0.0,
            });
            break;
        }
        if iterations == opts.max_iters {
            trace.rows.push(TraceRow {
                iteration: iterations,
                residual: res,
                sigma_ratio: ratio,
                step_norm: 0.0,
            });
            break;
        }
        let step = match newton_step(&f, grid, target, opts) {
            Ok(s) => s,
            Err(Error::NotFree { .. }) => {
                status = SolveStatus::LostFreeness;
                trace.rows.push(TraceRow {
                    iteration: iterations,
                    residual: res,
                    sigma_ratio: ratio,
                    step_norm: 0.0,
                });
                break;
            }
            Err(e) => return Err(e),
        };
        let mut taken = step;
        let mut new_res = measure(&taken.map, &chart, target)?;
        if !(new_res <= res) {
            let half = SolveOptions {
                step_damping: 0.5 * opts.step_damping,
                ..*opts
            };
            if let Ok(s) = newton_step(&f, grid, target, &half) {
                let r = measure(&s.map, &chart, target)?;
                if r < new_res || new_res.is_nan() {
                    taken = s;
                    new_res = r;
                }
            }
        }
        trace.rows.push(TraceRow {
            iteration: iterations,
            residual: res,
            sigma_ratio: ratio,
            step_norm: taken.step_norm,
        });
        iterations += 1;
        if !(new_res < res) {
            non_decreasing += 1;
        } else {
            non_decreasing = 0;
        }
        f = taken.map;
        res = new_res;
        if non_decreasing >= 2 {
            status = SolveStatus::Stalled;
            break;
        }
    }

    let final_residual = measure(&f, &chart, target)?;
    Ok(SolveResult {
        map: f,
        trace,
        status,
        iterations,
        final_residual,
    })
}

/// Chart used by the default experiment: one period `[0, 1)` with 64 nodes.
pub fn default_grid(nodes: usize) -> Grid {
    Grid::periodic(vec![nodes], vec![1.0]).expect("valid periodic grid")
}

pub const DEFAULT_NODES: usize = 64;
pub const DEFAULT_AMBIENT: usize = 8;
pub const DEFAULT_CHART_SEED: u64 = 7;
pub const DEFAULT_EPS: f64 = 1e-3;
pub const DEFAULT_TARGET_SEED: u64 = 100;

/// The default experiment at perturbation direction `target_seed`:
/// grid, free starting chart and perturbed target.
pub fn default_experiment(eps: f64, target_seed: u64) -> Result<(Grid, TrigMap, StatStructure)> {
    let grid = default_grid(DEFAULT_NODES);
    let f = free_trig_chart(&grid, DEFAULT_AMBIENT, DEFAULT_CHART_SEED)?;
    let target = perturbed_target(&f, &grid, eps, target_seed)?;
    Ok((grid, f, target))
}

/// A free periodic curve in `R^N`: a random trigonometric map with wave
/// number 1, passed through [`perturb_trig_to_free`] on `grid`.
pub fn free_trig_chart(grid: &Grid, n_ambient: usize, seed: u64) -> Result<TrigMap> {
    let period = grid.period.clone().ok_or(Error::NotPeriodic)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amplitude = 1.0 / (2.0 * std::f64::consts::PI);
    let base = random_trig_map(&period, n_ambient, 1, amplitude, &mut rng)?;
    let out = perturb_trig_to_free(
        &base,
        0.05 * amplitude,
        seed.wrapping_add(1),
        &Chart::Grid(grid.clone()),
        DEFAULT_TOL_RANK,
    )?;
    Ok(out.map)
}

/// Smooth scalar trigonometric field with wave numbers up to 3 and
/// coefficients of size at most `1/k`.
fn smooth_scalar(period: &[f64], rng: &mut impl Rng) -> Result<TrigMap> {
    random_trig_map(period, 1, 3, 1.0, rng)
}

/// Structure-shaped field whose every packed component is an independent
/// smooth scalar with wave numbers up to 3, sampled at the grid nodes.
pub fn random_smooth_structure(n: usize, grid: &Grid, seed: u64) -> Result<StatStructure> {
    let period = grid.period.clone().ok_or(Error::NotPeriodic)?;
    if period.len() != n {
        return Err(Error::DimensionMismatch {
            what: "grid axes",
            expected: n,
            got: period.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (sg, st) = (sym2_count(n), sym3_count(n));
    let fields = (0..sg + st)
        .map(|_| smooth_scalar(&period, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let nodes = grid.nodes();
    let mut out = StatStructure::zeros(n, nodes.len());
    for (p, x) in nodes.iter().enumerate() {
        for (c, field) in fields.iter().enumerate() {
            let v = field.eval(x)[0];
            if c < sg {
                out.g[p][c] = v;
            } else {
                out.t[p][c - sg] = v;
            }
        }
    }
    Ok(out)
}

/// `g = (1 + eps a) g0` and `T = T0 + eps b` for random smooth `a` and
/// (per component) `b`, where `(g0, T0) = D(base)` on `grid`.
pub fn perturbed_target(base: &TrigMap, grid: &Grid, eps: f64, seed: u64) -> Result<StatStructure> {
    let chart = chart_of(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let period = grid.period.clone().ok_or(Error::NotPeriodic)?;
    let s0 = pullback_field(&sample_jets(&SmoothMap::Trig(base.clone()), &chart)?).structure;
    let a = smooth_scalar(&period, &mut rng)?;
    let bs = (0..s0.t.first().map_or(0, |r| r.len()))
        .map(|_| smooth_scalar(&period, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let nodes = grid.nodes();
    let mut out = s0.clone();
    for (p, x) in nodes.iter().enumerate() {
        let ax = a.eval(x)[0];
        for v in out.g[p].iter_mut() {
            *v *= 1.0 + eps * ax;
        }
        for (c, v) in out.t[p].iter_mut().enumerate() {
            *v += eps * bs[c].eval(x)[0];
        }
    }
    Ok(out)
}
