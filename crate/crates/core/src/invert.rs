//! Infinitesimal inversion of the linearized inducing operator: at each
//! point, the minimal Euclidean-norm solution of the point system.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freeness::check_tol;
use crate::jet::{Chart, Jet2, JetField, VectorField};
use crate::linearize::{apply_l, assemble_system, check_reduction, ReductionReport};
use crate::maps::{sample_jets, SmoothMap, TrigMap};
use crate::pullback::pullback_field;
use crate::structure::StatStructure;

/// Points whose singular-value ratio is within this factor of `tol_rank`
/// are flagged as approaching the non-free stratum.
pub const NEAR_SINGULAR_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MinNormSolution {
    pub y: DVector<f64>,
    /// `sigma_min / sigma_max` of `A`.
    pub ratio: f64,
    pub near_singular: bool,
}

/// Minimal-norm `y` with `A y = b`, via the SVD of `A`. Requires full row
/// rank at tolerance `tol_rank`.
pub fn minimal_norm_solve(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    tol_rank: f64,
) -> Result<MinNormSolution> {
    let rows = a.nrows();
    if b.len() != rows {
        return Err(Error::DimensionMismatch {
            what: "right-hand side length",
            expected: rows,
            got: b.len(),
        });
    }
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let sigma_max = sv.iter().copied().fold(0.0f64, f64::max);
    let sigma_min = if a.ncols() < rows {
        0.0
    } else {
        sv.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let rank = sv.iter().filter(|&&s| sigma_max > 0.0 && s > tol_rank * sigma_max).count();
    if rank < rows || !(sigma_min > tol_rank * sigma_max) {
        return Err(Error::RankDeficient {
            rank,
            rows,
            sigma_min,
            sigma_max,
        });
    }
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut coeffs = u.transpose() * b;
    for (c, s) in coeffs.iter_mut().zip(sv.iter()) {
        *c /= s;
    }
    let y = v_t.transpose() * coeffs;
    let ratio = sigma_min / sigma_max;
    Ok(MinNormSolution {
        y,
        ratio,
        near_singular: ratio < NEAR_SINGULAR_FACTOR * tol_rank,
    })
}

/// The field `y = M_f(g', T')` together with per-point diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseField {
    pub y: VectorField,
    pub min_ratio: f64,
    /// `max_p ||A_p y_p - b_p||`.
    pub max_point_residual: f64,
    pub near_singular_points: Vec<usize>,
}

fn check_target(f_jets: &JetField, target: &StatStructure) -> Result<()> {
    target.validate()?;
    if target.n != f_jets.n {
        return Err(Error::DimensionMismatch {
            what: "target dimension",
            expected: f_jets.n,
            got: target.n,
        });
    }
    if target.len() != f_jets.len() {
        return Err(Error::DimensionMismatch {
            what: "target point count",
            expected: f_jets.len(),
            got: target.len(),
        });
    }
    Ok(())
}

/// Pointwise minimal-norm inversion; the first non-free point aborts.
pub fn invert_field(
    f_jets: &JetField,
    target: &StatStructure,
    tol_rank: f64,
) -> Result<InverseField> {
    check_tol(tol_rank)?;
    check_target(f_jets, target)?;
    let solved: Vec<(Vec<f64>, f64, bool, f64)> = f_jets
        .jets
        .par_iter()
        .enumerate()
        .map(|(p, jet)| {
            let sys = assemble_system(jet, &target.g[p], &target.t[p])?;
            let sol = minimal_norm_solve(&sys.a, &sys.b, tol_rank).map_err(|e| match e {
                Error::RankDeficient {
                    sigma_min,
                    sigma_max,
                    ..
                } => Error::NotFree {
                    index: p,
                    x: jet.x.clone(),
                    ratio: if sigma_max > 0.0 { sigma_min / sigma_max } else { 0.0 },
                },
                other => other,
            })?;
            let res = (&sys.a * &sol.y - &sys.b).norm();
            Ok((sol.y.iter().copied().collect(), sol.ratio, sol.near_singular, res))
        })
        .collect::<Result<_>>()?;
    let min_ratio = solved.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let max_point_residual = solved.iter().map(|s| s.3).fold(0.0, f64::max);
    let near_singular_points = solved
        .iter()
        .enumerate()
        .filter(|(_, s)| s.2)
        .map(|(p, _)| p)
        .collect();
    Ok(InverseField {
        y: VectorField {
            n: f_jets.n,
            n_ambient: f_jets.n_ambient,
            chart: f_jets.chart.clone(),
            values: solved.into_iter().map(|s| s.0).collect(),
        },
        min_ratio,
        max_point_residual,
        near_singular_points,
    })
}

/// Exact jets of the trigonometric interpolant of `y` at the grid nodes.
pub fn spectral_jets(y: &VectorField) -> Result<Vec<Jet2>> {
    let grid = y.chart.periodic_grid()?;
    let map = TrigMap::interpolate(grid, &y.values, 1.0)?;
    Ok(sample_jets(&SmoothMap::Trig(map), &y.chart)?.jets)
}

/// One sample of the directional-derivative check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalSample {
    pub t: f64,
    /// `sup |(D(f + t y) - D(f)) / t - target|`
    pub error: f64,
    /// `sup |(D(f + t y) - D(f)) / t - L(f, y)|`, the Taylor remainder,
    /// which is linear in `t`.
    pub remainder: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// `max_p ||A_p y_p - b_p||`.
    pub algebraic_residual: f64,
    /// Residuals of the unreduced equations with finite-difference `y_i`.
    pub reduction: Option<ReductionReport>,
    pub reduction_error: Option<String>,
    /// Directional derivative of the inducing operator along `y`.
    pub directional: Vec<DirectionalSample>,
    pub directional_error: Option<String>,
    pub target_norm: f64,
}

/// Checks `L(M_f(target)) = target` algebraically, through the unreduced
/// equations, and through difference quotients of the inducing operator.
///
/// The last two need derivatives of `y` and hence a periodic grid; on other
/// charts they are skipped and the reason is recorded.
pub fn verify_inverse(
    f_jets: &JetField,
    target: &StatStructure,
    y: &VectorField,
    ts: &[f64],
) -> Result<VerificationReport> {
    check_target(f_jets, target)?;
    y.validate()?;
    if y.chart != f_jets.chart {
        return Err(Error::InvalidGrid("variation field lives on a different chart".into()));
    }
    let algebraic_residual = f_jets
        .jets
        .par_iter()
        .enumerate()
        .map(|(p, jet)| {
            let sys = assemble_system(jet, &target.g[p], &target.t[p])?;
            let yv = DVector::from_column_slice(&y.values[p]);
            Ok((&sys.a * yv - &sys.b).norm())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let (reduction, reduction_error) = match check_reduction(f_jets, y, target) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let (directional, directional_error) = match spectral_jets(y) {
        Ok(y_jets) => {
            let base = pullback_field(f_jets).structure;
            let mut linear = StatStructure::zeros(f_jets.n, f_jets.jets.len());
            for (p, (fj, yj)) in f_jets.jets.iter().zip(&y_jets).enumerate() {
                let (g, t) = apply_l(fj, yj)?;
                linear.g[p] = g;
                linear.t[p] = t;
            }
            let mut out = Vec::with_capacity(ts.len());
            for &t in ts {
                let moved: Vec<Jet2> = f_jets
                    .jets
                    .iter()
                    .zip(&y_jets)
                    .map(|(f, yj)| f.axpy(t, yj))
                    .collect();
                let moved = JetField {
                    n: f_jets.n,
                    n_ambient: f_jets.n_ambient,
                    chart: f_jets.chart.clone(),
                    jets: moved,
                };
                let quotient = pullback_field(&moved).structure.combine(1.0 / t, &base, -1.0 / t)?;
                out.push(DirectionalSample {
                    t,
                    error: quotient.sub(target)?.sup_norm(),
                    remainder: quotient.sub(&linear)?.sup_norm(),
                });
            }
            (out, None)
        }
        Err(e) => (Vec::new(), Some(e.to_string())),
    };

    Ok(VerificationReport {
        algebraic_residual,
        reduction,
        reduction_error,
        directional,
        directional_error,
        target_norm: target.sup_norm(),
    })
}

/// Default difference-quotient steps for [`verify_inverse`].
pub const DEFAULT_DIRECTIONAL_STEPS: [f64; 2] = [1e-5, 5e-6];

/// Convenience: sample a map and invert in one go.
pub fn invert_map(
    map: &SmoothMap,
    chart: &Chart,
    target: &StatStructure,
    tol_rank: f64,
) -> Result<(JetField, InverseField)> {
    let jets = sample_jets(map, chart)?;
    let inv = invert_field(&jets, target, tol_rank)?;
    Ok((jets, inv))
}
