//! Certification of free statistical maps: the `m_n` vectors
//! `{f_i, f_ij, f_j*f_k, f_i*f_jk + f_j*f_ik + f_k*f_ij}` must be linearly
//! independent at every point.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dims::{dim_bound, dim_m, sym2_count, sym3_count};
use crate::error::{Error, Result};
use crate::jet::{Chart, Jet2, JetField};
use crate::linearize::freeness_rows;
use crate::maps::{sample_jets, PolyMap, SmoothMap, Term, TrigMap, TrigMode};

/// Relative singular-value gap below which a row set counts as dependent.
pub const DEFAULT_TOL_RANK: f64 = 1e-10;
/// Attempts made by the random perturbation routines.
pub const DEFAULT_RETRY_BUDGET: usize = 10;

/// The freeness matrix at one point (identical to the point system's `A`).
pub fn freeness_matrix(jet: &Jet2) -> DMatrix<f64> {
    freeness_rows(jet).0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointFreeness {
    pub rank: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub is_free: bool,
}

impl PointFreeness {
    pub fn ratio(&self) -> f64 {
        if self.sigma_max > 0.0 {
            self.sigma_min / self.sigma_max
        } else {
            0.0
        }
    }
}

/// Rank data of a row set. `sigma_min` is the `rows`-th singular value,
/// which is zero when there are fewer columns than rows.
pub fn row_rank(a: &DMatrix<f64>, tol_rank: f64) -> PointFreeness {
    let rows = a.nrows();
    let sv = a.clone().svd(false, false).singular_values;
    let sigma_max = sv.iter().copied().fold(0.0f64, f64::max);
    let sigma_min = if a.ncols() < rows || sv.is_empty() {
        0.0
    } else {
        sv.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let rank = sv.iter().filter(|&&s| sigma_max > 0.0 && s > tol_rank * sigma_max).count();
    PointFreeness {
        rank,
        sigma_min,
        sigma_max,
        is_free: rank == rows && sigma_min > tol_rank * sigma_max,
    }
}

pub fn certify_point(jet: &Jet2, tol_rank: f64) -> PointFreeness {
    row_rank(&freeness_matrix(jet), tol_rank)
}

/// Independence of `{f_i, f_ij}` (freeness in Nash's sense).
pub fn certify_nash_free(jet: &Jet2) -> bool {
    let n = jet.n();
    let a = freeness_matrix(jet);
    row_rank(&a.rows(0, n + sym2_count(n)).into_owned(), DEFAULT_TOL_RANK).is_free
}

/// Independence of `{f_j*f_k, f_i*f_jk + f_j*f_ik + f_k*f_ij}` (`T_can`-freeness).
pub fn certify_t_free(jet: &Jet2) -> bool {
    let n = jet.n();
    let s = sym2_count(n);
    let a = freeness_matrix(jet);
    row_rank(&a.rows(n + s, s + sym3_count(n)).into_owned(), DEFAULT_TOL_RANK).is_free
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreenessReport {
    pub n: usize,
    #[serde(rename = "N")]
    pub n_ambient: usize,
    pub m: usize,
    pub tol_rank: f64,
    pub points: Vec<PointFreeness>,
    /// Minimum over points of `sigma_min / sigma_max`.
    pub min_ratio: f64,
    pub non_free_count: usize,
    pub all_free: bool,
}

impl FreenessReport {
    pub fn non_free_points(&self) -> Vec<usize> {
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_free)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn free_count(&self) -> usize {
        self.points.len() - self.non_free_count
    }
}

pub fn check_tol(tol_rank: f64) -> Result<()> {
    if tol_rank > 0.0 && tol_rank <= 1e-2 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "tol_rank must lie in (0, 1e-2], got {tol_rank}"
        )))
    }
}

/// Pointwise SVD certificate over a whole jet field.
pub fn certify_free(jets: &JetField, tol_rank: f64) -> Result<FreenessReport> {
    check_tol(tol_rank)?;
    let points: Vec<PointFreeness> = jets
        .jets
        .par_iter()
        .map(|j| certify_point(j, tol_rank))
        .collect();
    let min_ratio = points.iter().map(|p| p.ratio()).fold(f64::INFINITY, f64::min);
    let non_free_count = points.iter().filter(|p| !p.is_free).count();
    Ok(FreenessReport {
        n: jets.n,
        n_ambient: jets.n_ambient,
        m: dim_m(jets.n)?,
        tol_rank,
        min_ratio: if points.is_empty() { 0.0 } else { min_ratio },
        non_free_count,
        all_free: non_free_count == 0,
        points,
    })
}

/// Result of a randomized perturbation towards a free map.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbed<M> {
    pub map: M,
    pub report: FreenessReport,
    pub attempts: usize,
}

fn check_bound(n: usize, n_ambient: usize) -> Result<()> {
    let bound = dim_bound(n)?;
    if n_ambient < bound {
        return Err(Error::BelowDimensionBound {
            n,
            n_ambient,
            bound,
        });
    }
    Ok(())
}

/// Random polynomial of total degree <= 2 per component, coefficients
/// uniform in `[-epsilon, epsilon]`.
fn random_quadratic(n: usize, n_ambient: usize, epsilon: f64, rng: &mut ChaCha8Rng) -> PolyMap {
    let mut exps = vec![vec![0; n]];
    for a in 0..n {
        exps.push(PolyMap::unit_exponent(n, &[a]));
    }
    for p in crate::index::pairs(n) {
        exps.push(PolyMap::unit_exponent(n, &[p.i, p.j]));
    }
    let components = (0..n_ambient)
        .map(|_| {
            exps.iter()
                .map(|e| Term(rng.random_range(-epsilon..=epsilon), e.clone()))
                .collect()
        })
        .collect();
    PolyMap {
        n,
        n_ambient,
        components,
    }
}

/// Adds a random degree-<=2 perturbation of size `epsilon` and certifies
/// the result on `probe_points`, retrying up to `DEFAULT_RETRY_BUDGET`
/// times with fresh randomness.
pub fn perturb_to_free(
    map: &PolyMap,
    epsilon: f64,
    seed: u64,
    probe_points: &[Vec<f64>],
) -> Result<Perturbed<PolyMap>> {
    perturb_to_free_with(map, epsilon, seed, probe_points, DEFAULT_RETRY_BUDGET, DEFAULT_TOL_RANK)
}

pub fn perturb_to_free_with(
    map: &PolyMap,
    epsilon: f64,
    seed: u64,
    probe_points: &[Vec<f64>],
    budget: usize,
    tol_rank: f64,
) -> Result<Perturbed<PolyMap>> {
    map.validate()?;
    check_bound(map.n, map.n_ambient)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chart = Chart::Points(probe_points.to_vec());
    let mut offending = Vec::new();
    for attempt in 1..=budget.max(1) {
        let candidate = map.add(&random_quadratic(map.n, map.n_ambient, epsilon, &mut rng))?;
        let jets = sample_jets(&SmoothMap::Poly(candidate.clone()), &chart)?;
        let report = certify_free(&jets, tol_rank)?;
        if report.all_free {
            return Ok(Perturbed {
                map: candidate,
                report,
                attempts: attempt,
            });
        }
        offending = report.non_free_points();
    }
    Err(Error::PerturbationBudgetExhausted {
        attempts: budget.max(1),
        offending,
    })
}

/// Random trigonometric polynomial with wave numbers `1..=max_mode` on each
/// axis direction; a mode `k` gets coefficients uniform in
/// `[-amplitude, amplitude] / |k|` so that derivatives stay comparable.
pub fn random_trig_map(
    period: &[f64],
    n_ambient: usize,
    max_mode: i64,
    amplitude: f64,
    rng: &mut impl Rng,
) -> Result<TrigMap> {
    let n = period.len();
    let mut waves: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        waves = waves
            .into_iter()
            .flat_map(|w| {
                (-max_mode..=max_mode).map(move |k| {
                    let mut v = w.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    // one representative of each {k, -k}, zero excluded
    waves.retain(|k| matches!(k.iter().find(|&&v| v != 0), Some(&v) if v > 0));
    let modes = (0..n_ambient)
        .map(|_| {
            waves
                .iter()
                .map(|k| {
                    let size = amplitude / k.iter().map(|v| (v * v) as f64).sum::<f64>().sqrt();
                    TrigMode(
                        rng.random_range(-size..=size),
                        rng.random_range(-size..=size),
                        k.clone(),
                    )
                })
                .collect()
        })
        .collect();
    TrigMap::new(period.to_vec(), modes)
}

/// Periodic analogue of [`perturb_to_free`]: adds a random trigonometric
/// perturbation (wave numbers up to 2, size `epsilon`) and certifies on the
/// nodes of a periodic grid.
pub fn perturb_trig_to_free(
    map: &TrigMap,
    epsilon: f64,
    seed: u64,
    chart: &Chart,
    tol_rank: f64,
) -> Result<Perturbed<TrigMap>> {
    map.validate()?;
    check_bound(map.n, map.n_ambient)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut offending = Vec::new();
    for attempt in 1..=DEFAULT_RETRY_BUDGET {
        let delta = random_trig_map(&map.period, map.n_ambient, 2, epsilon, &mut rng)?;
        let candidate = map.add(&delta)?;
        let jets = sample_jets(&SmoothMap::Trig(candidate.clone()), chart)?;
        let report = certify_free(&jets, tol_rank)?;
        if report.all_free {
            return Ok(Perturbed {
                map: candidate,
                report,
                attempts: attempt,
            });
        }
        offending = report.non_free_points();
    }
    Err(Error::PerturbationBudgetExhausted {
        attempts: DEFAULT_RETRY_BUDGET,
        offending,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::example_free_map;

    fn poly1(comps: Vec<Vec<Term>>) -> PolyMap {
        PolyMap::new(1, comps).unwrap()
    }

    #[test]
    fn example_map_origin_determinant() {
        let j = example_free_map(1).unwrap().eval_jet2(&[0.0]).unwrap();
        let a = freeness_matrix(&j);
        assert!((a.determinant().abs() - 24.0).abs() < 1e-12 * 24.0);
        assert!(certify_point(&j, DEFAULT_TOL_RANK).is_free);
    }

    #[test]
    fn line_is_never_free() {
        let j = poly1(vec![vec![Term(1.0, vec![1])]]).eval_jet2(&[0.2]).unwrap();
        let p = certify_point(&j, DEFAULT_TOL_RANK);
        assert_eq!(p.rank, 1);
        assert!(!p.is_free);
        assert_eq!(p.sigma_min, 0.0);
    }

    #[test]
    fn zero_first_derivatives_never_free() {
        let mut j = Jet2::zeros(vec![0.0, 0.0], 20);
        for (p, v) in j.d2f.iter_mut().enumerate() {
            v[p] = 1.0;
        }
        let a = freeness_matrix(&j);
        for r in (0..2).chain(5..12) {
            assert!(a.row(r).iter().all(|&v| v == 0.0));
        }
        assert!(!certify_point(&j, DEFAULT_TOL_RANK).is_free);
    }

    #[test]
    fn nash_freeness_examples() {
        let parabola = poly1(vec![vec![Term(1.0, vec![1])], vec![Term(1.0, vec![2])]]);
        for x in [-1.0, 0.0, 0.5, 3.0] {
            assert!(certify_nash_free(&parabola.eval_jet2(&[x]).unwrap()));
        }
        let diagonal = poly1(vec![vec![Term(1.0, vec![1])], vec![Term(1.0, vec![1])]]);
        assert!(!certify_nash_free(&diagonal.eval_jet2(&[0.3]).unwrap()));
    }

    #[test]
    fn free_implies_sub_conditions() {
        let m = example_free_map(2).unwrap();
        let j = m.eval_jet2(&[0.4, -0.1]).unwrap();
        assert!(certify_point(&j, DEFAULT_TOL_RANK).is_free);
        assert!(certify_nash_free(&j));
        assert!(certify_t_free(&j));
    }

    #[test]
    fn tolerance_range() {
        let field = sample_jets(
            &example_free_map(1).unwrap().into(),
            &Chart::Points(vec![vec![0.0]]),
        )
        .unwrap();
        assert!(certify_free(&field, 0.0).is_err());
        assert!(certify_free(&field, 0.1).is_err());
        assert!(certify_free(&field, 1e-2).is_ok());
    }

    #[test]
    fn below_bound_rejected() {
        // N = m_1 - 1 = 3
        let m = poly1(vec![vec![Term(1.0, vec![1])], vec![], vec![]]);
        let err = perturb_to_free(&m, 0.1, 1, &[vec![0.0]]).unwrap_err();
        assert_eq!(
            err,
            Error::BelowDimensionBound {
                n: 1,
                n_ambient: 3,
                bound: 5
            }
        );
    }

    #[test]
    fn free_map_stays_free_under_small_perturbation() {
        let mut comps = example_free_map(1).unwrap().components;
        comps.push(vec![]);
        let m = poly1(comps);
        let probes: Vec<Vec<f64>> = (0..11).map(|k| vec![-1.0 + 0.2 * k as f64]).collect();
        let out = perturb_to_free(&m, 1e-3, 5, &probes).unwrap();
        assert_eq!(out.attempts, 1);
    }

    #[test]
    fn budget_exhaustion_reports_points() {
        // epsilon so small that the degenerate map cannot be repaired at tol 1e-2
        let m = poly1(vec![vec![Term(1.0, vec![1])], vec![], vec![], vec![], vec![]]);
        let err = perturb_to_free_with(&m, 1e-12, 3, &[vec![0.0], vec![0.5]], 2, 1e-2).unwrap_err();
        match err {
            Error::PerturbationBudgetExhausted { attempts, offending } => {
                assert_eq!(attempts, 2);
                assert_eq!(offending, vec![0, 1]);
            }
            e => panic!("unexpected {e:?}"),
        }
    }
}
