//! The inducing operator `f -> (f* g_can, f* T_can)` with
//! `g_can = sum dx_a^2` and `T_can = sum dx_a^3` on `R^N`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{pairs, triples};
use crate::jet::{Jet2, JetField};
use crate::structure::StatStructure;

/// Relative pivot tolerance for the positive-definiteness test of `g`.
pub const IMMERSION_PIVOT_TOL: f64 = 1e-12;

fn check_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what: "vector length",
            expected: a,
            got: b,
        })
    }
}

/// Componentwise product `u * v`.
pub fn hadamard(u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    check_len(u.len(), v.len())?;
    Ok(u.iter().zip(v).map(|(a, b)| a * b).collect())
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// `g_can(u, v)`.
pub fn g_can(u: &[f64], v: &[f64]) -> Result<f64> {
    check_len(u.len(), v.len())?;
    Ok(dot(u, v))
}

/// `T_can(u, v, w) = sum_a u_a v_a w_a`.
pub fn t_can(u: &[f64], v: &[f64], w: &[f64]) -> Result<f64> {
    check_len(u.len(), v.len())?;
    check_len(u.len(), w.len())?;
    Ok(triple(u, v, w))
}

pub(crate) fn triple(u: &[f64], v: &[f64], w: &[f64]) -> f64 {
    u.iter().zip(v).zip(w).map(|((a, b), c)| a * b * c).sum()
}

/// Packed `(g_ij, T_ijk)` at one point.
pub fn pullback_point(jet: &Jet2) -> (Vec<f64>, Vec<f64>) {
    let n = jet.n();
    let g = pairs(n).map(|p| dot(&jet.df[p.i], &jet.df[p.j])).collect();
    let t = triples(n)
        .map(|t| triple(&jet.df[t.i], &jet.df[t.j], &jet.df[t.k]))
        .collect();
    (g, t)
}

/// Cholesky test on the full `g` matrix; a pivot below
/// `IMMERSION_PIVOT_TOL * max(diag)` counts as degenerate.
pub fn is_positive_definite(g: &[Vec<f64>]) -> bool {
    let n = g.len();
    let scale = (0..n).map(|i| g[i][i].abs()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return false;
    }
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let d = g[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        if !(d > IMMERSION_PIVOT_TOL * scale) {
            return false;
        }
        l[j][j] = d.sqrt();
        for i in j + 1..n {
            l[i][j] = (g[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>()) / l[j][j];
        }
    }
    true
}

/// Pulled-back structure plus the points where `f` fails to be an immersion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullbackResult {
    pub structure: StatStructure,
    pub non_immersion_points: Vec<usize>,
}

pub fn pullback_field(jets: &JetField) -> PullbackResult {
    let per_point: Vec<_> = jets.jets.par_iter().map(pullback_point).collect();
    let (g, t): (Vec<_>, Vec<_>) = per_point.into_iter().unzip();
    let structure = StatStructure { n: jets.n, g, t };
    let non_immersion_points = (0..structure.len())
        .filter(|&p| !is_positive_definite(&structure.g_matrix(p)))
        .collect();
    PullbackResult {
        structure,
        non_immersion_points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Chart;
    use crate::maps::{example_free_map, sample_jets, PolyMap, SmoothMap, Term, TrigMap, TrigMode};
    use std::f64::consts::PI;

    #[test]
    fn hadamard_examples() {
        assert_eq!(hadamard(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), vec![3.0, 8.0]);
        let u = [0.3, -1.2, 7.0];
        assert_eq!(hadamard(&u, &[1.0; 3]).unwrap(), u.to_vec());
        assert_eq!(hadamard(&u, &[0.0; 3]).unwrap(), vec![0.0; 3]);
        assert!(hadamard(&u, &[1.0]).is_err());
    }

    #[test]
    fn t_can_examples() {
        assert_eq!(t_can(&[1.0; 3], &[1.0; 3], &[1.0; 3]).unwrap(), 3.0);
        assert_eq!(t_can(&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]).unwrap(), 63.0);
        assert_eq!(t_can(&[1.0, 2.0], &[3.0, 4.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert!(t_can(&[1.0], &[1.0, 2.0], &[1.0]).is_err());
    }

    fn jet1(df: Vec<f64>) -> Jet2 {
        let big_n = df.len();
        Jet2 {
            x: vec![0.0],
            f: vec![0.0; big_n],
            df: vec![df],
            d2f: vec![vec![0.0; big_n]],
        }
    }

    #[test]
    fn pullback_point_examples() {
        assert_eq!(pullback_point(&jet1(vec![1.0, 1.0])), (vec![2.0], vec![2.0]));
        assert_eq!(pullback_point(&jet1(vec![1.0, 2.0])), (vec![5.0], vec![9.0]));
        assert_eq!(pullback_point(&jet1(vec![1.0])), (vec![1.0], vec![1.0]));
    }

    #[test]
    fn example_map_metric() {
        let m: SmoothMap = example_free_map(1).unwrap().into();
        let xs: Vec<Vec<f64>> = (0..9).map(|k| vec![-1.0 + 0.25 * k as f64]).collect();
        let field = sample_jets(&m, &Chart::Points(xs)).unwrap();
        let res = pullback_field(&field);
        assert!(res.non_immersion_points.is_empty());
        for (p, j) in field.jets.iter().enumerate() {
            let x = j.x[0];
            let g = 1.0 + 4.0 + 4.0 * x * x + (1.0 + 2.0 * x).powi(2);
            assert!((res.structure.g[p][0] - g).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_map_flagged() {
        let m: SmoothMap = PolyMap::new(1, vec![vec![Term(2.0, vec![0])]; 2]).unwrap().into();
        let field = sample_jets(&m, &Chart::Points(vec![vec![0.0], vec![1.0]])).unwrap();
        let res = pullback_field(&field);
        assert_eq!(res.non_immersion_points, vec![0, 1]);
        assert!(res.structure.g.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn circle_metric_constant() {
        let m: SmoothMap = TrigMap::new(
            vec![1.0],
            vec![
                vec![TrigMode(1.0, 0.0, vec![1])],
                vec![TrigMode(0.0, 1.0, vec![1])],
            ],
        )
        .unwrap()
        .into();
        let chart = Chart::Grid(crate::jet::Grid::periodic(vec![16], vec![1.0]).unwrap());
        let res = pullback_field(&sample_jets(&m, &chart).unwrap());
        for g in &res.structure.g {
            assert!((g[0] - 4.0 * PI * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn definiteness() {
        assert!(is_positive_definite(&[vec![2.0, 1.0], vec![1.0, 2.0]]));
        assert!(!is_positive_definite(&[vec![1.0, 1.0], vec![1.0, 1.0]]));
        assert!(!is_positive_definite(&[vec![0.0]]));
    }
}
