//! The linearized inducing operator and the pointwise algebraic system
//! whose solutions invert it.
//!
//! Differentiating the side conditions `<f_i, y> = 0` and
//! `T_can(f_j, f_k, y) = 0` turns the first-order equations for a variation
//! `y` into the algebraic system
//!
//! ```text
//!   <f_i, y>                               = 0            (n rows)
//!   <f_ij, y>                              = -g'_ij / 2   (i <= j)
//!   <f_j * f_k, y>                         = 0            (j <= k)
//!   <f_i*f_jk + f_j*f_ik + f_k*f_ij, y>    = -T'_ijk / 2  (i <= j <= k)
//! ```
//!
//! where `*` is the Hadamard product.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dims::dim_m;
use crate::error::{Error, Result};
use crate::index::{pairs, triples, SymIndex2, SymIndex3};
use crate::jet::{Jet2, JetField, VectorField};
use crate::maps::fd_derivatives;
use crate::pullback::{dot, triple};
use crate::structure::StatStructure;

/// Which block a row of the point system belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowLabel {
    Tangent(usize),
    Second(SymIndex2),
    Square(SymIndex2),
    Triple(SymIndex3),
}

/// `A y = b` at one point; `A` is `m_n x N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSystem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub row_map: Vec<RowLabel>,
}

fn same_shape(f: &Jet2, y: &Jet2) -> Result<()> {
    if f.n() != y.n() {
        return Err(Error::DimensionMismatch {
            what: "chart dimension of variation",
            expected: f.n(),
            got: y.n(),
        });
    }
    if f.n_ambient() != y.n_ambient() {
        return Err(Error::DimensionMismatch {
            what: "ambient dimension of variation",
            expected: f.n_ambient(),
            got: y.n_ambient(),
        });
    }
    Ok(())
}

/// `L(y) = (g', T')` with
/// `g'_ij = <f_i, y_j> + <f_j, y_i>` and
/// `T'_ijk = T(y_i, f_j, f_k) + T(f_i, y_j, f_k) + T(f_i, f_j, y_k)`.
///
/// Only the first derivatives of `y` enter.
pub fn apply_l(f: &Jet2, y: &Jet2) -> Result<(Vec<f64>, Vec<f64>)> {
    same_shape(f, y)?;
    if f.x.iter().zip(&y.x).any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + a.abs())) {
        return Err(Error::InvalidArgument("jets have different base points".into()));
    }
    let n = f.n();
    let (fd, yd) = (&f.df, &y.df);
    let g = pairs(n)
        .map(|p| dot(&fd[p.i], &yd[p.j]) + dot(&fd[p.j], &yd[p.i]))
        .collect();
    let t = triples(n)
        .map(|t| {
            triple(&yd[t.i], &fd[t.j], &fd[t.k])
                + triple(&fd[t.i], &yd[t.j], &fd[t.k])
                + triple(&fd[t.i], &fd[t.j], &yd[t.k])
        })
        .collect();
    Ok((g, t))
}

/// The `m_n` row vectors in frozen block order, with their labels.
pub fn freeness_rows(f: &Jet2) -> (DMatrix<f64>, Vec<RowLabel>) {
    let n = f.n();
    let big_n = f.n_ambient();
    let m = dim_m(n).expect("jet has n >= 1");
    let mut a = DMatrix::zeros(m, big_n);
    let mut labels = Vec::with_capacity(m);
    let mut row = 0;
    let mut put = |a: &mut DMatrix<f64>, v: &dyn Fn(usize) -> f64| {
        for c in 0..big_n {
            a[(row, c)] = v(c);
        }
        row += 1;
    };
    for i in 0..n {
        put(&mut a, &|c| f.df[i][c]);
        labels.push(RowLabel::Tangent(i));
    }
    for p in pairs(n) {
        put(&mut a, &|c| f.d2(p.i, p.j)[c]);
        labels.push(RowLabel::Second(p));
    }
    for p in pairs(n) {
        put(&mut a, &|c| f.df[p.i][c] * f.df[p.j][c]);
        labels.push(RowLabel::Square(p));
    }
    for t in triples(n) {
        let (i, j, k) = (t.i, t.j, t.k);
        put(&mut a, &|c| {
            f.df[i][c] * f.d2(j, k)[c] + f.df[j][c] * f.d2(i, k)[c] + f.df[k][c] * f.d2(i, j)[c]
        });
        labels.push(RowLabel::Triple(t));
    }
    (a, labels)
}

/// Assembles the point system for right-hand side `(g', T')`.
pub fn assemble_system(f: &Jet2, g_prime: &[f64], t_prime: &[f64]) -> Result<PointSystem> {
    f.validate()?;
    let n = f.n();
    let (s, c) = (crate::dims::sym2_count(n), crate::dims::sym3_count(n));
    if g_prime.len() != s {
        return Err(Error::DimensionMismatch {
            what: "packed g' length",
            expected: s,
            got: g_prime.len(),
        });
    }
    if t_prime.len() != c {
        return Err(Error::DimensionMismatch {
            what: "packed T' length",
            expected: c,
            got: t_prime.len(),
        });
    }
    let (a, row_map) = freeness_rows(f);
    let mut b = DVector::zeros(a.nrows());
    for (p, v) in g_prime.iter().enumerate() {
        b[n + p] = -0.5 * v;
    }
    for (q, v) in t_prime.iter().enumerate() {
        b[n + 2 * s + q] = -0.5 * v;
    }
    Ok(PointSystem { a, b, row_map })
}

/// Sup-norm residuals of the original (unreduced) linearized equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    /// `sup |<f_i, y_j> + <f_j, y_i> - g'_ij|`
    pub metric_residual: f64,
    /// `sup |T(y_i,f_j,f_k) + T(f_i,y_j,f_k) + T(f_i,f_j,y_k) - T'_ijk|`
    pub tensor_residual: f64,
    /// `sup |<f_i, y>|`
    pub tangency_residual: f64,
    /// `sup |T(f_j, f_k, y)|`
    pub square_residual: f64,
}

impl ReductionReport {
    /// Residual of the linearized equations proper.
    pub fn residual(&self) -> f64 {
        self.metric_residual.max(self.tensor_residual)
    }
}

/// Evaluates the unreduced linearized equations for `y` on a periodic
/// grid, with `y_i` from central finite differences.
pub fn check_reduction(
    f_field: &JetField,
    y: &VectorField,
    target: &StatStructure,
) -> Result<ReductionReport> {
    let grid = f_field.chart.periodic_grid()?;
    if y.chart != f_field.chart {
        return Err(Error::InvalidGrid("variation field lives on a different grid".into()));
    }
    if target.len() != f_field.len() || target.n != f_field.n {
        return Err(Error::DimensionMismatch {
            what: "target point count",
            expected: f_field.len(),
            got: target.len(),
        });
    }
    y.validate()?;
    let dy = fd_derivatives(&y.values, grid, 1)?;
    let per_point: Vec<[f64; 4]> = f_field
        .jets
        .par_iter()
        .enumerate()
        .map(|(p, fj)| {
            let yj = Jet2 {
                x: fj.x.clone(),
                f: y.values[p].clone(),
                df: dy[p].clone(),
                d2f: vec![vec![0.0; fj.n_ambient()]; fj.d2f.len()],
            };
            let (g, t) = apply_l(fj, &yj)?;
            let rg = g
                .iter()
                .zip(&target.g[p])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let rt = t
                .iter()
                .zip(&target.t[p])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let h0 = fj.df.iter().map(|fi| dot(fi, &yj.f).abs()).fold(0.0, f64::max);
            let h1 = pairs(fj.n())
                .map(|q| triple(&fj.df[q.i], &fj.df[q.j], &yj.f).abs())
                .fold(0.0, f64::max);
            Ok([rg, rt, h0, h1])
        })
        .collect::<Result<_>>()?;
    let sup = |k: usize| per_point.iter().map(|r| r[k]).fold(0.0, f64::max);
    Ok(ReductionReport {
        metric_residual: sup(0),
        tensor_residual: sup(1),
        tangency_residual: sup(2),
        square_residual: sup(3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{example_free_map, PolyMap, Term};
    use crate::pullback::pullback_point;

    fn line() -> PolyMap {
        PolyMap::new(1, vec![vec![Term(1.0, vec![1])]]).unwrap()
    }

    #[test]
    fn scaling_variation() {
        let m = example_free_map(2).unwrap();
        let j = m.eval_jet2(&[0.3, -0.4]).unwrap();
        let (g, t) = pullback_point(&j);
        let (gp, tp) = apply_l(&j, &j).unwrap();
        for (a, b) in gp.iter().zip(&g) {
            assert!((a - 2.0 * b).abs() <= 1e-12 * b.abs().max(1.0));
        }
        for (a, b) in tp.iter().zip(&t) {
            assert!((a - 3.0 * b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn translation_is_in_kernel() {
        let j = example_free_map(1).unwrap().eval_jet2(&[0.7]).unwrap();
        let mut y = Jet2::zeros(vec![0.7], 4);
        y.f = vec![1.0, -2.0, 3.0, 0.5];
        assert_eq!(apply_l(&j, &y).unwrap(), (vec![0.0], vec![0.0]));
    }

    #[test]
    fn hand_substitution() {
        // f = x, y = x^2 at x = 1
        let f = line().eval_jet2(&[1.0]).unwrap();
        let y = PolyMap::new(1, vec![vec![Term(1.0, vec![2])]])
            .unwrap()
            .eval_jet2(&[1.0])
            .unwrap();
        assert_eq!(apply_l(&f, &y).unwrap(), (vec![4.0], vec![6.0]));
    }

    #[test]
    fn example_map_system_at_origin() {
        let j = example_free_map(1).unwrap().eval_jet2(&[0.0]).unwrap();
        let sys = assemble_system(&j, &[0.0], &[0.0]).unwrap();
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 2.0, 0.0, 1.0, //
                0.0, 0.0, 2.0, 2.0, //
                1.0, 4.0, 0.0, 1.0, //
                0.0, 0.0, 0.0, 6.0,
            ],
        );
        assert_eq!(sys.a, expect);
        assert!(sys.b.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rhs_layout() {
        let j = example_free_map(2).unwrap().eval_jet2(&[0.1, 0.2]).unwrap();
        let sys = assemble_system(&j, &[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0, 7.0]).unwrap();
        let b: Vec<f64> = sys.b.iter().copied().collect();
        assert_eq!(
            b,
            vec![0.0, 0.0, -0.5, -1.0, -1.5, 0.0, 0.0, 0.0, -2.0, -2.5, -3.0, -3.5]
        );
        assert_eq!(sys.row_map[2], RowLabel::Second(SymIndex2 { i: 0, j: 0 }));
        assert_eq!(sys.row_map[8], RowLabel::Triple(SymIndex3 { i: 0, j: 0, k: 0 }));
        assert!(assemble_system(&j, &[1.0], &[0.0; 4]).is_err());
    }

    #[test]
    fn line_in_r1_is_rank_one() {
        let j = line().eval_jet2(&[0.3]).unwrap();
        let sys = assemble_system(&j, &[0.0], &[0.0]).unwrap();
        assert_eq!(sys.a.as_slice(), &[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(sys.a.rank(1e-12), 1);
    }

    #[test]
    fn base_point_mismatch() {
        let f = line().eval_jet2(&[0.0]).unwrap();
        let y = line().eval_jet2(&[1.0]).unwrap();
        assert!(apply_l(&f, &y).is_err());
    }
}
