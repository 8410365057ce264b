//! Statistical structures `(g, T)` sampled over a chart.

use serde::{Deserialize, Serialize};

use crate::dims::{sym2_count, sym3_count};
use crate::error::{Error, Result};
use crate::index::{SymIndex2, SymIndex3};

/// Packed components of a symmetric 2-tensor `g` and a symmetric 3-tensor
/// `T` at every sample point. `g[p]` has `s_n` entries, `t[p]` has `c_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatStructure {
    pub n: usize,
    pub g: Vec<Vec<f64>>,
    #[serde(rename = "T")]
    pub t: Vec<Vec<f64>>,
}

impl StatStructure {
    pub fn zeros(n: usize, points: usize) -> Self {
        StatStructure {
            n,
            g: vec![vec![0.0; sym2_count(n)]; points],
            t: vec![vec![0.0; sym3_count(n)]; points],
        }
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::ZeroDimension(0));
        }
        if self.g.len() != self.t.len() {
            return Err(Error::DimensionMismatch {
                what: "points in T vs g",
                expected: self.g.len(),
                got: self.t.len(),
            });
        }
        let (s, c) = (sym2_count(self.n), sym3_count(self.n));
        for row in &self.g {
            if row.len() != s {
                return Err(Error::DimensionMismatch {
                    what: "packed g length",
                    expected: s,
                    got: row.len(),
                });
            }
        }
        for row in &self.t {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    what: "packed T length",
                    expected: c,
                    got: row.len(),
                });
            }
        }
        Ok(())
    }

    pub fn g_at(&self, p: usize, i: usize, j: usize) -> f64 {
        self.g[p][SymIndex2::new(i, j).position(self.n)]
    }

    pub fn t_at(&self, p: usize, i: usize, j: usize, k: usize) -> f64 {
        self.t[p][SymIndex3::new(i, j, k).position(self.n)]
    }

    /// Full symmetric `n x n` matrix of `g` at point `p`.
    pub fn g_matrix(&self, p: usize) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.g_at(p, i, j)).collect())
            .collect()
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                what: "structure dimension",
                expected: self.n,
                got: other.n,
            });
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                what: "structure point count",
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(())
    }

    /// `a * self + b * other`, componentwise.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_same_shape(other)?;
        let lin = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| {
            x.iter()
                .zip(y)
                .map(|(r, s)| r.iter().zip(s).map(|(u, v)| a * u + b * v).collect())
                .collect()
        };
        Ok(StatStructure {
            n: self.n,
            g: lin(&self.g, &other.g),
            t: lin(&self.t, &other.t),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    pub fn scaled(&self, s_g: f64, s_t: f64) -> Self {
        StatStructure {
            n: self.n,
            g: self.g.iter().map(|r| r.iter().map(|v| s_g * v).collect()).collect(),
            t: self.t.iter().map(|r| r.iter().map(|v| s_t * v).collect()).collect(),
        }
    }

    /// Sup-norm over all points and all packed components.
    pub fn sup_norm(&self) -> f64 {
        self.g
            .iter()
            .chain(self.t.iter())
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}
