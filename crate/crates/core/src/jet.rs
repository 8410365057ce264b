//! 2-jets of maps `R^n -> R^N` and their discretized fields.

use serde::{Deserialize, Serialize};

use crate::dims::sym2_count;
use crate::error::{Error, Result};
use crate::index::SymIndex2;

/// The 2-jet `(x, f(x), f_i(x), f_ij(x))` of a map at one point.
///
/// `df[i]` is the vector `f_i` and `d2f[p]` is `f_ij` for the pair at
/// packed position `p` (`i <= j`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jet2 {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub df: Vec<Vec<f64>>,
    pub d2f: Vec<Vec<f64>>,
}

impl Jet2 {
    pub fn zeros(x: Vec<f64>, n_ambient: usize) -> Self {
        let n = x.len();
        Jet2 {
            x,
            f: vec![0.0; n_ambient],
            df: vec![vec![0.0; n_ambient]; n],
            d2f: vec![vec![0.0; n_ambient]; sym2_count(n)],
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn n_ambient(&self) -> usize {
        self.f.len()
    }

    /// `f_ij` for any order of `i`, `j`.
    pub fn d2(&self, i: usize, j: usize) -> &[f64] {
        &self.d2f[SymIndex2::new(i, j).position(self.n())]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let big_n = self.n_ambient();
        if n == 0 {
            return Err(Error::ZeroDimension(0));
        }
        if big_n == 0 {
            return Err(Error::ZeroDimension(0));
        }
        if self.df.len() != n {
            return Err(Error::DimensionMismatch {
                what: "number of first derivatives",
                expected: n,
                got: self.df.len(),
            });
        }
        if self.d2f.len() != sym2_count(n) {
            return Err(Error::DimensionMismatch {
                what: "number of packed second derivatives",
                expected: sym2_count(n),
                got: self.d2f.len(),
            });
        }
        for v in self.df.iter().chain(self.d2f.iter()) {
            if v.len() != big_n {
                return Err(Error::DimensionMismatch {
                    what: "derivative vector length",
                    expected: big_n,
                    got: v.len(),
                });
            }
        }
        Ok(())
    }

    /// Jet of `self + t * other` (same base point).
    pub fn axpy(&self, t: f64, other: &Jet2) -> Jet2 {
        let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + t * y).collect();
        Jet2 {
            x: self.x.clone(),
            f: add(&self.f, &other.f),
            df: self.df.iter().zip(&other.df).map(|(a, b)| add(a, b)).collect(),
            d2f: self.d2f.iter().zip(&other.d2f).map(|(a, b)| add(a, b)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Jet2 {
        let sc = |a: &[f64]| a.iter().map(|x| s * x).collect();
        Jet2 {
            x: self.x.clone(),
            f: sc(&self.f),
            df: self.df.iter().map(|a| sc(a)).collect(),
            d2f: self.d2f.iter().map(|a| sc(a)).collect(),
        }
    }
}

/// Regular grid. Node coordinates are `origin + idx * spacing` per axis,
/// flattened in row-major order (last axis fastest).
///
/// When `period` is set the grid covers exactly one period per axis and
/// `spacing = period / shape`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub shape: Vec<usize>,
    pub period: Option<Vec<f64>>,
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
}

impl Grid {
    pub fn periodic(shape: Vec<usize>, period: Vec<f64>) -> Result<Self> {
        if shape.len() != period.len() {
            return Err(Error::InvalidGrid("shape and period lengths differ".into()));
        }
        let spacing = shape.iter().zip(&period).map(|(&m, &p)| p / m as f64).collect();
        let g = Grid {
            origin: vec![0.0; shape.len()],
            shape,
            period: Some(period),
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    /// Closed box grid including both endpoints of every axis.
    pub fn uniform(shape: Vec<usize>, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if shape.len() != lo.len() || shape.len() != hi.len() {
            return Err(Error::InvalidGrid("shape and bounds lengths differ".into()));
        }
        let spacing = shape
            .iter()
            .zip(lo.iter().zip(&hi))
            .map(|(&m, (&a, &b))| if m > 1 { (b - a) / (m - 1) as f64 } else { 0.0 })
            .collect();
        let g = Grid {
            shape,
            period: None,
            origin: lo,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_periodic(&self) -> bool {
        self.period.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.shape.len();
        if n == 0 {
            return Err(Error::InvalidGrid("grid has no axes".into()));
        }
        if self.shape.contains(&0) {
            return Err(Error::InvalidGrid("axis with zero nodes".into()));
        }
        if self.origin.len() != n || self.spacing.len() != n {
            return Err(Error::InvalidGrid("origin/spacing length differs from shape".into()));
        }
        if let Some(p) = &self.period {
            if p.len() != n {
                return Err(Error::InvalidGrid("period length differs from shape".into()));
            }
            for a in 0..n {
                if !(p[a] > 0.0 && p[a].is_finite()) {
                    return Err(Error::InvalidGrid("period must be positive".into()));
                }
                let expect = p[a] / self.shape[a] as f64;
                if (self.spacing[a] - expect).abs() > 1e-12 * expect {
                    return Err(Error::InvalidGrid(format!(
                        "spacing {} on axis {a} does not equal period/shape = {expect}",
                        self.spacing[a]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &m)| acc * m + i)
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.origin[a] + i as f64 * self.spacing[a])
            .collect()
    }

    pub fn nodes(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.node(k)).collect()
    }

    /// Flat index of the neighbour `offset` steps along `axis`, wrapping.
    pub fn shifted(&self, flat: usize, axis: usize, offset: isize) -> usize {
        let mut idx = self.multi_index(flat);
        let m = self.shape[axis] as isize;
        idx[axis] = (idx[axis] as isize + offset).rem_euclid(m) as usize;
        self.flat_index(&idx)
    }
}

/// Sample locations: a regular grid or an explicit point list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Grid(Grid),
    Points(Vec<Vec<f64>>),
}

impl Chart {
    pub fn dim(&self) -> Option<usize> {
        match self {
            Chart::Grid(g) => Some(g.dim()),
            Chart::Points(p) => p.first().map(|x| x.len()),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Chart::Grid(g) => g.len(),
            Chart::Points(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        match self {
            Chart::Grid(g) => g.nodes(),
            Chart::Points(p) => p.clone(),
        }
    }

    pub fn periodic_grid(&self) -> Result<&Grid> {
        match self {
            Chart::Grid(g) if g.is_periodic() => Ok(g),
            _ => Err(Error::NotPeriodic),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Chart::Grid(g) => {
                g.validate()?;
                if g.dim() != n {
                    return Err(Error::DimensionMismatch {
                        what: "grid dimension",
                        expected: n,
                        got: g.dim(),
                    });
                }
            }
            Chart::Points(ps) => {
                for p in ps {
                    if p.len() != n {
                        return Err(Error::DimensionMismatch {
                            what: "point dimension",
                            expected: n,
                            got: p.len(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// One 2-jet per sample point of a chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetField {
    pub n: usize,
    #[serde(rename = "N")]
    pub n_ambient: usize,
    #[serde(flatten)]
    pub chart: Chart,
    pub jets: Vec<Jet2>,
}

impl JetField {
    pub fn new(n: usize, n_ambient: usize, chart: Chart, jets: Vec<Jet2>) -> Result<Self> {
        let field = JetField {
            n,
            n_ambient,
            chart,
            jets,
        };
        field.validate()?;
        Ok(field)
    }

    pub fn len(&self) -> usize {
        self.jets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jets.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n_ambient == 0 {
            return Err(Error::ZeroDimension(0));
        }
        self.chart.validate(self.n)?;
        if self.chart.len() != self.jets.len() {
            return Err(Error::DimensionMismatch {
                what: "number of jets vs chart points",
                expected: self.chart.len(),
                got: self.jets.len(),
            });
        }
        for jet in &self.jets {
            jet.validate()?;
            if jet.n() != self.n {
                return Err(Error::DimensionMismatch {
                    what: "jet chart dimension",
                    expected: self.n,
                    got: jet.n(),
                });
            }
            if jet.n_ambient() != self.n_ambient {
                return Err(Error::DimensionMismatch {
                    what: "jet ambient dimension",
                    expected: self.n_ambient,
                    got: jet.n_ambient(),
                });
            }
        }
        Ok(())
    }
}

/// A field of `N`-vectors over a chart, e.g. a variation `y` of a map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub n: usize,
    #[serde(rename = "N")]
    pub n_ambient: usize,
    #[serde(flatten)]
    pub chart: Chart,
    pub values: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n_ambient == 0 {
            return Err(Error::ZeroDimension(0));
        }
        self.chart.validate(self.n)?;
        if self.chart.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                what: "number of values vs chart points",
                expected: self.chart.len(),
                got: self.values.len(),
            });
        }
        for v in &self.values {
            if v.len() != self.n_ambient {
                return Err(Error::DimensionMismatch {
                    what: "vector length",
                    expected: self.n_ambient,
                    got: v.len(),
                });
            }
        }
        Ok(())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_indexing_round_trips() {
        let g = Grid::periodic(vec![3, 4, 5], vec![1.0, 2.0, 3.0]).unwrap();
        for k in 0..g.len() {
            assert_eq!(g.flat_index(&g.multi_index(k)), k);
        }
        assert_eq!(g.multi_index(1), vec![0, 0, 1]);
        assert_eq!(g.shifted(0, 2, -1), 4);
        assert_eq!(g.node(5), vec![0.0, 0.5, 0.0]);
    }

    #[test]
    fn uniform_grid_hits_endpoints() {
        let g = Grid::uniform(vec![9], vec![-1.0], vec![1.0]).unwrap();
        assert_eq!(g.node(0), vec![-1.0]);
        assert_eq!(g.node(8), vec![1.0]);
    }

    #[test]
    fn field_rejects_count_mismatch() {
        let g = Grid::periodic(vec![5], vec![1.0]).unwrap();
        let jets = vec![Jet2::zeros(vec![0.0], 2); 4];
        assert!(matches!(
            JetField::new(1, 2, Chart::Grid(g), jets),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn jet_validation() {
        let mut j = Jet2::zeros(vec![0.0, 0.0], 3);
        assert!(j.validate().is_ok());
        j.d2f.pop();
        assert!(j.validate().is_err());
    }
}
