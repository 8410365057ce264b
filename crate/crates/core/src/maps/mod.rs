//! Smooth maps with exact 2-jets, and their sampling over charts.

mod example;
pub mod fd;
mod poly;
mod trig;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use example::example_free_map;
pub use fd::{fd_derivatives, fd_jets};
pub use poly::{PolyMap, Term};
pub use trig::{TrigMap, TrigMode};

use crate::error::Result;
use crate::jet::{Chart, Jet2, JetField};

/// Either map class. Serialized untagged: a document with a `period`
/// field is a [`TrigMap`], otherwise a [`PolyMap`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SmoothMap {
    Trig(TrigMap),
    Poly(PolyMap),
}

impl SmoothMap {
    pub fn n(&self) -> usize {
        match self {
            SmoothMap::Poly(p) => p.n,
            SmoothMap::Trig(t) => t.n,
        }
    }

    pub fn n_ambient(&self) -> usize {
        match self {
            SmoothMap::Poly(p) => p.n_ambient,
            SmoothMap::Trig(t) => t.n_ambient,
        }
    }

    pub fn eval_jet2(&self, x: &[f64]) -> Result<Jet2> {
        match self {
            SmoothMap::Poly(p) => p.eval_jet2(x),
            SmoothMap::Trig(t) => t.eval_jet2(x),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SmoothMap::Poly(p) => p.validate(),
            SmoothMap::Trig(t) => t.validate(),
        }
    }
}

impl From<PolyMap> for SmoothMap {
    fn from(p: PolyMap) -> Self {
        SmoothMap::Poly(p)
    }
}

impl From<TrigMap> for SmoothMap {
    fn from(t: TrigMap) -> Self {
        SmoothMap::Trig(t)
    }
}

/// Exact jets of `map` at every point of `chart`.
///
/// A trigonometric map on a periodic grid must share the grid's period.
pub fn sample_jets(map: &SmoothMap, chart: &Chart) -> Result<JetField> {
    chart.validate(map.n())?;
    if let (SmoothMap::Trig(t), Chart::Grid(g)) = (map, chart) {
        if g.is_periodic() {
            t.check_grid(g)?;
        }
    }
    let jets = chart
        .points()
        .par_iter()
        .map(|x| map.eval_jet2(x))
        .collect::<Result<Vec<_>>>()?;
    JetField::new(map.n(), map.n_ambient(), chart.clone(), jets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Grid;

    #[test]
    fn parabola_on_three_nodes() {
        let m: SmoothMap =
            PolyMap::new(1, vec![vec![Term(1.0, vec![1])], vec![Term(1.0, vec![2])]])
                .unwrap()
                .into();
        let chart = Chart::Grid(Grid::uniform(vec![3], vec![0.0], vec![1.0]).unwrap());
        let field = sample_jets(&m, &chart).unwrap();
        let xs: Vec<f64> = field.jets.iter().map(|j| j.x[0]).collect();
        assert_eq!(xs, vec![0.0, 0.5, 1.0]);
        for j in &field.jets {
            assert_eq!(j.df[0], vec![1.0, 2.0 * j.x[0]]);
            assert_eq!(j.d2f[0], vec![0.0, 2.0]);
        }
    }

    #[test]
    fn constant_map_has_zero_jets() {
        let m: SmoothMap = PolyMap::new(2, vec![vec![Term(1.0, vec![0, 0])]; 3]).unwrap().into();
        let chart = Chart::Points(vec![vec![0.1, 0.2], vec![-3.0, 4.0]]);
        let field = sample_jets(&m, &chart).unwrap();
        assert!(field
            .jets
            .iter()
            .all(|j| j.df.iter().chain(&j.d2f).flatten().all(|&v| v == 0.0)));
    }

    #[test]
    fn example_map_first_derivatives() {
        let m: SmoothMap = example_free_map(1).unwrap().into();
        let chart = Chart::Points(vec![vec![-0.5], vec![0.25]]);
        let field = sample_jets(&m, &chart).unwrap();
        for j in &field.jets {
            let x = j.x[0];
            assert_eq!(j.df[0], vec![1.0, 2.0, 2.0 * x, 1.0 + 2.0 * x]);
        }
    }

    #[test]
    fn trig_period_mismatch_rejected() {
        let m: SmoothMap =
            TrigMap::new(vec![1.0], vec![vec![TrigMode(1.0, 0.0, vec![1])]]).unwrap().into();
        let chart = Chart::Grid(Grid::periodic(vec![8], vec![0.5]).unwrap());
        assert!(sample_jets(&m, &chart).is_err());
    }
}
