#![allow(dead_code)]

use isostat::maps::Term;
use isostat::PolyMap;
use rand::Rng;

/// Random polynomial map with six terms of degree at most 2 per axis in
/// each component.
pub fn random_poly(n: usize, n_ambient: usize, rng: &mut impl Rng) -> PolyMap {
    let components = (0..n_ambient)
        .map(|_| {
            (0..6)
                .map(|_| {
                    let exps = (0..n).map(|_| rng.random_range(0..=2)).collect();
                    Term(rng.random_range(-1.0..1.0), exps)
                })
                .collect()
        })
        .collect();
    PolyMap::new(n, components).expect("well-formed")
}

pub fn random_point(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}
