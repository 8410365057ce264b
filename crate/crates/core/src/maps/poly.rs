use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::pairs;
use crate::jet::Jet2;

/// One monomial `coeff * x^exps`; serialized as `[coeff, [e1, .., en]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term(pub f64, pub Vec<u32>);

/// Polynomial map `R^n -> R^N`, one list of terms per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyMap {
    pub n: usize,
    #[serde(rename = "N")]
    pub n_ambient: usize,
    pub components: Vec<Vec<Term>>,
}

/// `d^d/dx^d x^e` evaluated at `x`.
fn dpow(x: f64, e: u32, d: u32) -> f64 {
    if d > e {
        return 0.0;
    }
    let falling: u32 = (0..d).map(|k| e - k).product();
    falling as f64 * x.powi((e - d) as i32)
}

impl PolyMap {
    pub fn new(n: usize, components: Vec<Vec<Term>>) -> Result<Self> {
        let map = PolyMap {
            n,
            n_ambient: components.len(),
            components,
        };
        map.validate()?;
        Ok(map)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n_ambient == 0 {
            return Err(Error::ZeroDimension(0));
        }
        if self.components.len() != self.n_ambient {
            return Err(Error::DimensionMismatch {
                what: "number of polynomial components",
                expected: self.n_ambient,
                got: self.components.len(),
            });
        }
        for term in self.components.iter().flatten() {
            if term.1.len() != self.n {
                return Err(Error::DimensionMismatch {
                    what: "exponent multi-index length",
                    expected: self.n,
                    got: term.1.len(),
                });
            }
        }
        Ok(())
    }

    /// The monomial `x_a` as an exponent vector helper.
    pub fn unit_exponent(n: usize, axes: &[usize]) -> Vec<u32> {
        let mut e = vec![0; n];
        for &a in axes {
            e[a] += 1;
        }
        e
    }

    fn monomial_derivative(&self, exps: &[u32], order: &[u32], x: &[f64]) -> f64 {
        exps.iter()
            .zip(order)
            .zip(x)
            .map(|((&e, &d), &xa)| dpow(xa, e, d))
            .product()
    }

    /// Exact partial derivative `d^order` of every component at `x`.
    pub fn derivative_at(&self, order: &[u32], x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|t| t.0 * self.monomial_derivative(&t.1, order, x))
                    .sum()
            })
            .collect()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.derivative_at(&vec![0; self.n], x)
    }

    pub fn eval_jet2(&self, x: &[f64]) -> Result<Jet2> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                what: "point dimension",
                expected: self.n,
                got: x.len(),
            });
        }
        let n = self.n;
        let f = self.eval(x);
        let df = (0..n)
            .map(|i| self.derivative_at(&PolyMap::unit_exponent(n, &[i]), x))
            .collect();
        let d2f = pairs(n)
            .map(|p| self.derivative_at(&PolyMap::unit_exponent(n, &[p.i, p.j]), x))
            .collect();
        Ok(Jet2 {
            x: x.to_vec(),
            f,
            df,
            d2f,
        })
    }

    /// Componentwise sum; terms are concatenated, not collected.
    pub fn add(&self, other: &PolyMap) -> Result<PolyMap> {
        if self.n != other.n || self.n_ambient != other.n_ambient {
            return Err(Error::DimensionMismatch {
                what: "polynomial map shapes",
                expected: self.n_ambient,
                got: other.n_ambient,
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().chain(b).cloned().collect())
            .collect();
        Ok(PolyMap {
            n: self.n,
            n_ambient: self.n_ambient,
            components,
        })
    }

    pub fn scaled(&self, s: f64) -> PolyMap {
        PolyMap {
            n: self.n,
            n_ambient: self.n_ambient,
            components: self
                .components
                .iter()
                .map(|ts| ts.iter().map(|t| Term(s * t.0, t.1.clone())).collect())
                .collect(),
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.components
            .iter()
            .flatten()
            .map(|t| t.1.iter().sum())
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> PolyMap {
        // (x, x^2)
        PolyMap::new(1, vec![vec![Term(1.0, vec![1])], vec![Term(1.0, vec![2])]]).unwrap()
    }

    #[test]
    fn parabola_jet() {
        let j = curve().eval_jet2(&[1.0]).unwrap();
        assert_eq!(j.f, vec![1.0, 1.0]);
        assert_eq!(j.df, vec![vec![1.0, 2.0]]);
        assert_eq!(j.d2f, vec![vec![0.0, 2.0]]);
    }

    #[test]
    fn identity_line() {
        let m = PolyMap::new(1, vec![vec![Term(1.0, vec![1])]]).unwrap();
        let j = m.eval_jet2(&[0.37]).unwrap();
        assert_eq!(j.df, vec![vec![1.0]]);
        assert_eq!(j.d2f, vec![vec![0.0]]);
    }

    #[test]
    fn constant_component_has_zero_derivatives() {
        let m = PolyMap::new(2, vec![vec![Term(3.5, vec![0, 0])], vec![Term(1.0, vec![2, 1])]])
            .unwrap();
        let j = m.eval_jet2(&[0.3, -0.7]).unwrap();
        assert!(j.df.iter().all(|v| v[0] == 0.0));
        assert!(j.d2f.iter().all(|v| v[0] == 0.0));
        // d/dx d/dy of x^2 y = 2x
        assert!((j.d2(0, 1)[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(curve().eval_jet2(&[1.0, 2.0]).is_err());
        assert!(PolyMap::new(2, vec![vec![Term(1.0, vec![1])]]).is_err());
    }
}
