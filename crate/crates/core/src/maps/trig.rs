use std::collections::BTreeMap;
use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::pairs;
use crate::jet::{Grid, Jet2};

/// `a cos(theta) + b sin(theta)` with `theta = sum_a 2 pi k_a x_a / P_a`;
/// serialized as `[coeff_cos, coeff_sin, [k1, .., kn]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigMode(pub f64, pub f64, pub Vec<i64>);

/// Trigonometric polynomial map `R^n -> R^N`, periodic with `period`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigMap {
    pub n: usize,
    #[serde(rename = "N")]
    pub n_ambient: usize,
    pub period: Vec<f64>,
    pub modes: Vec<Vec<TrigMode>>,
}

/// Canonical representative of `{k, -k}`: first non-zero entry positive.
fn canonical(k: &[i64]) -> (Vec<i64>, f64) {
    match k.iter().find(|&&v| v != 0) {
        Some(&v) if v < 0 => (k.iter().map(|v| -v).collect(), -1.0),
        _ => (k.to_vec(), 1.0),
    }
}

fn merge_modes<'a>(modes: impl Iterator<Item = &'a TrigMode>) -> Vec<TrigMode> {
    let mut acc: BTreeMap<Vec<i64>, (f64, f64)> = BTreeMap::new();
    for TrigMode(a, b, k) in modes {
        let (key, sign) = canonical(k);
        let e = acc.entry(key).or_insert((0.0, 0.0));
        e.0 += a;
        e.1 += sign * b;
    }
    acc.into_iter()
        .map(|(k, (a, b))| {
            let b = if k.iter().all(|&v| v == 0) { 0.0 } else { b };
            TrigMode(a, b, k)
        })
        .collect()
}

impl TrigMap {
    pub fn new(period: Vec<f64>, modes: Vec<Vec<TrigMode>>) -> Result<Self> {
        let map = TrigMap {
            n: period.len(),
            n_ambient: modes.len(),
            period,
            modes,
        };
        map.validate()?;
        Ok(map)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n_ambient == 0 {
            return Err(Error::ZeroDimension(0));
        }
        if self.period.len() != self.n {
            return Err(Error::DimensionMismatch {
                what: "period length",
                expected: self.n,
                got: self.period.len(),
            });
        }
        if self.period.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvalidArgument("periods must be positive".into()));
        }
        if self.modes.len() != self.n_ambient {
            return Err(Error::DimensionMismatch {
                what: "number of trigonometric components",
                expected: self.n_ambient,
                got: self.modes.len(),
            });
        }
        for m in self.modes.iter().flatten() {
            if m.2.len() != self.n {
                return Err(Error::DimensionMismatch {
                    what: "wave-vector length",
                    expected: self.n,
                    got: m.2.len(),
                });
            }
        }
        Ok(())
    }

    fn omega(&self, k: &[i64]) -> Vec<f64> {
        k.iter()
            .zip(&self.period)
            .map(|(&ka, &p)| 2.0 * PI * ka as f64 / p)
            .collect()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.modes
            .iter()
            .map(|modes| {
                modes
                    .iter()
                    .map(|TrigMode(a, b, k)| {
                        let th: f64 = self.omega(k).iter().zip(x).map(|(w, xa)| w * xa).sum();
                        a * th.cos() + b * th.sin()
                    })
                    .sum()
            })
            .collect()
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
        let mut jet = Jet2::zeros(x.to_vec(), self.n_ambient);
        for (c, modes) in self.modes.iter().enumerate() {
            for TrigMode(a, b, k) in modes {
                let w = self.omega(k);
                let th: f64 = w.iter().zip(x).map(|(w, xa)| w * xa).sum();
                let (s, co) = th.sin_cos();
                let val = a * co + b * s;
                let dval = -a * s + b * co;
                jet.f[c] += val;
                for i in 0..n {
                    jet.df[i][c] += w[i] * dval;
                }
                for (p, ij) in pairs(n).enumerate() {
                    jet.d2f[p][c] -= w[ij.i] * w[ij.j] * val;
                }
            }
        }
        Ok(jet)
    }

    /// Componentwise sum with modes merged by wave vector.
    pub fn add(&self, other: &TrigMap) -> Result<TrigMap> {
        self.check_compatible(other)?;
        Ok(self.add_scaled(1.0, other))
    }

    fn check_compatible(&self, other: &TrigMap) -> Result<()> {
        if self.n != other.n || self.n_ambient != other.n_ambient {
            return Err(Error::DimensionMismatch {
                what: "trigonometric map shapes",
                expected: self.n_ambient,
                got: other.n_ambient,
            });
        }
        if self
            .period
            .iter()
            .zip(&other.period)
            .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs())
        {
            return Err(Error::PeriodMismatch {
                map: self.period.clone(),
                grid: other.period.clone(),
            });
        }
        Ok(())
    }

    fn add_scaled(&self, s: f64, other: &TrigMap) -> TrigMap {
        let modes = self
            .modes
            .iter()
            .zip(&other.modes)
            .map(|(a, b)| {
                let scaled: Vec<TrigMode> =
                    b.iter().map(|m| TrigMode(s * m.0, s * m.1, m.2.clone())).collect();
                merge_modes(a.iter().chain(scaled.iter()))
            })
            .collect();
        TrigMap {
            n: self.n,
            n_ambient: self.n_ambient,
            period: self.period.clone(),
            modes,
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &TrigMap) -> Result<TrigMap> {
        self.check_compatible(other)?;
        Ok(self.add_scaled(s, other))
    }

    pub fn scaled(&self, s: f64) -> TrigMap {
        TrigMap {
            n: self.n,
            n_ambient: self.n_ambient,
            period: self.period.clone(),
            modes: self
                .modes
                .iter()
                .map(|ms| ms.iter().map(|m| TrigMode(s * m.0, s * m.1, m.2.clone())).collect())
                .collect(),
        }
    }

    /// Sum of squared coefficients over all modes (a Parseval-type size).
    pub fn coefficient_norm(&self) -> f64 {
        self.modes
            .iter()
            .flatten()
            .map(|m| m.0 * m.0 + m.1 * m.1)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_wavenumber(&self) -> i64 {
        self.modes
            .iter()
            .flatten()
            .flat_map(|m| m.2.iter().map(|k| k.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Checks that the map's period agrees with a periodic grid.
    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        let gp = grid.period.as_ref().ok_or(Error::NotPeriodic)?;
        if gp.len() != self.n
            || gp
                .iter()
                .zip(&self.period)
                .any(|(a, b)| (a - b).abs() > 1e-12 * b.abs())
        {
            return Err(Error::PeriodMismatch {
                map: self.period.clone(),
                grid: gp.clone(),
            });
        }
        Ok(())
    }

    /// Exact trigonometric interpolant of per-node vectors on a periodic grid.
    ///
    /// Wave numbers per axis range over `-(M-1)/2 ..= M/2`. Only modes with
    /// `|k_a| <= cutoff * M_a / 2` on every axis are kept; `cutoff = 1`
    /// keeps all and reproduces the node values exactly.
    pub fn interpolate(grid: &Grid, values: &[Vec<f64>], cutoff: f64) -> Result<TrigMap> {
        let period = grid.period.clone().ok_or(Error::NotPeriodic)?;
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                what: "values vs grid nodes",
                expected: grid.len(),
                got: values.len(),
            });
        }
        if !(cutoff > 0.0 && cutoff <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "smoothing cutoff must lie in (0, 1], got {cutoff}"
            )));
        }
        let big_n = values.first().map_or(0, |v| v.len());
        let n = grid.dim();
        let total = grid.len() as f64;
        let spectra = grid_spectra(grid, values);

        let mut modes: Vec<Vec<TrigMode>> = vec![Vec::new(); big_n];
        for flat in 0..grid.len() {
            let idx = grid.multi_index(flat);
            // bin i holds wave number i or i - M, whichever lies in -(M-1)/2 ..= M/2
            let k: Vec<i64> = idx
                .iter()
                .zip(&grid.shape)
                .map(|(&i, &m)| if 2 * i > m { i as i64 - m as i64 } else { i as i64 })
                .collect();
            if !k
                .iter()
                .zip(&grid.shape)
                .all(|(&ka, &m)| ka.abs() as f64 <= cutoff * m as f64 / 2.0 + 1e-12)
            {
                continue;
            }
            // nodes start at the grid origin rather than at zero
            let shift: f64 = (0..n).map(|a| 2.0 * PI * k[a] as f64 / period[a] * grid.origin[a]).sum();
            let phase = Complex::from_polar(1.0 / total, -shift);
            for comp in 0..big_n {
                let c = spectra[comp][flat] * phase;
                // Re(c e^{i th}) = Re(c) cos th - Im(c) sin th
                modes[comp].push(TrigMode(c.re, -c.im, k.clone()));
            }
        }
        let modes = modes.iter().map(|m| merge_modes(m.iter())).collect();
        Ok(TrigMap {
            n,
            n_ambient: big_n,
            period,
            modes,
        })
    }
}

/// Unnormalized forward DFT of every component over the grid, in the
/// grid's row-major node order.
fn grid_spectra(grid: &Grid, values: &[Vec<f64>]) -> Vec<Vec<Complex<f64>>> {
    let big_n = values.first().map_or(0, |v| v.len());
    let mut planner = FftPlanner::<f64>::new();
    let plans: Vec<_> = grid.shape.iter().map(|&m| planner.plan_fft_forward(m)).collect();
    let mut out = Vec::with_capacity(big_n);
    for comp in 0..big_n {
        let mut data: Vec<Complex<f64>> = values.iter().map(|v| Complex::new(v[comp], 0.0)).collect();
        let mut stride = 1;
        for axis in (0..grid.dim()).rev() {
            let m = grid.shape[axis];
            let block = m * stride;
            let mut line = vec![Complex::new(0.0, 0.0); m];
            for base in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    for (i, z) in line.iter_mut().enumerate() {
                        *z = data[base + offset + i * stride];
                    }
                    plans[axis].process(&mut line);
                    for (i, z) in line.iter().enumerate() {
                        data[base + offset + i * stride] = *z;
                    }
                }
            }
            stride = block;
        }
        out.push(data);
    }
    out
}
