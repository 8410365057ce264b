//! Central second-order finite differences on periodic grids.

use crate::dims::sym2_count;
use crate::error::{Error, Result};
use crate::index::pairs;
use crate::jet::{Grid, Jet2};

const MIN_NODES: usize = 5;

fn check_grid(grid: &Grid, values: &[Vec<f64>]) -> Result<()> {
    if !grid.is_periodic() {
        return Err(Error::NotPeriodic);
    }
    if let Some(&m) = grid.shape.iter().find(|&&m| m < MIN_NODES) {
        return Err(Error::InvalidGrid(format!(
            "finite differences need at least {MIN_NODES} nodes per axis, got {m}"
        )));
    }
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            what: "values vs grid nodes",
            expected: grid.len(),
            got: values.len(),
        });
    }
    Ok(())
}

/// `(v[+1] - v[-1]) / 2h` along `axis`.
fn first_along(grid: &Grid, values: &[Vec<f64>], axis: usize) -> Vec<Vec<f64>> {
    let h = grid.spacing[axis];
    (0..grid.len())
        .map(|p| {
            let (a, b) = (grid.shifted(p, axis, 1), grid.shifted(p, axis, -1));
            values[a]
                .iter()
                .zip(&values[b])
                .map(|(u, v)| (u - v) / (2.0 * h))
                .collect()
        })
        .collect()
}

/// `(v[+1] - 2 v[0] + v[-1]) / h^2` along `axis`.
fn second_along(grid: &Grid, values: &[Vec<f64>], axis: usize) -> Vec<Vec<f64>> {
    let h = grid.spacing[axis];
    (0..grid.len())
        .map(|p| {
            let (a, b) = (grid.shifted(p, axis, 1), grid.shifted(p, axis, -1));
            values[a]
                .iter()
                .zip(&values[p])
                .zip(&values[b])
                .map(|((u, c), v)| (u - 2.0 * c + v) / (h * h))
                .collect()
        })
        .collect()
}

/// Per-node derivative vectors of a periodic field.
///
/// `order = 1` returns `n` vectors per node (`d/dx_i`); `order = 2` returns
/// `s_n` vectors per node in packed `i <= j` order, mixed terms by applying
/// the first-derivative stencil twice.
pub fn fd_derivatives(
    values: &[Vec<f64>],
    grid: &Grid,
    order: u8,
) -> Result<Vec<Vec<Vec<f64>>>> {
    check_grid(grid, values)?;
    let n = grid.dim();
    let nodes = grid.len();
    match order {
        1 => {
            let per_axis: Vec<_> = (0..n).map(|a| first_along(grid, values, a)).collect();
            Ok((0..nodes)
                .map(|p| per_axis.iter().map(|d| d[p].clone()).collect())
                .collect())
        }
        2 => {
            let firsts: Vec<_> = (0..n).map(|a| first_along(grid, values, a)).collect();
            let per_pair: Vec<_> = pairs(n)
                .map(|ij| {
                    if ij.i == ij.j {
                        second_along(grid, values, ij.i)
                    } else {
                        first_along(grid, &firsts[ij.j], ij.i)
                    }
                })
                .collect();
            debug_assert_eq!(per_pair.len(), sym2_count(n));
            Ok((0..nodes)
                .map(|p| per_pair.iter().map(|d| d[p].clone()).collect())
                .collect())
        }
        o => Err(Error::InvalidArgument(format!(
            "finite-difference order must be 1 or 2, got {o}"
        ))),
    }
}

/// Jets of a sampled field with all derivatives from finite differences.
pub fn fd_jets(values: &[Vec<f64>], grid: &Grid) -> Result<Vec<Jet2>> {
    let d1 = fd_derivatives(values, grid, 1)?;
    let d2 = fd_derivatives(values, grid, 2)?;
    Ok(grid
        .nodes()
        .into_iter()
        .zip(values)
        .zip(d1.into_iter().zip(d2))
        .map(|((x, f), (df, d2f))| Jet2 {
            x,
            f: f.clone(),
            df,
            d2f,
        })
        .collect())
}
