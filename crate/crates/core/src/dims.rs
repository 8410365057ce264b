//! Dimension counts for the freeness system.
//!
//! For a chart of dimension `n` the pointwise system has one row per
//! first derivative, one per second derivative `(i <= j)`, one per
//! Hadamard square `f_j * f_k` `(j <= k)` and one per symmetrized triple
//! `(i <= j <= k)`.

use crate::error::{Error, Result};

fn check(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::ZeroDimension(n))
    } else {
        Ok(())
    }
}

/// `s_n = n(n+1)/2`, the number of pairs `i <= j`.
pub fn sym2_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// `c_n = C(n+2, 3)`, the number of triples `i <= j <= k`.
pub fn sym3_count(n: usize) -> usize {
    n * (n + 1) * (n + 2) / 6
}

/// Number of rows of the freeness matrix, `n(n^2 + 9n + 14)/6`.
pub fn dim_m(n: usize) -> Result<usize> {
    check(n)?;
    Ok(n * (n * n + 9 * n + 14) / 6)
}

/// Smallest ambient dimension for which generic maps are free,
/// `n(n^2 + 9n + 20)/6`.
pub fn dim_bound(n: usize) -> Result<usize> {
    check(n)?;
    Ok(n * (n * n + 9 * n + 20) / 6)
}

/// Codimension `N - m_n + 1` of the non-free stratum in the 2-jet fibre.
///
/// Values `<= 0` mean every 2-jet is non-free.
pub fn codim_singularity(n: usize, n_ambient: usize) -> Result<i64> {
    check(n)?;
    check(n_ambient)?;
    Ok(n_ambient as i64 - dim_m(n)? as i64 + 1)
}
