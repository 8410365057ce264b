//! Matrix-free GMRES (no restarts) for small square systems.

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `||b - A x|| / ||b||` as tracked by the Givens recurrence.
    pub relative_residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` from `x0 = 0` until the relative residual drops below
/// `tol` or `max_iter` Arnoldi steps have been taken.
pub fn gmres<F>(mut apply: F, b: &[f64], tol: f64, max_iter: usize) -> Result<GmresOutcome>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let dim = b.len();
    let beta = norm(b);
    if beta == 0.0 || max_iter == 0 {
        return Ok(GmresOutcome {
            x: vec![0.0; dim],
            iterations: 0,
            relative_residual: if beta == 0.0 { 0.0 } else { 1.0 },
        });
    }
    let max_iter = max_iter.min(dim);
    let mut basis: Vec<Vec<f64>> = vec![b.iter().map(|v| v / beta).collect()];
    // Hessenberg columns after rotation
    let mut h: Vec<Vec<f64>> = Vec::new();
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<f64> = Vec::new();
    let mut g = vec![beta];
    let mut k = 0;
    let mut rel = 1.0;
    while k < max_iter {
        let mut w = apply(&basis[k])?;
        let mut col = vec![0.0; k + 2];
        for (i, q) in basis.iter().enumerate() {
            let hij = dot(&w, q);
            col[i] = hij;
            for (wv, qv) in w.iter_mut().zip(q) {
                *wv -= hij * qv;
            }
        }
        // second Gram-Schmidt pass
        for (i, q) in basis.iter().enumerate() {
            let c = dot(&w, q);
            col[i] += c;
            for (wv, qv) in w.iter_mut().zip(q) {
                *wv -= c * qv;
            }
        }
        let wn = norm(&w);
        col[k + 1] = wn;
        for i in 0..k {
            let (a, b) = (col[i], col[i + 1]);
            col[i] = cs[i] * a + sn[i] * b;
            col[i + 1] = -sn[i] * a + cs[i] * b;
        }
        let r = col[k].hypot(col[k + 1]);
        let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (col[k] / r, col[k + 1] / r) };
        cs.push(c);
        sn.push(s);
        col[k] = r;
        col[k + 1] = 0.0;
        g.push(-s * g[k]);
        g[k] *= c;
        h.push(col);
        k += 1;
        rel = g[k].abs() / beta;
        if rel <= tol || wn <= 1e-14 * beta {
            break;
        }
        basis.push(w.iter().map(|v| v / wn).collect());
    }
    // back substitution on the k x k triangle
    let mut yk = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| h[j][i] * yk[j]).sum();
        yk[i] = (g[i] - s) / h[i][i];
    }
    let mut x = vec![0.0; dim];
    for (j, yj) in yk.iter().enumerate() {
        for (xv, qv) in x.iter_mut().zip(&basis[j]) {
            *xv += yj * qv;
        }
    }
    Ok(GmresOutcome {
        x,
        iterations: k,
        relative_residual: rel,
    })
}
