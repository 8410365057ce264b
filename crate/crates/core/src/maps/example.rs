use super::poly::{PolyMap, Term};
use crate::error::Result;

fn lin(n: usize, a: usize, c: f64) -> Term {
    Term(c, PolyMap::unit_exponent(n, &[a]))
}

fn quad(n: usize, a: usize, b: usize) -> Term {
    Term(1.0, PolyMap::unit_exponent(n, &[a, b]))
}

/// The explicit free statistical map `R^n -> R^{m_n}`:
///
/// `(x_1, 2x_1, .., x_n, 2x_n, {x_j x_k}_{j<=k}, {x_j + x_k}_{j<k},
///   {x_p + x_q^2}_{p,q}, {x_a + x_b x_c}_{a<b<c})`
///
/// with blocks in this order and lexicographic order inside each block.
pub fn example_free_map(n: usize) -> Result<PolyMap> {
    crate::dims::dim_m(n)?;
    let mut comps: Vec<Vec<Term>> = Vec::new();
    for i in 0..n {
        comps.push(vec![lin(n, i, 1.0)]);
        comps.push(vec![lin(n, i, 2.0)]);
    }
    for j in 0..n {
        for k in j..n {
            comps.push(vec![quad(n, j, k)]);
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            comps.push(vec![lin(n, j, 1.0), lin(n, k, 1.0)]);
        }
    }
    for p in 0..n {
        for q in 0..n {
            comps.push(vec![lin(n, p, 1.0), quad(n, q, q)]);
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                comps.push(vec![lin(n, a, 1.0), quad(n, b, c)]);
            }
        }
    }
    PolyMap::new(n, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::dim_m;

    #[test]
    fn one_dimensional_case() {
        let m = example_free_map(1).unwrap();
        for x in [-0.8, 0.0, 0.4] {
            let v = m.eval(&[x]);
            assert_eq!(v, vec![x, 2.0 * x, x * x, x + x * x]);
            let j = m.eval_jet2(&[x]).unwrap();
            assert_eq!(j.df[0], vec![1.0, 2.0, 2.0 * x, 1.0 + 2.0 * x]);
        }
    }

    #[test]
    fn block_sizes() {
        // 2n + s_n + C(n,2) + n^2 + C(n,3)
        for (n, expect) in [(1, 4), (2, 12), (3, 25), (4, 44), (5, 70)] {
            let m = example_free_map(n).unwrap();
            assert_eq!(m.n_ambient, expect);
            assert_eq!(m.n_ambient, dim_m(n).unwrap());
        }
    }

    #[test]
    fn ordering_n2() {
        let m = example_free_map(2).unwrap();
        let (x, y) = (0.3, -0.6);
        let expect = vec![
            x,
            2.0 * x,
            y,
            2.0 * y,
            x * x,
            x * y,
            y * y,
            x + y,
            x + x * x,
            x + y * y,
            y + x * x,
            y + y * y,
        ];
        let got = m.eval(&[x, y]);
        for (a, b) in got.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
