//! The linearized inducing operator against central differences of the
//! induced structure along random polynomial variations.

use isostat::maps::Term;
use isostat::{apply_l, pullback_point, PolyMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_poly(n: usize, n_ambient: usize, rng: &mut impl Rng) -> PolyMap {
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

fn sup_diff(a: &(Vec<f64>, Vec<f64>), b: &(Vec<f64>, Vec<f64>)) -> f64 {
    a.0.iter().chain(&a.1).zip(b.0.iter().chain(&b.1)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn main() -> isostat::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..8 {
        let n = rng.random_range(1..=3);
        let n_ambient = rng.random_range(n..=8);
        let f = random_poly(n, n_ambient, &mut rng);
        let y = random_poly(n, n_ambient, &mut rng);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (fj, yj) = (f.eval_jet2(&x)?, y.eval_jet2(&x)?);
        let linear = apply_l(&fj, &yj)?;
        let err = |t: f64| {
            let (gp, tp) = pullback_point(&fj.axpy(t, &yj));
            let (gm, tm) = pullback_point(&fj.axpy(-t, &yj));
            let quotient = (
                gp.iter().zip(&gm).map(|(a, b)| (a - b) / (2.0 * t)).collect(),
                tp.iter().zip(&tm).map(|(a, b)| (a - b) / (2.0 * t)).collect(),
            );
            sup_diff(&quotient, &linear)
        };
        let (e1, e2) = (err(1e-3), err(5e-4));
        println!("trial {trial}: n={n} N={n_ambient} err(1e-3)={e1:.3e} err(5e-4)={e2:.3e} ratio={:.4}", e1 / e2);
    }

    // L(f, f) = (2g, 3T)
    let f = random_poly(2, 6, &mut rng);
    let fj = f.eval_jet2(&[0.3, -0.4])?;
    let (g, t) = pullback_point(&fj);
    let (lg, lt) = apply_l(&fj, &fj)?;
    let scaled = (g.iter().map(|v| 2.0 * v).collect(), t.iter().map(|v| 3.0 * v).collect());
    println!("|L(f,f) - (2g,3T)| = {:.2e}", sup_diff(&(lg, lt), &scaled));
    Ok(())
}
