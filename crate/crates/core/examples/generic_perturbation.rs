//! Small random quadratic perturbations make a degenerate map free.

use isostat::freeness::{perturb_to_free, DEFAULT_RETRY_BUDGET};
use isostat::maps::Term;
use isostat::{certify_free, dim_bound, sample_jets, Chart, Error, PolyMap, SmoothMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> isostat::Result<()> {
    // x -> (x, 0, 0, 0, 0)
    let mut components = vec![vec![Term(1.0, vec![1])]];
    components.extend(std::iter::repeat_n(Vec::new(), dim_bound(1)? - 1));
    let line = PolyMap::new(1, components)?;

    let mut first_try = 0;
    let mut attempts = Vec::new();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
        let probes: Vec<Vec<f64>> = (0..50).map(|_| vec![rng.random_range(-1.0..=1.0)]).collect();
        let before = certify_free(&sample_jets(&SmoothMap::Poly(line.clone()), &Chart::Points(probes.clone()))?, 1e-10)?;
        assert_eq!(before.free_count(), 0);
        let out = perturb_to_free(&line, 0.1, seed, &probes)?;
        first_try += usize::from(out.attempts == 1);
        attempts.push(out.attempts);
    }
    println!("free after one perturbation: {first_try}/100 (budget {DEFAULT_RETRY_BUDGET})");
    println!("attempts used: max {}", attempts.iter().max().unwrap());

    let short = PolyMap::new(1, vec![vec![Term(1.0, vec![1])]; 4])?;
    match perturb_to_free(&short, 0.1, 0, &[vec![0.0]]) {
        Err(e @ Error::BelowDimensionBound { .. }) => println!("N = 4: {e}"),
        other => println!("N = 4: unexpected {other:?}"),
    }
    Ok(())
}
