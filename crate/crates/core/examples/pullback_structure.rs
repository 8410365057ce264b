//! Induced metric and cubic form of the example curve, and the identity
//! `T_can(u, v, w) = <u * v, w>` behind the cubic form.

use isostat::io::GridSpec;
use isostat::pullback::dot;
use isostat::{example_free_map, hadamard, pullback_field, sample_jets, t_can, SmoothMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> isostat::Result<()> {
    let spec: GridSpec = "uniform:9:[-1,1]".parse()?;
    let chart = spec.chart(1)?;
    let jets = sample_jets(&SmoothMap::Poly(example_free_map(1)?), &chart)?;
    let induced = pullback_field(&jets);
    println!("{:>6} {:>10} {:>10} {:>12}", "x", "g_11", "hand", "T_111");
    for (p, x) in chart.points().iter().enumerate() {
        let x = x[0];
        let hand = 5.0 + 4.0 * x * x + (1.0 + 2.0 * x).powi(2);
        println!("{x:>6.2} {:>10.4} {hand:>10.4} {:>12.4}", induced.structure.g[p][0], induced.structure.t[p][0]);
    }
    println!("non-immersion points: {:?}", induced.non_immersion_points);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let big = rng.random_range(1..=64);
        let mut v = || (0..big).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
        let (u, w, z) = (v(), v(), v());
        let lhs = t_can(&u, &w, &z)?;
        let rhs = dot(&hadamard(&u, &w)?, &z);
        let scale = u.iter().zip(&w).zip(&z).map(|((a, b), c)| (a * b * c).abs()).sum::<f64>();
        worst = worst.max((lhs - rhs).abs() / scale.max(f64::MIN_POSITIVE));
    }
    println!("Hadamard identity, 1000 random triples: max relative error {worst:.2e}");
    Ok(())
}
