//! Certifies the built-in free map on random points of `[-1, 1]^n`.

use isostat::freeness::{certify_free, freeness_matrix, DEFAULT_TOL_RANK};
use isostat::io::GridSpec;
use isostat::{dim_m, example_free_map, sample_jets, SmoothMap};

fn main() -> isostat::Result<()> {
    let spec: GridSpec = "random:100:seed=7".parse()?;
    for n in 1..=3 {
        let map = example_free_map(n)?;
        let jets = sample_jets(&SmoothMap::Poly(map.clone()), &spec.chart(n)?)?;
        let report = certify_free(&jets, DEFAULT_TOL_RANK)?;
        println!(
            "n={n} N={} m={} free {}/{} min sigma ratio {:.3e}",
            map.n_ambient,
            dim_m(n)?,
            report.free_count(),
            report.points.len(),
            report.min_ratio
        );
    }

    // at n = 1 the system is square; its determinant at the origin is known by hand
    let jet = example_free_map(1)?.eval_jet2(&[0.0])?;
    let a = freeness_matrix(&jet);
    println!("n=1, x=0: freeness matrix\n{a}|det| = {}", a.determinant().abs());
    Ok(())
}
