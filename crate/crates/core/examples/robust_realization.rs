//! Newton iteration realizing perturbed structures on the default chart:
//! the base experiment with its trace, then twenty random directions.

use isostat::iterate::{default_experiment, DEFAULT_EPS, DEFAULT_TARGET_SEED};
use isostat::{solve_structure, SolveOptions, SolveStatus};

fn main() -> isostat::Result<()> {
    let opts = SolveOptions::default();
    let (grid, f, target) = default_experiment(DEFAULT_EPS, DEFAULT_TARGET_SEED)?;
    let out = solve_structure(&f, &grid, &target, &opts)?;
    print!("{}", out.trace.to_csv());
    println!("status {:?}, final residual {:.3e}", out.status, out.final_residual);
    println!("contraction constants {:?}", out.trace.contraction_constants());

    let mut converged = 0;
    for direction in 0..20 {
        let (grid, f, target) = default_experiment(DEFAULT_EPS, 1000 + direction)?;
        let out = solve_structure(&f, &grid, &target, &opts)?;
        converged += usize::from(out.status == SolveStatus::Converged);
        println!("direction {direction:>2}: {:?} in {} steps, residual {:.2e}", out.status, out.iterations, out.final_residual);
    }
    println!("{converged}/20 converged");

    for eps in [1e-2, 1e-1, 1.0] {
        let (grid, f, target) = default_experiment(eps, DEFAULT_TARGET_SEED)?;
        let out = solve_structure(&f, &grid, &target, &opts)?;
        println!("eps {eps:e}: {:?} after {} steps, residual {:.2e}", out.status, out.iterations, out.final_residual);
    }
    Ok(())
}
