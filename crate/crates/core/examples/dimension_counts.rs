//! Jet-space dimension counts and the codimension of the singular stratum.
//!
//! ```text
//! cargo run --example dimension_counts -- 10
//! ```

use isostat::{codim_singularity, dim_bound, dim_m, sym2_count, sym3_count};

fn main() -> isostat::Result<()> {
    let n_ambient: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    println!("{:>3} {:>5} {:>5} {:>5} {:>9} {:>12}", "n", "s_n", "c_n", "m_n", "dim_bound", format!("codim(N={n_ambient})"));
    for n in 1..=6 {
        println!(
            "{n:>3} {:>5} {:>5} {:>5} {:>9} {:>12}",
            sym2_count(n),
            sym3_count(n),
            dim_m(n)?,
            dim_bound(n)?,
            codim_singularity(n, n_ambient)?
        );
    }
    Ok(())
}
