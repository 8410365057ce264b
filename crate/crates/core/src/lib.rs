//! Statistical structures induced on a coordinate chart by smooth maps
//! into `(R^N, g_can, T_can)`, where `g_can = sum dx_a^2` and
//! `T_can = sum dx_a^3`.
//!
//! The crate computes the induced pair `(f* g_can, f* T_can)`, certifies
//! the free statistical condition on 2-jets, inverts the linearized
//! inducing operator by the pointwise minimal-norm section, and realizes
//! nearby target structures by Newton iteration on periodic charts.

// NaN must fail range checks, hence the negated comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod dims;
pub mod error;
pub mod freeness;
pub mod index;
pub mod invert;
pub mod io;
pub mod iterate;
pub mod jet;
pub mod krylov;
pub mod linearize;
pub mod maps;
pub mod pullback;
pub mod structure;

pub use dims::{codim_singularity, dim_bound, dim_m, sym2_count, sym3_count};
pub use error::{Error, Result};
pub use freeness::{certify_free, perturb_to_free, FreenessReport};
pub use index::{SymIndex2, SymIndex3};
pub use invert::{invert_field, minimal_norm_solve, verify_inverse};
pub use iterate::{solve_structure, SolveOptions, SolveStatus, SolveTrace};
pub use jet::{Chart, Grid, Jet2, JetField, VectorField};
pub use linearize::{apply_l, assemble_system, check_reduction, PointSystem};
pub use maps::{example_free_map, sample_jets, PolyMap, SmoothMap, TrigMap};
pub use pullback::{hadamard, pullback_field, pullback_point, t_can};
pub use structure::StatStructure;

/// Sizes the global worker pool from `ISOSTAT_THREADS` when it is set.
pub fn configure_threads_from_env() -> Result<()> {
    let Ok(raw) = std::env::var("ISOSTAT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| Error::InvalidArgument(format!("ISOSTAT_THREADS must be an integer >= 1, got {raw:?}")))?;
    // a pool that is already initialized keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}
