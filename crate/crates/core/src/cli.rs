//! Command-line driver.
//!
//! Exit codes: 0 on success, 2 for bad input, 3 for a mathematical failure
//! (non-free point, rank deficiency, non-convergence). On exit 3 a one-line
//! JSON object describing the failure is written to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dims::{codim_singularity, dim_bound, dim_m, sym2_count, sym3_count};
use crate::error::{Error, Result};
use crate::freeness::{certify_free, DEFAULT_TOL_RANK};
use crate::invert::{invert_field, verify_inverse, DEFAULT_DIRECTIONAL_STEPS};
use crate::io::{load, resolve_map, save, to_json_string, GridSpec, Manifest, MapSource, Report};
use crate::iterate::{
    perturbed_target, solve_structure, SolveOptions, SolveStatus, DEFAULT_CHART_SEED, DEFAULT_EPS,
    DEFAULT_TARGET_SEED,
};
use crate::jet::{Chart, VectorField};
use crate::maps::{sample_jets, SmoothMap};
use crate::pullback::pullback_field;
use crate::structure::StatStructure;

#[derive(Debug, Parser)]
#[command(name = "isostat", version, about = "Statistical structures induced by maps into (R^N, sum dx^2, sum dx^3)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the jet-space dimension counts for chart dimension n.
    Dims {
        #[arg(long)]
        n: usize,
        /// Ambient dimension, for the codimension of the singular stratum.
        #[arg(long = "N")]
        n_ambient: Option<usize>,
    },
    /// Induced (g, T) at every chart point.
    Pullback {
        #[command(flatten)]
        src: Source,
        /// Also write the sampled 2-jets.
        #[arg(long)]
        jets_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the free statistical condition at every chart point.
    Freeness {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = DEFAULT_TOL_RANK)]
        tol_rank: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimal-norm solution y of the linearized equations for a target (g', T').
    Invert {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL_RANK)]
        tol_rank: f64,
        /// Also write the field y on its own.
        #[arg(long)]
        y_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a variation field y against a target (g', T').
    Verify {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Difference-quotient steps for the directional check.
        #[arg(long, value_delimiter = ',')]
        steps: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Newton iteration towards a target structure on a periodic chart.
    Solve(SolveArgs),
}

#[derive(Debug, Args)]
struct Source {
    /// `example:<n>`, `chart:<seed>` or a map file.
    #[arg(long)]
    map: String,
    /// `uniform:M:[lo,hi]`, `periodic:M:P` or `random:K:seed=S`.
    #[arg(long)]
    grid: String,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, default_value_t = format!("chart:{DEFAULT_CHART_SEED}"))]
    map: String,
    #[arg(long, default_value = "periodic:64:1")]
    grid: String,
    /// Target structure file; defaults to a perturbation of the map's own structure.
    #[arg(long)]
    target: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[arg(long, default_value_t = DEFAULT_TARGET_SEED)]
    target_seed: u64,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol_residual: Option<f64>,
    #[arg(long)]
    smoothing_cutoff: Option<f64>,
    #[arg(long)]
    step_damping: Option<f64>,
    #[arg(long)]
    tol_rank: Option<f64>,
    #[arg(long)]
    inner_iters: Option<usize>,
    /// Per-iteration CSV trace.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Also write the final map.
    #[arg(long)]
    map_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Failure<'a> {
    exit_code: i32,
    kind: &'a str,
    message: String,
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::ZeroDimension(_) => "zero_dimension",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::InvalidGrid(_) => "invalid_grid",
        Error::NotPeriodic => "not_periodic",
        Error::PeriodMismatch { .. } => "period_mismatch",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::BelowDimensionBound { .. } => "below_dimension_bound",
        Error::RankDeficient { .. } => "rank_deficient",
        Error::NotFree { .. } => "not_free",
        Error::PerturbationBudgetExhausted { .. } => "perturbation_budget_exhausted",
        Error::Schema { .. } => "schema",
        Error::Io(_) => "io",
    }
}

/// Outcome of a command that ran to completion.
enum Done {
    Ok,
    /// Report written, but the answer is a mathematical failure.
    Failed(&'static str, String),
}

fn emit<T: Serialize>(out: &mut dyn Write, path: Option<&Path>, value: &T) -> Result<()> {
    match path {
        Some(p) => save(p, value),
        None => out.write_all(to_json_string(value)?.as_bytes()).map_err(Error::from),
    }
}

fn setup(src: &Source) -> Result<(GridSpec, MapSource, SmoothMap, Chart)> {
    let spec: GridSpec = src.grid.parse()?;
    let source: MapSource = src.map.parse()?;
    let map = match source {
        MapSource::DefaultChart(_) => {
            let Chart::Grid(grid) = spec.chart(1)? else {
                return Err(Error::NotPeriodic);
            };
            resolve_map(&source, Some(&grid))?
        }
        _ => resolve_map(&source, None)?,
    };
    let chart = spec.chart(map.n())?;
    Ok((spec, source, map, chart))
}

fn load_target(path: &Path, map: &SmoothMap, chart: &Chart) -> Result<StatStructure> {
    let target: StatStructure = load(path)?;
    if target.n != map.n() {
        return Err(Error::DimensionMismatch {
            what: "target chart dimension",
            expected: map.n(),
            got: target.n,
        });
    }
    if target.len() != chart.len() {
        return Err(Error::DimensionMismatch {
            what: "target points vs chart points",
            expected: chart.len(),
            got: target.len(),
        });
    }
    Ok(target)
}

fn dims(out: &mut dyn Write, n: usize, n_ambient: Option<usize>) -> Result<Done> {
    if n == 0 {
        return Err(Error::ZeroDimension(0));
    }
    let mut text = format!(
        "n={n}\ns_n={}\nc_n={}\nm_n={}\ndim_bound={}\n",
        sym2_count(n),
        sym3_count(n),
        dim_m(n)?,
        dim_bound(n)?
    );
    if let Some(big) = n_ambient {
        if big == 0 {
            return Err(Error::ZeroDimension(0));
        }
        text.push_str(&format!("N={big}\ncodim={}\n", codim_singularity(n, big)?));
    }
    out.write_all(text.as_bytes())?;
    Ok(Done::Ok)
}

fn solve(out: &mut dyn Write, a: &SolveArgs) -> Result<Done> {
    let spec: GridSpec = a.grid.parse()?;
    let Chart::Grid(grid) = spec.chart(1)? else {
        return Err(Error::NotPeriodic);
    };
    let source: MapSource = a.map.parse()?;
    let map = match resolve_map(&source, Some(&grid))? {
        SmoothMap::Trig(t) => t,
        SmoothMap::Poly(_) => {
            return Err(Error::InvalidArgument("solve needs a trigonometric map".into()));
        }
    };
    let chart = spec.chart(map.n)?;
    let Chart::Grid(grid) = chart.clone() else {
        return Err(Error::NotPeriodic);
    };
    let defaults = SolveOptions::default();
    let opts = SolveOptions {
        max_iters: a.max_iters.unwrap_or(defaults.max_iters),
        tol_residual: a.tol_residual.unwrap_or(defaults.tol_residual),
        smoothing_cutoff: a.smoothing_cutoff.unwrap_or(defaults.smoothing_cutoff),
        step_damping: a.step_damping.unwrap_or(defaults.step_damping),
        tol_rank: a.tol_rank.unwrap_or(defaults.tol_rank),
        inner_iters: a.inner_iters.unwrap_or(defaults.inner_iters),
        ..defaults
    };
    opts.validate()?;
    let (target, seed) = match &a.target {
        Some(p) => (load_target(p, &SmoothMap::Trig(map.clone()), &chart)?, None),
        None => {
            if !a.eps.is_finite() {
                return Err(Error::InvalidArgument("eps must be finite".into()));
            }
            (perturbed_target(&map, &grid, a.eps, a.target_seed)?, Some(a.target_seed))
        }
    };
    let result = solve_structure(&map, &grid, &target, &opts)?;
    let mut manifest = Manifest::new("solve", &spec, &source, opts.tol_rank);
    manifest.seed = seed;
    manifest.options = Some(opts);
    if let Some(p) = &a.trace {
        std::fs::write(p, result.trace.to_csv()).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    }
    if let Some(p) = &a.map_out {
        save(p, &result.map)?;
    }
    let status = result.status;
    let residual = result.final_residual;
    emit(out, a.out.as_deref(), &Report { manifest, result })?;
    Ok(match status {
        SolveStatus::Converged => Done::Ok,
        other => Done::Failed(
            "not_converged",
            format!("solve ended with status {other:?}, final residual {residual:e}"),
        ),
    })
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<Done> {
    match cli.command {
        Command::Dims { n, n_ambient } => dims(out, n, n_ambient),
        Command::Pullback { src, jets_out, out: dest } => {
            let (spec, source, map, chart) = setup(&src)?;
            let jets = sample_jets(&map, &chart)?;
            if let Some(p) = &jets_out {
                save(p, &jets)?;
            }
            let manifest = Manifest::new("pullback", &spec, &source, DEFAULT_TOL_RANK);
            emit(out, dest.as_deref(), &Report { manifest, result: pullback_field(&jets) })?;
            Ok(Done::Ok)
        }
        Command::Freeness { src, tol_rank, out: dest } => {
            let (spec, source, map, chart) = setup(&src)?;
            let report = certify_free(&sample_jets(&map, &chart)?, tol_rank)?;
            let verdict = if report.all_free {
                Done::Ok
            } else {
                Done::Failed(
                    "not_free",
                    format!(
                        "{} of {} points are not free statistical",
                        report.non_free_count,
                        report.points.len()
                    ),
                )
            };
            let manifest = Manifest::new("freeness", &spec, &source, tol_rank);
            emit(out, dest.as_deref(), &Report { manifest, result: report })?;
            Ok(verdict)
        }
        Command::Invert { src, target, tol_rank, y_out, out: dest } => {
            let (spec, source, map, chart) = setup(&src)?;
            let target = load_target(&target, &map, &chart)?;
            let inv = invert_field(&sample_jets(&map, &chart)?, &target, tol_rank)?;
            if let Some(p) = &y_out {
                save(p, &inv.y)?;
            }
            let manifest = Manifest::new("invert", &spec, &source, tol_rank);
            emit(out, dest.as_deref(), &Report { manifest, result: inv })?;
            Ok(Done::Ok)
        }
        Command::Verify { src, target, y, steps, out: dest } => {
            let (spec, source, map, chart) = setup(&src)?;
            let target = load_target(&target, &map, &chart)?;
            let y: VectorField = load(&y)?;
            let steps = steps.unwrap_or_else(|| DEFAULT_DIRECTIONAL_STEPS.to_vec());
            if steps.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                return Err(Error::InvalidArgument("steps must be positive".into()));
            }
            let report = verify_inverse(&sample_jets(&map, &chart)?, &target, &y, &steps)?;
            let manifest = Manifest::new("verify", &spec, &source, DEFAULT_TOL_RANK);
            emit(out, dest.as_deref(), &Report { manifest, result: report })?;
            Ok(Done::Ok)
        }
        Command::Solve(a) => solve(out, &a),
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let failure = match execute(cli, out) {
        Ok(Done::Ok) => return 0,
        Ok(Done::Failed(kind, message)) => Failure { exit_code: 3, kind, message },
        Err(e) => Failure {
            exit_code: if e.is_mathematical() { 3 } else { 2 },
            kind: kind(&e),
            message: e.to_string(),
        },
    };
    let line = serde_json::to_string(&failure).unwrap_or_else(|_| failure.message.clone());
    let _ = writeln!(err, "{line}");
    failure.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("isostat").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn dims_output() {
        let (code, out, _) = call(&["dims", "--n", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("m_n=12\n") && out.contains("dim_bound=14\n"));
        let (code, out, _) = call(&["dims", "--n", "1", "--N", "5"]);
        assert_eq!(code, 0);
        assert!(out.contains("codim=2\n"));
        assert_eq!(call(&["dims", "--n", "0"]).0, 2);
        assert_eq!(call(&["dims"]).0, 2);
    }

    #[test]
    fn bad_grid_is_input_error() {
        let (code, _, err) = call(&["pullback", "--map", "example:1", "--grid", "hex:3"]);
        assert_eq!(code, 2);
        assert!(err.contains("\"kind\":\"invalid_argument\""));
    }

    #[test]
    fn too_small_ambient_is_math_failure() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("line.json");
        std::fs::write(&path, r#"{"n": 1, "N": 1, "components": [[[1.0, [1]]]]}"#).unwrap();
        let (code, out, err) = call(&[
            "freeness",
            "--map",
            path.to_str().unwrap(),
            "--grid",
            "uniform:3:[-1,1]",
        ]);
        assert_eq!(code, 3);
        assert!(out.contains("\"all_free\": false"));
        assert!(err.contains("\"kind\":\"not_free\""));
    }
}
