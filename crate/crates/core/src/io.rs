//! JSON documents, chart descriptors and run manifests.
//!
//! Every document is read through `serde_path_to_error`, so a malformed
//! file is reported with the JSON path of the offending value, and then
//! validated against the dimension rules of its type.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dims::{sym2_count, sym3_count};
use crate::error::{Error, Result};
use crate::iterate::SolveOptions;
use crate::jet::{Chart, Grid, JetField, VectorField};
use crate::maps::{example_free_map, PolyMap, SmoothMap, TrigMap};
use crate::structure::StatStructure;

/// A type with exactly one file schema.
pub trait Document: Serialize + DeserializeOwned {
    /// Semantic checks beyond the shape enforced by deserialization.
    fn check(&self) -> Result<()>;
}

fn at(path: &str, err: Error) -> Error {
    match err {
        Error::Schema { .. } => err,
        other => Error::Schema {
            path: path.to_string(),
            message: other.to_string(),
        },
    }
}

impl Document for PolyMap {
    fn check(&self) -> Result<()> {
        self.validate().map_err(|e| at(".", e))
    }
}

impl Document for TrigMap {
    fn check(&self) -> Result<()> {
        self.validate().map_err(|e| at(".", e))
    }
}

impl Document for SmoothMap {
    fn check(&self) -> Result<()> {
        self.validate().map_err(|e| at(".", e))
    }
}

impl Document for StatStructure {
    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(at("n", Error::ZeroDimension(0)));
        }
        let (s, c) = (sym2_count(self.n), sym3_count(self.n));
        for (p, row) in self.g.iter().enumerate() {
            if row.len() != s {
                return Err(Error::Schema {
                    path: format!("g[{p}]"),
                    message: format!("expected {s} packed entries for n = {}, got {}", self.n, row.len()),
                });
            }
        }
        for (p, row) in self.t.iter().enumerate() {
            if row.len() != c {
                return Err(Error::Schema {
                    path: format!("T[{p}]"),
                    message: format!("expected {c} packed entries for n = {}, got {}", self.n, row.len()),
                });
            }
        }
        self.validate().map_err(|e| at(".", e))
    }
}

impl Document for JetField {
    fn check(&self) -> Result<()> {
        if self.n == 0 || self.n_ambient == 0 {
            return Err(at(".", Error::ZeroDimension(0)));
        }
        let field = match &self.chart {
            Chart::Grid(_) => "grid",
            Chart::Points(_) => "points",
        };
        self.chart.validate(self.n).map_err(|e| at(field, e))?;
        for (p, jet) in self.jets.iter().enumerate() {
            let problem = jet.validate().err().or_else(|| {
                (jet.n() != self.n || jet.n_ambient() != self.n_ambient).then(|| {
                    Error::InvalidArgument(format!(
                        "jet has (n, N) = ({}, {}), document declares ({}, {})",
                        jet.n(),
                        jet.n_ambient(),
                        self.n,
                        self.n_ambient
                    ))
                })
            });
            if let Some(e) = problem {
                return Err(at(&format!("jets[{p}]"), e));
            }
        }
        self.validate().map_err(|e| at("jets", e))
    }
}

impl Document for VectorField {
    fn check(&self) -> Result<()> {
        self.validate().map_err(|e| at(".", e))
    }
}

/// Parses and validates a document.
pub fn from_json_str<T: Document>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    value.check()?;
    Ok(value)
}

/// Pretty JSON with a trailing newline. Output is a pure function of the
/// value: reals are printed in shortest round-trip form.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = serde_json::to_string_pretty(value).map_err(|e| Error::Schema {
        path: ".".into(),
        message: e.to_string(),
    })?;
    out.push('\n');
    Ok(out)
}

pub fn load<T: Document>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_json_str(&text).map_err(|e| match e {
        Error::Schema { path: p, message } => Error::Schema {
            path: format!("{}:{p}", path.display()),
            message,
        },
        other => other,
    })
}

pub fn save<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Reads either map schema; trigonometric maps are told apart by their
/// `period` key.
pub fn map_from_json_str(text: &str) -> Result<SmoothMap> {
    let probe: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Schema {
        path: ".".into(),
        message: e.to_string(),
    })?;
    if probe.get("period").is_some() {
        from_json_str::<TrigMap>(text).map(SmoothMap::Trig)
    } else {
        from_json_str::<PolyMap>(text).map(SmoothMap::Poly)
    }
}

pub fn load_map(path: &Path) -> Result<SmoothMap> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    map_from_json_str(&text)
}

/// Chart descriptor accepted on the command line.
///
/// * `uniform:M:[lo,hi]`: `M` nodes per axis on `[lo, hi]^n`, endpoints included
/// * `periodic:M:P`: `M` nodes per axis on one period `[0, P)^n`
/// * `random:K:seed=S`: `K` points uniform in `[-1, 1]^n`, or in
///   `[lo, hi]^n` with a trailing `:[lo,hi]`
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Uniform { nodes: usize, lo: f64, hi: f64 },
    Periodic { nodes: usize, period: f64 },
    Random { count: usize, seed: u64, lo: f64, hi: f64 },
}

fn parse_interval(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidArgument(format!("expected an interval [lo,hi], got {s:?}"));
    let inner = s.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
    let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_count(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .ok()
        .filter(|&k: &usize| k >= 1)
        .ok_or_else(|| Error::InvalidArgument(format!("expected a positive node count, got {s:?}")))
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidArgument(format!(
                "unrecognized grid {s:?}; expected uniform:M:[lo,hi], periodic:M:P or random:K:seed=S"
            ))
        };
        let mut parts = s.splitn(3, ':');
        let kind = parts.next().ok_or_else(bad)?;
        let count = parse_count(parts.next().ok_or_else(bad)?)?;
        let rest = parts.next();
        match kind {
            "uniform" => {
                let (lo, hi) = parse_interval(rest.ok_or_else(bad)?)?;
                Ok(GridSpec::Uniform { nodes: count, lo, hi })
            }
            "periodic" => {
                let period: f64 = match rest {
                    None => 1.0,
                    Some(p) => p.trim().parse().map_err(|_| bad())?,
                };
                if !(period.is_finite() && period > 0.0) {
                    return Err(Error::InvalidArgument(format!("period must be positive, got {period}")));
                }
                Ok(GridSpec::Periodic { nodes: count, period })
            }
            "random" => {
                let rest = rest.ok_or_else(bad)?;
                let (seed, interval) = match rest.split_once(':') {
                    Some((seed, interval)) => (seed, Some(interval)),
                    None => (rest, None),
                };
                let seed = seed
                    .strip_prefix("seed=")
                    .and_then(|v| v.trim().parse().ok())
                    .ok_or_else(bad)?;
                let (lo, hi) = interval.map_or(Ok((-1.0, 1.0)), parse_interval)?;
                Ok(GridSpec::Random { count, seed, lo, hi })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::Uniform { nodes, lo, hi } => write!(f, "uniform:{nodes}:[{lo},{hi}]"),
            GridSpec::Periodic { nodes, period } => write!(f, "periodic:{nodes}:{period}"),
            GridSpec::Random { count, seed, lo, hi } => {
                if (*lo, *hi) == (-1.0, 1.0) {
                    write!(f, "random:{count}:seed={seed}")
                } else {
                    write!(f, "random:{count}:seed={seed}:[{lo},{hi}]")
                }
            }
        }
    }
}

impl GridSpec {
    /// The chart in dimension `n`.
    pub fn chart(&self, n: usize) -> Result<Chart> {
        if n == 0 {
            return Err(Error::ZeroDimension(0));
        }
        match *self {
            GridSpec::Uniform { nodes, lo, hi } => {
                Ok(Chart::Grid(Grid::uniform(vec![nodes; n], vec![lo; n], vec![hi; n])?))
            }
            GridSpec::Periodic { nodes, period } => {
                Ok(Chart::Grid(Grid::periodic(vec![nodes; n], vec![period; n])?))
            }
            GridSpec::Random { count, seed, lo, hi } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let points = (0..count)
                    .map(|_| (0..n).map(|_| rng.random_range(lo..=hi)).collect())
                    .collect();
                Ok(Chart::Points(points))
            }
        }
    }
}

/// Where the map of a run comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapSource {
    /// The built-in free example in dimension `n`.
    Example(usize),
    /// The free periodic curve of the default experiment with this seed.
    DefaultChart(u64),
    File(String),
}

impl FromStr for MapSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(n) = s.strip_prefix("example:") {
            let n = n
                .trim()
                .parse()
                .ok()
                .filter(|&n: &usize| n >= 1)
                .ok_or_else(|| Error::InvalidArgument(format!("expected example:<n> with n >= 1, got {s:?}")))?;
            return Ok(MapSource::Example(n));
        }
        if let Some(seed) = s.strip_prefix("chart:") {
            let seed = seed
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("expected chart:<seed>, got {s:?}")))?;
            return Ok(MapSource::DefaultChart(seed));
        }
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty map source".into()));
        }
        Ok(MapSource::File(s.to_string()))
    }
}

impl fmt::Display for MapSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSource::Example(n) => write!(f, "example:{n}"),
            MapSource::DefaultChart(seed) => write!(f, "chart:{seed}"),
            MapSource::File(p) => write!(f, "{p}"),
        }
    }
}

/// Everything that determines a run, given the code version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: Option<u64>,
    pub chart: String,
    pub map_source: String,
    pub options: Option<SolveOptions>,
    pub tol_rank: f64,
    pub version: String,
}

impl Manifest {
    pub fn new(experiment: &str, chart: &GridSpec, map_source: &MapSource, tol_rank: f64) -> Self {
        Manifest {
            experiment: experiment.to_string(),
            seed: None,
            chart: chart.to_string(),
            map_source: map_source.to_string(),
            options: None,
            tol_rank,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// A command's output: its manifest and its result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub manifest: Manifest,
    pub result: T,
}

/// Resolves a map source. Files may hold either map schema.
pub fn resolve_map(source: &MapSource, grid: Option<&Grid>) -> Result<SmoothMap> {
    match source {
        MapSource::Example(n) => Ok(SmoothMap::Poly(example_free_map(*n)?)),
        MapSource::DefaultChart(seed) => {
            let grid = grid.ok_or_else(|| {
                Error::InvalidArgument("chart:<seed> maps need a periodic grid".into())
            })?;
            Ok(SmoothMap::Trig(crate::iterate::free_trig_chart(
                grid,
                crate::iterate::DEFAULT_AMBIENT,
                *seed,
            )?))
        }
        MapSource::File(p) => load_map(Path::new(p)),
    }
}
