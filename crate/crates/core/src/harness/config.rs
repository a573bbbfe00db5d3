use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::disc::{AngularQuadrature, DecompositionGeometry, Grid1D, MediaField};
use crate::error::{Error, Result};
use crate::problem::{PhysicalInflow, Problem};
use crate::rsvd::RsvdConfig;
use crate::transport::{SolverKind, SolverSettings};

/// A positive real given either as a TOML number or as a string such as "1/81".
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    fn resolve(&self, key: &str) -> Result<f64> {
        match self {
            Number::Float(x) => Ok(*x),
            Number::Text(s) => parse_fraction(s).ok_or_else(|| {
                Error::Config(format!("{key}: cannot parse {s:?} as a number or fraction a/b"))
            }),
        }
    }
}

/// Parse "0.5", "1e-3" or "1/81".
pub fn parse_fraction(s: &str) -> Option<f64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().ok()?;
            let b: f64 = b.trim().parse().ok()?;
            (b != 0.0).then(|| a / b)
        }
        None => s.parse().ok(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MediaSelector {
    /// The oscillatory benchmark coefficient.
    Paper,
    Homogenized,
    /// Node values from `sigma_table`.
    Table,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InflowSelector {
    Benchmark,
    Constant(f64),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    epsilon: Option<Number>,
    delta: Option<Number>,
    m_count: Option<usize>,
    beta: Option<Number>,
    n_cells: Option<usize>,
    n_v: Option<usize>,
    rank: Option<usize>,
    oversample: Option<usize>,
    tau: Option<f64>,
    tau_ref: Option<f64>,
    max_iters: Option<usize>,
    max_iters_ref: Option<usize>,
    seed: Option<u64>,
    media: Option<MediaSelector>,
    sigma_table: Option<Vec<f64>>,
    inflow: Option<String>,
    solver: Option<String>,
    solver_tolerance: Option<f64>,
    ranks: Option<Vec<usize>>,
    deltas: Option<Vec<Number>>,
    homog_epsilon: Option<Number>,
    out_dir: Option<PathBuf>,
}

/// Every knob of one experiment. Defaults reproduce the benchmark setting.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub m_count: usize,
    pub beta: f64,
    pub n_cells: usize,
    pub n_v: usize,
    pub rank: usize,
    pub oversample: usize,
    /// Stopping threshold of online runs.
    pub tau: f64,
    /// Stopping threshold of the reference run.
    pub tau_ref: f64,
    pub max_iters: usize,
    pub max_iters_ref: usize,
    pub seed: u64,
    pub media: MediaSelector,
    pub sigma_table: Option<Vec<f64>>,
    pub inflow: InflowSelector,
    pub solver: SolverSettings,
    /// Ranks visited by `rank-sweep`.
    pub ranks: Vec<usize>,
    /// Periods visited by `homog-check`.
    pub deltas: Vec<f64>,
    /// Knudsen number used by `homog-check`.
    pub homog_epsilon: f64,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            epsilon: 1.0 / 81.0,
            delta: 1.0 / 81.0,
            m_count: 10,
            beta: 0.5,
            n_cells: 360,
            n_v: 40,
            rank: 6,
            oversample: 5,
            tau: 1e-8,
            tau_ref: 1e-10,
            max_iters: 50,
            max_iters_ref: 20_000,
            seed: 1,
            media: MediaSelector::Paper,
            sigma_table: None,
            inflow: InflowSelector::Benchmark,
            solver: SolverSettings::default(),
            ranks: vec![2, 3, 4, 5, 6],
            deltas: vec![1.0 / 9.0, 1.0 / 27.0, 1.0 / 81.0],
            homog_epsilon: 1.0,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let d = Self::default();
        let num = |v: &Option<Number>, key: &str, default: f64| match v {
            Some(n) => n.resolve(key),
            None => Ok(default),
        };
        let inflow = match raw.inflow.as_deref() {
            None | Some("benchmark") => InflowSelector::Benchmark,
            Some("zero") => InflowSelector::Constant(0.0),
            Some(s) => match s.strip_prefix("constant:").and_then(parse_fraction) {
                Some(c) => InflowSelector::Constant(c),
                None => {
                    return Err(Error::Config(format!(
                        "inflow: expected \"benchmark\", \"zero\" or \"constant:<value>\", got {s:?}"
                    )))
                }
            },
        };
        let kind = match raw.solver.as_deref() {
            None | Some("direct") => SolverKind::Direct,
            Some("gmres") => SolverKind::Gmres,
            Some(s) => return Err(Error::Config(format!("solver: expected \"direct\" or \"gmres\", got {s:?}"))),
        };
        let mut solver = SolverSettings {
            kind,
            ..SolverSettings::default()
        };
        if let Some(t) = raw.solver_tolerance {
            solver.tolerance = t;
        }
        let deltas = match &raw.deltas {
            Some(list) => list
                .iter()
                .enumerate()
                .map(|(k, n)| n.resolve(&format!("deltas[{k}]")))
                .collect::<Result<Vec<_>>>()?,
            None => d.deltas.clone(),
        };
        let cfg = Self {
            epsilon: num(&raw.epsilon, "epsilon", d.epsilon)?,
            delta: num(&raw.delta, "delta", d.delta)?,
            m_count: raw.m_count.unwrap_or(d.m_count),
            beta: num(&raw.beta, "beta", d.beta)?,
            n_cells: raw.n_cells.unwrap_or(d.n_cells),
            n_v: raw.n_v.unwrap_or(d.n_v),
            rank: raw.rank.unwrap_or(d.rank),
            oversample: raw.oversample.unwrap_or(d.oversample),
            tau: raw.tau.unwrap_or(d.tau),
            tau_ref: raw.tau_ref.unwrap_or(d.tau_ref),
            max_iters: raw.max_iters.unwrap_or(d.max_iters),
            max_iters_ref: raw.max_iters_ref.unwrap_or(d.max_iters_ref),
            seed: raw.seed.unwrap_or(d.seed),
            media: raw.media.unwrap_or(d.media),
            sigma_table: raw.sigma_table,
            inflow,
            solver,
            ranks: raw.ranks.unwrap_or(d.ranks),
            deltas,
            homog_epsilon: num(&raw.homog_epsilon, "homog_epsilon", d.homog_epsilon)?,
            out_dir: raw.out_dir.unwrap_or(d.out_dir),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Check every precondition of the discretization and the compression.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {x}")))
            }
        };
        positive("epsilon", self.epsilon)?;
        positive("delta", self.delta)?;
        positive("tau", self.tau)?;
        positive("tau_ref", self.tau_ref)?;
        positive("homog_epsilon", self.homog_epsilon)?;
        positive("solver_tolerance", self.solver.tolerance)?;
        for (k, d) in self.deltas.iter().enumerate() {
            positive(&format!("deltas[{k}]"), *d)?;
        }
        if self.max_iters == 0 || self.max_iters_ref == 0 {
            return Err(Error::Config("max_iters and max_iters_ref must be at least 1".into()));
        }
        if self.ranks.is_empty() || self.ranks.contains(&0) {
            return Err(Error::Config("ranks must be a non-empty list of positive integers".into()));
        }
        match (&self.media, &self.sigma_table) {
            (MediaSelector::Table, None) => {
                return Err(Error::Config("media = \"table\" requires sigma_table".into()))
            }
            (MediaSelector::Table, Some(t)) if t.len() != self.n_cells + 1 => {
                return Err(Error::Config(format!(
                    "sigma_table has {} values, expected n_cells + 1 = {}",
                    t.len(),
                    self.n_cells + 1
                )))
            }
            (MediaSelector::Paper | MediaSelector::Homogenized, Some(_)) => {
                return Err(Error::Config("sigma_table is only allowed with media = \"table\"".into()))
            }
            _ => {}
        }
        let problem = self.problem().map_err(to_config)?;
        let boundary_dim = problem.n_v();
        for r in std::iter::once(self.rank).chain(self.ranks.iter().copied()) {
            RsvdConfig::new(r, self.oversample, self.seed)
                .validate(boundary_dim)
                .map_err(to_config)?;
        }
        Ok(())
    }

    pub fn rsvd(&self, rank: usize) -> RsvdConfig {
        RsvdConfig::new(rank, self.oversample, self.seed)
    }

    pub fn problem(&self) -> Result<Problem> {
        self.problem_with(self.epsilon, self.delta, self.media)
    }

    pub fn problem_with(&self, epsilon: f64, delta: f64, media: MediaSelector) -> Result<Problem> {
        let grid = Grid1D::new(self.n_cells)?;
        let quad = AngularQuadrature::new(self.n_v)?;
        let media = match media {
            MediaSelector::Paper => MediaField::oscillatory(&grid, epsilon, delta)?,
            MediaSelector::Homogenized => MediaField::homogenized(&grid, epsilon, delta)?,
            MediaSelector::Table => {
                let table = self
                    .sigma_table
                    .clone()
                    .ok_or_else(|| Error::Config("media = \"table\" requires sigma_table".into()))?;
                MediaField::from_table(&grid, epsilon, delta, table)?
            }
        };
        let geometry = DecompositionGeometry::new(&grid, self.m_count, self.beta)?;
        Problem::new(grid, quad, media, geometry)
    }

    pub fn inflow_data(&self, quad: &AngularQuadrature) -> PhysicalInflow {
        match self.inflow {
            InflowSelector::Benchmark => PhysicalInflow::benchmark(quad),
            InflowSelector::Constant(c) => PhysicalInflow::constant(quad, c),
        }
    }
}

fn to_config(e: Error) -> Error {
    match e {
        Error::InvalidArgument(msg) => Error::Config(msg),
        Error::Alignment { .. } => Error::Config(e.to_string()),
        other => other,
    }
}
