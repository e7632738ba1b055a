//! Parameter sweeps over selection policies, agent counts, target gaps and
//! initial outputs.
//!
//! Every cell runs a homogeneous unit-cost contest from `(gamma, 0, ..., 0)`
//! with floor action `gamma`. Steps count every selection event, including
//! moves that leave the profile unchanged.

mod cycle_search;
mod output;
mod plot;

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cycle_search::{
    cycle_search, forward_period, log_grid, reverse_intervals, CycleHit, CycleSearch,
    ReverseInterval,
};
pub use output::{emit_csv, parse_csv, CSV_HEADER};
pub use plot::{
    emit_plot_data, emit_svg, least_squares, pearson, AxisTransform, PlotPoint, Series,
};

use crate::contest::{ActionProfile, ContestConfig};
use crate::dynamics::{run, CustomWeights, DynamicsParams, SelectionPolicy, Trajectory};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Policies addressable from a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Unif,
    Round,
    Lex,
    Worst,
    Best,
    /// Uniform over all agents but the previous mover (`n >= 4`).
    Custom,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        Self::Unif,
        Self::Round,
        Self::Lex,
        Self::Worst,
        Self::Best,
        Self::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Unif => "unif",
            Self::Round => "round",
            Self::Lex => "lex",
            Self::Worst => "worst",
            Self::Best => "best",
            Self::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown policy {s:?}")))
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Self::Unif | Self::Custom)
    }

    /// Concrete policy for a cell; threshold policies use the cell's eps.
    pub fn policy(self, n: usize, eps: f64) -> Result<SelectionPolicy> {
        Ok(match self {
            Self::Unif => SelectionPolicy::Uniform,
            Self::Round => SelectionPolicy::RoundRobin,
            Self::Lex => SelectionPolicy::lexicographic(eps),
            Self::Worst => SelectionPolicy::myopic_worst(eps),
            Self::Best => SelectionPolicy::MyopicBest,
            Self::Custom => SelectionPolicy::WeightedCustom(CustomWeights::avoid_previous(n)?),
        })
    }
}

pub const DEFAULT_EPS: f64 = 1e-10;
pub const DEFAULT_GAMMA: f64 = 1e-10;
pub const DEFAULT_N: usize = 10;
pub const DEFAULT_REPLICATES: u64 = 100;
pub const DEFAULT_MAX_STEPS: u64 = 50_000_000;

/// Sweep description; deserialised from TOML with unknown keys rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSpec {
    pub policies: Vec<PolicyKind>,
    pub n: Vec<usize>,
    pub eps: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Replicates per cell for randomised policies; deterministic policies
    /// run once per cell.
    pub replicates: u64,
    pub seed: u64,
    pub max_steps: u64,
    /// Fill the `nanos` column with wall-clock time; off by default so
    /// output is byte-reproducible.
    pub timing: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            policies: vec![PolicyKind::Unif],
            n: vec![DEFAULT_N],
            eps: vec![DEFAULT_EPS],
            gamma: vec![DEFAULT_GAMMA],
            replicates: DEFAULT_REPLICATES,
            seed: 0,
            max_steps: DEFAULT_MAX_STEPS,
            timing: false,
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("policies", self.policies.is_empty()),
            ("n", self.n.is_empty()),
            ("eps", self.eps.is_empty()),
            ("gamma", self.gamma.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::InvalidSpec(format!("grid {name} is empty")));
        }
        if self.replicates < 1 {
            return Err(Error::InvalidSpec("replicates must be at least 1".into()));
        }
        if self.max_steps < 1 {
            return Err(Error::InvalidSpec("max_steps must be at least 1".into()));
        }
        if let Some(n) = self.n.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidSpec(format!("n = {n} is below 2")));
        }
        if let Some(e) = self.eps.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::InvalidSpec(format!("eps = {e} outside (0, 1)")));
        }
        if let Some(g) = self.gamma.iter().find(|&&g| !(g > 0.0 && g <= 0.25)) {
            return Err(Error::InvalidSpec(format!("gamma = {g} outside (0, 1/4]")));
        }
        Ok(())
    }

    /// Cells in grid order: policy, then n, eps, gamma.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &policy in &self.policies {
            for &n in &self.n {
                for &eps in &self.eps {
                    for &gamma in &self.gamma {
                        cells.push(Cell {
                            index: cells.len() as u64,
                            policy,
                            n,
                            eps,
                            gamma,
                        });
                    }
                }
            }
        }
        cells
    }

    pub fn replicates_for(&self, policy: PolicyKind) -> u64 {
        if policy.is_randomized() {
            self.replicates
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub index: u64,
    pub policy: PolicyKind,
    pub n: usize,
    pub eps: f64,
    pub gamma: f64,
}

impl Cell {
    pub fn contest(&self) -> Result<ContestConfig> {
        ContestConfig::homogeneous_with(self.n, 1.0, self.gamma)
    }

    pub fn initial_profile(&self) -> Result<ActionProfile> {
        ActionProfile::single(self.n, self.gamma)
    }

    /// Seed of replicate `r`: stream `(cell << 32) | r` under the base seed.
    pub fn seed(&self, base: u64, replicate: u64) -> u64 {
        derive_seed(base, (self.index << 32) | replicate)
    }

    /// Re-runs one replicate, keeping the full trajectory.
    pub fn rerun(&self, seed: u64, max_steps: u64) -> Result<Trajectory> {
        let params = DynamicsParams::new(self.eps, max_steps, seed)?.recording();
        run(
            &self.contest()?,
            &self.initial_profile()?,
            &self.policy.policy(self.n, self.eps)?,
            &params,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub policy: String,
    pub n: usize,
    pub eps: f64,
    pub gamma: f64,
    pub seed: u64,
    pub steps: u64,
    /// `converged`, `cycle` or `exhausted`.
    pub outcome: String,
    pub warmup_end: Option<u64>,
    pub nanos: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub cell: Cell,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentResults {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<CellFailure>,
}

fn run_one(spec: &ExperimentSpec, cell: &Cell, seed: u64) -> Result<ResultRow> {
    let params = DynamicsParams::new(cell.eps, spec.max_steps, seed)?;
    let cfg = cell.contest()?;
    let x0 = cell.initial_profile()?;
    let policy = cell.policy.policy(cell.n, cell.eps)?;
    let start = Instant::now();
    let traj = run(&cfg, &x0, &policy, &params)?;
    let nanos = if spec.timing {
        start.elapsed().as_nanos() as u64
    } else {
        0
    };
    Ok(ResultRow {
        policy: cell.policy.name().to_string(),
        n: cell.n,
        eps: cell.eps,
        gamma: cell.gamma,
        seed,
        steps: traj.steps(),
        outcome: traj.outcome.tag().to_string(),
        warmup_end: traj.warmup_end,
        nanos,
    })
}

/// Runs every (cell, replicate) in parallel. Rows come back in grid order
/// then replicate order; a failing replicate is reported, not fatal.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResults> {
    spec.validate()?;
    let jobs: Vec<(Cell, u64)> = spec
        .cells()
        .into_iter()
        .flat_map(|cell| (0..spec.replicates_for(cell.policy)).map(move |r| (cell, r)))
        .collect();
    let outcomes: Vec<(Cell, u64, Result<ResultRow>)> = jobs
        .into_par_iter()
        .map(|(cell, r)| {
            let seed = cell.seed(spec.seed, r);
            (cell, seed, run_one(spec, &cell, seed))
        })
        .collect();
    let mut results = ExperimentResults::default();
    for (cell, seed, outcome) in outcomes {
        match outcome {
            Ok(row) => results.rows.push(row),
            Err(e) => results.failures.push(CellFailure {
                cell,
                seed,
                message: e.to_string(),
            }),
        }
    }
    Ok(results)
}
