//! Searching for floor actions that make two heterogeneous agents cycle.
//!
//! Agent 0 has cost 1 and agent 1 cost `c2 <= 1/4`. Starting from `(0, a)`
//! with agent 0 moving first, the outputs follow `g_1(a), g_c2(.), g_1(.), ...`
//! where `g_c(y) = sqrt(y/c) - y`. Once agent 1 produces at least 1, agent 0
//! drops to 0, agent 1 answers 0 with the floor action, and the run is back
//! at `(0, a)`.
//!
//! The set of `a` that close such a loop is built backwards from
//! `{x_1 >= 1}` by inverting `g_c(y) = v`, which gives
//! `y = (1 +- sqrt(1 - 4 c v))^2 / (4 c)`.

use crate::contest::{ActionProfile, ContestConfig};
use crate::dynamics::{run, DynamicsParams, Outcome, SelectionPolicy};
use crate::error::{Error, Result};

/// Outputs of `agent` that reach the wall after `depth` further moves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReverseInterval {
    pub depth: usize,
    pub agent: usize,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleHit {
    pub a: f64,
    /// `depth + 2` of the interval containing `a`.
    pub predicted_period: u64,
    /// Period found by running the dynamics forward, if any.
    pub observed_period: Option<u64>,
}

impl CycleHit {
    pub fn validated(&self) -> bool {
        self.observed_period == Some(self.predicted_period)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleSearch {
    pub c2: f64,
    pub intervals: Vec<ReverseInterval>,
    pub grid: Vec<f64>,
    pub hits: Vec<CycleHit>,
}

impl CycleSearch {
    pub fn all_validated(&self) -> bool {
        self.hits.iter().all(CycleHit::validated)
    }
}

fn root_pair(c: f64, v: f64) -> (f64, f64) {
    let d = (1.0 - 4.0 * c * v).max(0.0).sqrt();
    ((1.0 - d).powi(2) / (4.0 * c), (1.0 + d).powi(2) / (4.0 * c))
}

/// Inputs `y` with `g_c(y)` in `[lo, hi]`, restricted to the branch below
/// the maximiser `1/(4c)` unless `hi` reaches the maximum value.
fn preimage(c: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let peak = 1.0 / (4.0 * c);
    if lo > peak {
        return None;
    }
    let (small_lo, large_lo) = root_pair(c, lo);
    if hi >= peak {
        Some((small_lo, large_lo))
    } else {
        Some((small_lo, root_pair(c, hi).0))
    }
}

/// Backward intervals, alternating agent 1 (even depth) and agent 0 (odd
/// depth), until they become empty or underflow.
pub fn reverse_intervals(c2: f64, max_depth: usize) -> Result<Vec<ReverseInterval>> {
    if !(c2 > 0.0 && c2 <= 0.25) {
        return Err(Error::domain(
            "c2",
            format!("agent 1 can only reach output 1 when c2 <= 1/4, got {c2}"),
        ));
    }
    let ceiling = [0.25, 1.0 / (4.0 * c2)];
    let mut out = vec![ReverseInterval {
        depth: 0,
        agent: 1,
        lo: 1.0,
        hi: ceiling[1],
    }];
    for depth in 1..=max_depth {
        let prev = out[depth - 1];
        // The previous output was a best response by the other agent.
        let cost = if prev.agent == 1 { c2 } else { 1.0 };
        let agent = 1 - prev.agent;
        let Some((lo, hi)) = preimage(cost, prev.lo, prev.hi) else {
            break;
        };
        let hi = hi.min(ceiling[agent]);
        if !(lo < hi) || hi < f64::MIN_POSITIVE {
            break;
        }
        out.push(ReverseInterval {
            depth,
            agent,
            lo,
            hi,
        });
    }
    Ok(out)
}

/// Log-spaced grid of `points` values on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) || points == 0 {
        return Err(Error::domain(
            "grid",
            format!("need 0 < lo <= hi and points >= 1, got {lo}:{hi} x{points}"),
        ));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (l, h) = (lo.ln(), hi.ln());
    Ok((0..points)
        .map(|k| (l + (h - l) * k as f64 / (points - 1) as f64).exp())
        .collect())
}

/// Period of the run from `(0, a)` with agent 0 first, if it cycles.
pub fn forward_period(c2: f64, a: f64) -> Result<Option<u64>> {
    let cfg = ContestConfig::new(vec![1.0, c2], a)?;
    let x0 = ActionProfile::new(vec![0.0, a])?;
    let params = DynamicsParams::new(1e-12, 10_000, 0)?;
    let traj = run(
        &cfg,
        &x0,
        &SelectionPolicy::Alternating { first: 0 },
        &params,
    )?;
    Ok(match traj.outcome {
        Outcome::CycleDetected { period, .. } => Some(period),
        _ => None,
    })
}

/// Floor actions on a log grid that fall in an even-depth backward
/// interval, each re-checked by forward simulation.
pub fn cycle_search(c2: f64, a_lo: f64, a_hi: f64, points: usize) -> Result<CycleSearch> {
    let intervals = reverse_intervals(c2, 256)?;
    let grid = log_grid(a_lo, a_hi.min(0.25), points)?;
    let mut hits = Vec::new();
    for &a in &grid {
        let found = intervals
            .iter()
            .find(|iv| iv.depth >= 2 && iv.agent == 1 && iv.lo <= a && a <= iv.hi);
        if let Some(iv) = found {
            hits.push(CycleHit {
                a,
                predicted_period: iv.depth as u64 + 2,
                observed_period: forward_period(c2, a)?,
            });
        }
    }
    Ok(CycleSearch {
        c2,
        intervals,
        grid,
        hits,
    })
}
