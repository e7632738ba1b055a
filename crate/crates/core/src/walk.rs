//! Biased random walk on `{1, 2, ...}` with a wall at 1, and the coverage
//! time of a selection trace.
//!
//! From `y > 1` the walk moves right with probability `p` and left
//! otherwise; at the wall it moves right with probability `p` and stays put
//! otherwise.

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    p: f64,
    start: u64,
}

impl WalkConfig {
    pub fn new(p: f64, start: u64) -> Result<Self> {
        if !(0.0..0.5).contains(&p) {
            return Err(Error::domain("p", format!("must lie in [0, 1/2), got {p}")));
        }
        if start < 1 {
            return Err(Error::domain("start", "walk starts at a state >= 1"));
        }
        Ok(Self { p, start })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn start(&self) -> u64 {
        self.start
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkPath {
    pub states: Vec<u64>,
    /// `|{t >= 1 : y_t = 1}|`; the starting state is not counted.
    pub visits_to_one: u64,
}

fn walled_step(y: u64, right: bool) -> u64 {
    if right {
        y + 1
    } else {
        (y - 1).max(1)
    }
}

pub fn simulate_walk<R: Rng + ?Sized>(cfg: &WalkConfig, horizon: u64, rng: &mut R) -> WalkPath {
    let mut states = Vec::with_capacity(horizon as usize + 1);
    let mut y = cfg.start;
    let mut visits = 0;
    states.push(y);
    for _ in 0..horizon {
        y = walled_step(y, rng.random_bool(cfg.p));
        visits += u64::from(y == 1);
        states.push(y);
    }
    WalkPath {
        states,
        visits_to_one: visits,
    }
}

/// `ceil((4 / (1 - 2p)) max(m + k, ln(1/delta) / (1 - 2p)))`: after this
/// many steps the walk has visited 1 at least `m` times w.p. `>= 1 - delta`.
pub fn lemma_visit_bound(p: f64, k: u64, m: u64, delta: f64) -> Result<u64> {
    WalkConfig::new(p, k)?;
    if m < 1 {
        return Err(Error::domain("m", "need at least one visit"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(
            "delta",
            format!("must lie in (0, 1), got {delta}"),
        ));
    }
    let drift = 1.0 - 2.0 * p;
    let span = ((m + k) as f64).max((1.0 / delta).ln() / drift);
    Ok((4.0 / drift * span).ceil() as u64)
}

/// Fraction of `trials` independent walks with at least `m` visits to 1
/// within `horizon` steps.
pub fn empirical_visit_success<R: Rng + ?Sized>(
    cfg: &WalkConfig,
    m: u64,
    horizon: u64,
    trials: u64,
    rng: &mut R,
) -> Result<f64> {
    if trials < 1 {
        return Err(Error::domain("trials", "need at least one trial"));
    }
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut y = cfg.start;
        let mut visits = 0;
        for _ in 0..horizon {
            y = walled_step(y, rng.random_bool(cfg.p));
            visits += u64::from(y == 1);
            if visits >= m {
                break;
            }
        }
        hits += u64::from(visits >= m);
    }
    Ok(hits as f64 / trials as f64)
}

/// The walled walk and an unconstrained walk driven by the same coin
/// flips. The free walk moves left at the wall where the walled one holds,
/// so `walled[t] >= free[t]` throughout.
pub fn coupled_free_walk<R: Rng + ?Sized>(
    cfg: &WalkConfig,
    horizon: u64,
    rng: &mut R,
) -> (WalkPath, Vec<i64>) {
    let mut states = Vec::with_capacity(horizon as usize + 1);
    let mut free = Vec::with_capacity(horizon as usize + 1);
    let mut y = cfg.start;
    let mut z = cfg.start as i64;
    let mut visits = 0;
    states.push(y);
    free.push(z);
    for _ in 0..horizon {
        let right = rng.random_bool(cfg.p);
        y = walled_step(y, right);
        z += if right { 1 } else { -1 };
        visits += u64::from(y == 1);
        states.push(y);
        free.push(z);
    }
    (
        WalkPath {
            states,
            visits_to_one: visits,
        },
        free,
    )
}

/// First (zero-based) position `t` with every agent in `trace[..=t]`.
pub fn coverage_time(trace: &[usize], n: usize) -> Option<u64> {
    if n == 0 {
        return None;
    }
    let mut seen = vec![false; n];
    let mut missing = n;
    for (t, &i) in trace.iter().enumerate() {
        if i < n && !seen[i] {
            seen[i] = true;
            missing -= 1;
            if missing == 0 {
                return Some(t as u64);
            }
        }
    }
    None
}
