//! Lottery contests: the game itself.
//!
//! Agent `i` produces output `x_i >= 0` at linear cost `c_i x_i` and wins the
//! unit prize with probability proportional to its output. When every agent
//! produces zero the prize is split evenly. The best response to an all-zero
//! opponent profile does not exist, so the contest carries a small floor
//! action `a` that an agent plays in that situation.

use crate::error::{Error, Result};

/// Game definition: per-agent costs and the floor action.
#[derive(Debug, Clone, PartialEq)]
pub struct ContestConfig {
    costs: Vec<f64>,
    floor_action: f64,
}

impl ContestConfig {
    pub fn new(costs: Vec<f64>, floor_action: f64) -> Result<Self> {
        if costs.len() < 2 {
            return Err(Error::TooFewAgents(costs.len()));
        }
        for (index, &value) in costs.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidCost { index, value });
            }
        }
        // a = 1/4 is admitted: the two-agent cycle of cost ratio 4/25 uses it.
        if !(floor_action > 0.0 && floor_action <= 0.25) {
            return Err(Error::InvalidFloorAction(floor_action));
        }
        Ok(Self {
            costs,
            floor_action,
        })
    }

    /// `n` agents that all share cost `cost`.
    pub fn homogeneous_with(n: usize, cost: f64, floor_action: f64) -> Result<Self> {
        Self::new(vec![cost; n], floor_action)
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn cost(&self, i: usize) -> f64 {
        self.costs[i]
    }

    pub fn floor_action(&self) -> f64 {
        self.floor_action
    }

    pub fn homogeneous(&self) -> bool {
        self.costs.iter().all(|&c| c == self.costs[0])
    }

    /// The shared cost of a homogeneous contest.
    pub fn common_cost(&self) -> Result<f64> {
        if self.homogeneous() {
            Ok(self.costs[0])
        } else {
            Err(Error::Heterogeneous)
        }
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                n: self.n(),
            })
        }
    }

    pub fn check_profile(&self, x: &ActionProfile) -> Result<()> {
        if x.len() == self.n() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.n(),
                got: x.len(),
            })
        }
    }
}

/// Outputs of all agents. Entries are finite and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionProfile(Vec<f64>);

impl ActionProfile {
    pub fn new(outputs: Vec<f64>) -> Result<Self> {
        for (index, &value) in outputs.iter().enumerate() {
            check_output(index, value)?;
        }
        Ok(Self(outputs))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// `(a, 0, ..., 0)`, the starting profile of the experiment grids.
    pub fn single(n: usize, a: f64) -> Result<Self> {
        let mut v = vec![0.0; n];
        if let Some(first) = v.first_mut() {
            *first = a;
        }
        Self::new(v)
    }

    pub fn outputs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_outputs(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Total output `s = sum_i x_i`.
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Output of everyone except agent `i`.
    ///
    /// Summed as a forward prefix plus a backward suffix so that
    /// [`others_totals`](Self::others_totals) reproduces it bit for bit.
    pub fn others_total(&self, i: usize) -> f64 {
        let before: f64 = self.0[..i].iter().sum();
        let after: f64 = self.0[i + 1..].iter().rev().sum();
        before + after
    }

    /// `others_total(i)` for every agent in O(n).
    pub fn others_totals(&self) -> Vec<f64> {
        let n = self.0.len();
        let mut suffix = vec![0.0; n + 1];
        for j in (0..n).rev() {
            suffix[j] = suffix[j + 1] + self.0[j];
        }
        let mut prefix = 0.0;
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            out.push(prefix + suffix[j + 1]);
            prefix += self.0[j];
        }
        out
    }

    pub fn with_output(&self, i: usize, value: f64) -> Result<Self> {
        check_output(i, value)?;
        let mut v = self.0.clone();
        v[i] = value;
        Ok(Self(v))
    }

    pub(crate) fn set(&mut self, i: usize, value: f64) {
        debug_assert!(value.is_finite() && value >= 0.0);
        self.0[i] = value;
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|v| v * factor).collect())
    }
}

fn check_output(index: usize, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidOutput { index, value })
    }
}

/// Expected payoff `x_i / sum_j x_j - c_i x_i`; `1/n` when nobody produces.
pub fn utility(cfg: &ContestConfig, x: &ActionProfile, i: usize) -> Result<f64> {
    cfg.check_profile(x)?;
    cfg.check_index(i)?;
    Ok(utility_given(
        cfg.n(),
        cfg.cost(i),
        x.get(i),
        x.others_total(i),
    ))
}

/// Utility of producing `own` against opponents producing `others` in total.
pub fn utility_given(n: usize, cost: f64, own: f64, others: f64) -> f64 {
    let total = own + others;
    if total == 0.0 {
        1.0 / n as f64 - cost * own
    } else {
        own / total - cost * own
    }
}

/// Best response of agent `i` to the others' outputs.
pub fn best_response(cfg: &ContestConfig, x: &ActionProfile, i: usize) -> Result<f64> {
    cfg.check_profile(x)?;
    cfg.check_index(i)?;
    best_response_to(cfg.cost(i), x.others_total(i), cfg.floor_action())
}

/// Best response of an agent with cost `cost` when the others produce `others`.
///
/// `a` when `others == 0`, `sqrt(others / cost) - others` up to
/// `others == 1 / cost`, and zero beyond.
pub fn best_response_to(cost: f64, others: f64, floor_action: f64) -> Result<f64> {
    if !others.is_finite() || others < 0.0 {
        return Err(Error::domain("others' output", format!("{others}")));
    }
    Ok(br_unchecked(cost, others, floor_action))
}

#[inline]
pub(crate) fn br_unchecked(cost: f64, others: f64, floor_action: f64) -> f64 {
    if others == 0.0 {
        floor_action
    } else if others <= 1.0 / cost {
        // Rounding can push the boundary case a hair below zero.
        ((others / cost).sqrt() - others).max(0.0)
    } else {
        0.0
    }
}

/// The largest utility agent `i` can obtain by changing its own output.
pub fn best_deviation_utility(cfg: &ContestConfig, x: &ActionProfile, i: usize) -> Result<f64> {
    cfg.check_profile(x)?;
    cfg.check_index(i)?;
    Ok(deviation_given(
        cfg.cost(i),
        x.others_total(i),
        cfg.floor_action(),
    ))
}

/// `(1 - sqrt(c S))^2` for `0 < S <= 1/c`, zero above, and `1 - c a` when the
/// others are all idle (the payoff of the floor action).
#[inline]
pub fn deviation_given(cost: f64, others: f64, floor_action: f64) -> f64 {
    if others == 0.0 {
        1.0 - cost * floor_action
    } else if others <= 1.0 / cost {
        let r = 1.0 - (cost * others).sqrt();
        r * r
    } else {
        0.0
    }
}

/// The unique equilibrium `(n-1) / (n^2 c)` of a homogeneous contest.
pub fn equilibrium_profile(cfg: &ContestConfig) -> Result<ActionProfile> {
    let c = cfg.common_cost()?;
    let n = cfg.n() as f64;
    Ok(ActionProfile(vec![(n - 1.0) / (n * n * c); cfg.n()]))
}

/// Per-agent multiplicative shortfall `1 - u_i / d_i`, clamped below at zero.
fn agent_gap(u: f64, d: f64) -> f64 {
    if d == 0.0 {
        if u < 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        (1.0 - u / d).max(0.0)
    }
}

/// Per-agent shortfalls `1 - u_i / d_i` (see [`epsilon_gap`]).
pub fn agent_gaps(cfg: &ContestConfig, x: &ActionProfile) -> Result<Vec<f64>> {
    cfg.check_profile(x)?;
    let n = cfg.n();
    let a = cfg.floor_action();
    Ok(x.others_totals()
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let c = cfg.cost(i);
            agent_gap(utility_given(n, c, x.get(i), s), deviation_given(c, s, a))
        })
        .collect())
}

/// Smallest `eps >= 0` such that `x` is an `eps`-approximate equilibrium.
///
/// Returns `+inf` only when some agent has a negative payoff and no
/// profitable deviation at all.
pub fn epsilon_gap(cfg: &ContestConfig, x: &ActionProfile) -> Result<f64> {
    Ok(agent_gaps(cfg, x)?.into_iter().fold(0.0, f64::max))
}

pub fn is_epsilon_equilibrium(cfg: &ContestConfig, x: &ActionProfile, eps: f64) -> Result<bool> {
    if !(eps > 0.0) {
        return Err(Error::domain("eps", format!("must be positive, got {eps}")));
    }
    Ok(epsilon_gap(cfg, x)? <= eps)
}

/// Change of variable `y = c x`, `a' = c a` to a unit-cost contest.
pub fn rescale_unit_cost(
    cfg: &ContestConfig,
    x: &ActionProfile,
) -> Result<(ContestConfig, ActionProfile)> {
    cfg.check_profile(x)?;
    let c = cfg.common_cost()?;
    let unit = ContestConfig::homogeneous_with(cfg.n(), 1.0, c * cfg.floor_action())?;
    Ok((unit, x.scaled(c)?))
}
