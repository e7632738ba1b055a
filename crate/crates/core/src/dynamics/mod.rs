//! Best-response dynamics: one agent at a time replaces its output with a
//! best response to the others.

mod cycle;

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

pub use cycle::{detect_cycle, fingerprint, CycleDetector, CycleReport, SIGNIFICANT_DIGITS};

use crate::contest::{
    agent_gaps, best_response, br_unchecked, deviation_given, epsilon_gap, utility_given,
    ActionProfile, ContestConfig,
};
use crate::error::{Error, Result};
use crate::potential::potential_of;
use crate::rng::run_rng;

/// How much an agent would gain by best-responding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImprovementMeasure {
    /// `d_i - u_i`.
    Absolute,
    /// `1 - u_i / d_i`, the agent's share of the approximate-equilibrium gap.
    #[default]
    Relative,
}

/// Selection weights as a function of `(t, x_t, previous mover)`.
pub type WeightFn = dyn Fn(u64, &ActionProfile, Option<usize>) -> Vec<f64> + Send + Sync;

/// Randomised selection with every weight in `[lower, upper]`, except that
/// the previous mover may fall below `lower`.
#[derive(Clone)]
pub struct CustomWeights {
    weight_fn: Arc<WeightFn>,
    lower: f64,
    upper: f64,
}

impl CustomWeights {
    pub fn new(weight_fn: Arc<WeightFn>, lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0 && lower <= upper && upper < 0.5) {
            return Err(Error::InvalidWeights(format!(
                "bounds need 0 < L <= U < 1/2, got L={lower}, U={upper}"
            )));
        }
        Ok(Self {
            weight_fn,
            lower,
            upper,
        })
    }

    /// Uniform over everyone except the previous mover (uniform over all
    /// agents at `t = 0`). Needs `n >= 4` so that `1/(n-1) < 1/2`.
    pub fn avoid_previous(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidWeights(format!(
                "avoid-previous weights need n >= 4, got {n}"
            )));
        }
        let w = 1.0 / (n - 1) as f64;
        Self::new(
            Arc::new(
                move |_, x: &ActionProfile, prev: Option<usize>| match prev {
                    Some(p) => (0..x.len()).map(|i| if i == p { 0.0 } else { w }).collect(),
                    None => vec![1.0 / x.len() as f64; x.len()],
                },
            ),
            1.0 / n as f64,
            w,
        )
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Evaluates and validates the weight vector.
    pub fn weights(&self, t: u64, x: &ActionProfile, prev: Option<usize>) -> Result<Vec<f64>> {
        let w = (self.weight_fn)(t, x, prev);
        if w.len() != x.len() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} agents",
                w.len(),
                x.len()
            )));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
        }
        for (i, &v) in w.iter().enumerate() {
            let below = v < self.lower && prev != Some(i);
            if !(v >= 0.0 && v <= self.upper) || below {
                return Err(Error::InvalidWeights(format!(
                    "weight {v} of agent {i} outside [{}, {}]",
                    self.lower, self.upper
                )));
            }
        }
        Ok(w)
    }
}

impl fmt::Debug for CustomWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomWeights")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum SelectionPolicy {
    /// Mover drawn uniformly from all agents.
    Uniform,
    /// Agent `t mod n`.
    RoundRobin,
    /// Two agents taking turns, `first` moving at `t = 0`.
    Alternating {
        first: usize,
    },
    /// Smallest index whose improvement exceeds `threshold`.
    Lexicographic {
        threshold: f64,
        measure: ImprovementMeasure,
    },
    /// Smallest improvement strictly above `threshold`.
    MyopicWorst {
        threshold: f64,
        measure: ImprovementMeasure,
    },
    /// Largest absolute improvement.
    MyopicBest,
    WeightedCustom(CustomWeights),
}

impl SelectionPolicy {
    pub fn lexicographic(threshold: f64) -> Self {
        Self::Lexicographic {
            threshold,
            measure: ImprovementMeasure::default(),
        }
    }

    pub fn myopic_worst(threshold: f64) -> Self {
        Self::MyopicWorst {
            threshold,
            measure: ImprovementMeasure::default(),
        }
    }

    /// Short tag used in experiment output.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Uniform => "unif",
            Self::RoundRobin => "round",
            Self::Alternating { .. } => "alt",
            Self::Lexicographic { .. } => "lex",
            Self::MyopicWorst { .. } => "worst",
            Self::MyopicBest => "best",
            Self::WeightedCustom(_) => "custom",
        }
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, Self::Uniform | Self::WeightedCustom(_))
    }

    /// Number of distinct schedule phases for deterministic policies; the
    /// next mover is a function of the state and `t mod phase_len`.
    fn phase_len(&self, n: usize) -> usize {
        match self {
            Self::RoundRobin => n,
            Self::Alternating { .. } => 2,
            _ => 1,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Self::Alternating { first } => {
                if n != 2 {
                    return Err(Error::domain(
                        "policy",
                        format!("alternation needs 2 agents, got {n}"),
                    ));
                }
                if *first > 1 {
                    return Err(Error::IndexOutOfRange { index: *first, n });
                }
            }
            Self::Lexicographic { threshold, .. } | Self::MyopicWorst { threshold, .. } => {
                if !(*threshold > 0.0) {
                    return Err(Error::domain(
                        "threshold",
                        format!("must be positive, got {threshold}"),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Replaces the mover's output with its best response.
pub fn step(cfg: &ContestConfig, x: &ActionProfile, mover: usize) -> Result<ActionProfile> {
    let br = best_response(cfg, x, mover)?;
    let mut next = x.clone();
    next.set(mover, br);
    Ok(next)
}

fn step_in_place(cfg: &ContestConfig, x: &mut ActionProfile, mover: usize) {
    let br = br_unchecked(cfg.cost(mover), x.others_total(mover), cfg.floor_action());
    x.set(mover, br);
}

/// Per-agent improvement available from best-responding.
pub fn improvements(
    cfg: &ContestConfig,
    x: &ActionProfile,
    measure: ImprovementMeasure,
) -> Result<Vec<f64>> {
    match measure {
        ImprovementMeasure::Relative => agent_gaps(cfg, x),
        ImprovementMeasure::Absolute => {
            cfg.check_profile(x)?;
            let n = cfg.n();
            let a = cfg.floor_action();
            Ok(x.others_totals()
                .into_iter()
                .enumerate()
                .map(|(i, s)| {
                    let c = cfg.cost(i);
                    deviation_given(c, s, a) - utility_given(n, c, x.get(i), s)
                })
                .collect())
        }
    }
}

/// Next mover, or `None` when the policy finds nobody worth moving.
pub fn select_mover<R: Rng + ?Sized>(
    policy: &SelectionPolicy,
    cfg: &ContestConfig,
    x: &ActionProfile,
    t: u64,
    prev_mover: Option<usize>,
    rng: &mut R,
) -> Result<Option<usize>> {
    let n = cfg.n();
    policy.validate(n)?;
    cfg.check_profile(x)?;
    Ok(match policy {
        SelectionPolicy::Uniform => Some(rng.random_range(0..n)),
        SelectionPolicy::RoundRobin => Some((t % n as u64) as usize),
        SelectionPolicy::Alternating { first } => Some((*first + (t % 2) as usize) % 2),
        SelectionPolicy::Lexicographic { threshold, measure } => improvements(cfg, x, *measure)?
            .into_iter()
            .position(|g| g > *threshold),
        SelectionPolicy::MyopicWorst { threshold, measure } => {
            let mut best: Option<(usize, f64)> = None;
            for (i, g) in improvements(cfg, x, *measure)?.into_iter().enumerate() {
                if g > *threshold && best.is_none_or(|(_, b)| g < b) {
                    best = Some((i, g));
                }
            }
            best.map(|(i, _)| i)
        }
        SelectionPolicy::MyopicBest => {
            let mut best = (0, f64::NEG_INFINITY);
            for (i, g) in improvements(cfg, x, ImprovementMeasure::Absolute)?
                .into_iter()
                .enumerate()
            {
                if g > best.1 {
                    best = (i, g);
                }
            }
            Some(best.0)
        }
        SelectionPolicy::WeightedCustom(custom) => {
            let w = custom.weights(t, x, prev_mover)?;
            let r: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &v) in w.iter().enumerate() {
                acc += v;
                if v > 0.0 {
                    pick = Some(i);
                    if r < acc {
                        break;
                    }
                }
            }
            pick
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsParams {
    pub eps: f64,
    pub max_steps: u64,
    pub seed: u64,
    /// Keep every profile; otherwise only the last [`RING_CAPACITY`].
    pub record_full: bool,
}

impl DynamicsParams {
    pub fn new(eps: f64, max_steps: u64, seed: u64) -> Result<Self> {
        let p = Self {
            eps,
            max_steps,
            seed,
            record_full: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn recording(mut self) -> Self {
        self.record_full = true;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::domain(
                "eps",
                format!("must be positive, got {}", self.eps),
            ));
        }
        if self.max_steps < 1 {
            return Err(Error::domain("max_steps", "must be at least 1"));
        }
        Ok(())
    }
}

/// Profiles kept when `record_full` is off.
pub const RING_CAPACITY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// The profile at time `steps` is an eps-approximate equilibrium.
    Converged { steps: u64 },
    /// The rounded state (and schedule phase) at `start + period` repeats
    /// the one at `start`.
    CycleDetected { start: u64, period: u64 },
    /// Ran out of steps, or the policy (or a fixed point short of the
    /// target) stopped progress while the gap was still above eps.
    Exhausted { steps: u64, stalled: bool },
}

impl Outcome {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Converged { .. } => "converged",
            Self::CycleDetected { .. } => "cycle",
            Self::Exhausted { .. } => "exhausted",
        }
    }

    /// Steps taken before the run stopped.
    pub fn steps(&self) -> u64 {
        match *self {
            Self::Converged { steps } | Self::Exhausted { steps, .. } => steps,
            Self::CycleDetected { start, period } => start + period,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunNote {
    /// Uniform selection over two agents puts weight 1/2 on each, outside
    /// the `U < 1/2` regime the convergence bounds cover.
    UniformWithTwoAgents,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    profiles: VecDeque<ActionProfile>,
    first_recorded: u64,
    /// `movers[t]` moved between `t` and `t + 1`.
    pub movers: Vec<usize>,
    /// `totals[t] = sum_i x_{t,i}` for every visited `t`.
    pub totals: Vec<f64>,
    /// Potential of `c x_t`; present for homogeneous contests only.
    pub potentials: Option<Vec<f64>>,
    pub gaps: Vec<f64>,
    /// First time the warm-up conditions hold (homogeneous contests only).
    pub warmup_end: Option<u64>,
    pub outcome: Outcome,
    pub cycle: Option<CycleReport>,
    pub notes: Vec<RunNote>,
}

impl Trajectory {
    pub fn steps(&self) -> u64 {
        self.movers.len() as u64
    }

    pub fn final_profile(&self) -> &ActionProfile {
        self.profiles.back().expect("trajectory holds at least x_0")
    }

    /// Profile at time `t`, if still recorded.
    pub fn profile(&self, t: u64) -> Option<&ActionProfile> {
        t.checked_sub(self.first_recorded)
            .and_then(|k| self.profiles.get(k as usize))
    }

    /// Recorded `(t, x_t)` pairs in time order.
    pub fn profiles(&self) -> impl Iterator<Item = (u64, &ActionProfile)> {
        (self.first_recorded..).zip(self.profiles.iter())
    }

    pub fn is_complete(&self) -> bool {
        self.first_recorded == 0
    }
}

/// The three warm-up conditions on a unit-cost profile: every output at
/// most 1/4, at least two positive outputs, total below 1.
pub fn warmup_conditions_hold(unit_outputs: &[f64]) -> bool {
    let total: f64 = unit_outputs.iter().sum();
    unit_outputs.iter().all(|&v| v <= 0.25)
        && unit_outputs.iter().filter(|&&v| v > 0.0).count() >= 2
        && total < 1.0
}

/// First recorded time at which the warm-up conditions hold, computed on
/// `c x_t`. Needs a homogeneous contest and a fully recorded trajectory.
pub fn warmup_end(cfg: &ContestConfig, traj: &Trajectory) -> Result<Option<u64>> {
    let c = cfg.common_cost()?;
    if !traj.is_complete() {
        return Err(Error::domain(
            "trajectory",
            "warm-up needs a fully recorded run",
        ));
    }
    Ok(traj
        .profiles()
        .find(|(_, x)| warmup_unit(c, x))
        .map(|(t, _)| t))
}

fn warmup_unit(c: f64, x: &ActionProfile) -> bool {
    if c == 1.0 {
        warmup_conditions_hold(x.outputs())
    } else {
        let y: Vec<f64> = x.outputs().iter().map(|v| c * v).collect();
        warmup_conditions_hold(&y)
    }
}

struct Recorder {
    profiles: VecDeque<ActionProfile>,
    first_recorded: u64,
    record_full: bool,
}

impl Recorder {
    fn push(&mut self, x: &ActionProfile) {
        if !self.record_full && self.profiles.len() == RING_CAPACITY {
            self.profiles.pop_front();
            self.first_recorded += 1;
        }
        self.profiles.push_back(x.clone());
    }
}

/// Runs the dynamics from `x0` until an eps-approximate equilibrium, a
/// detected cycle (deterministic policies), a stall, or `max_steps`.
pub fn run(
    cfg: &ContestConfig,
    x0: &ActionProfile,
    policy: &SelectionPolicy,
    params: &DynamicsParams,
) -> Result<Trajectory> {
    params.validate()?;
    cfg.check_profile(x0)?;
    let n = cfg.n();
    policy.validate(n)?;

    let unit_cost = cfg.common_cost().ok();
    let mut rng = run_rng(params.seed);
    let mut detector = (!policy.is_randomized()).then(CycleDetector::new);
    let phase_len = policy.phase_len(n);

    let mut notes = Vec::new();
    if matches!(policy, SelectionPolicy::Uniform) && n == 2 {
        notes.push(RunNote::UniformWithTwoAgents);
    }

    let mut rec = Recorder {
        profiles: VecDeque::new(),
        first_recorded: 0,
        record_full: params.record_full,
    };
    let mut movers = Vec::new();
    let mut totals = Vec::new();
    let mut potentials = unit_cost.map(|_| Vec::new());
    let mut gaps = Vec::new();
    let mut warmup = None;
    let mut cycle = None;

    let mut x = x0.clone();
    let mut prev = None;
    let mut t = 0u64;
    let outcome = loop {
        rec.push(&x);
        totals.push(x.total());
        if let (Some(c), Some(p)) = (unit_cost, potentials.as_mut()) {
            let y: Vec<f64> = x.outputs().iter().map(|v| c * v).collect();
            p.push(potential_of(&y));
            if warmup.is_none() && warmup_conditions_hold(&y) {
                warmup = Some(t);
            }
        }
        let gap = epsilon_gap(cfg, &x)?;
        gaps.push(gap);
        if gap <= params.eps {
            break Outcome::Converged { steps: t };
        }
        if let Some(det) = detector.as_mut() {
            if let Some((start, period)) =
                det.observe(t, x.outputs(), (t % phase_len as u64) as usize)
            {
                if period < 2 {
                    break Outcome::Exhausted {
                        steps: t,
                        stalled: true,
                    };
                }
                cycle = Some(trace_cycle(cfg, &x, policy, t, start, period, prev)?);
                break Outcome::CycleDetected { start, period };
            }
        }
        if t == params.max_steps {
            break Outcome::Exhausted {
                steps: t,
                stalled: false,
            };
        }
        let Some(mover) = select_mover(policy, cfg, &x, t, prev, &mut rng)? else {
            break Outcome::Exhausted {
                steps: t,
                stalled: true,
            };
        };
        step_in_place(cfg, &mut x, mover);
        movers.push(mover);
        prev = Some(mover);
        t += 1;
    };

    Ok(Trajectory {
        profiles: rec.profiles,
        first_recorded: rec.first_recorded,
        movers,
        totals,
        potentials,
        gaps,
        warmup_end: warmup,
        outcome,
        cycle,
        notes,
    })
}

/// Replays one period from the revisit at time `t`; the states match those
/// at `start .. start + period` up to the detection rounding.
fn trace_cycle(
    cfg: &ContestConfig,
    x: &ActionProfile,
    policy: &SelectionPolicy,
    t: u64,
    start: u64,
    period: u64,
    mut prev: Option<usize>,
) -> Result<CycleReport> {
    // Only deterministic policies reach here, so the generator is unused.
    let mut rng = run_rng(0);
    let mut state = x.clone();
    let mut cycle_states = Vec::with_capacity(period as usize);
    for k in 0..period {
        cycle_states.push(state.clone());
        let Some(mover) = select_mover(policy, cfg, &state, t + k, prev, &mut rng)? else {
            break;
        };
        step_in_place(cfg, &mut state, mover);
        prev = Some(mover);
    }
    Ok(CycleReport {
        entry_time: start,
        period,
        cycle_states,
    })
}
