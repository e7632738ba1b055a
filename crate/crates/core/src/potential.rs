//! Best-response potential for homogeneous unit-cost contests and the
//! quantities used to analyse convergence.
//!
//! The potential is
//!
//! ```text
//! f(x) = (1/3) s^3 - sum_{i<j} x_i x_j + (1/6) (1 - 1/n)^3,   s = sum_i x_i
//! ```
//!
//! and a best-response move by any agent minimises it along that agent's
//! coordinate. All functions here assume unit cost; rescale first with
//! [`rescale_unit_cost`](crate::contest::rescale_unit_cost).

use crate::contest::ActionProfile;
use crate::error::{Error, Result};

/// First factor of the contraction constant: `min(1/20, (1/3 - 27/125) (1/4)^3)`.
pub const KAPPA_G: f64 = {
    let tail = (1.0 / 3.0 - 27.0 / 125.0) / 64.0;
    if tail < 1.0 / 20.0 {
        tail
    } else {
        1.0 / 20.0
    }
};

/// Second factor: `min((sqrt(6/5) - 1)^2 / 8, 1/12)`.
pub fn kappa_h() -> f64 {
    let r = (6.0f64 / 5.0).sqrt() - 1.0;
    (r * r / 8.0).min(1.0 / 12.0)
}

/// `kappa = kappa_g * kappa_h`; expected potential contracts by `1 - kappa L`
/// per step while the total output is at least 1/4.
pub fn kappa() -> f64 {
    KAPPA_G * kappa_h()
}

/// Absolute slack for comparisons between potential values that are each
/// computed with O(1e-16) cancellation error.
pub const ROUNDING_SLACK: f64 = 1e-12;

fn constant_term(n: usize) -> f64 {
    let r = 1.0 - 1.0 / n as f64;
    r * r * r / 6.0
}

/// `sum_{i<j} x_i x_j` via `(s^2 - sum x_i^2) / 2`.
fn pair_sum(outputs: &[f64]) -> f64 {
    let s: f64 = outputs.iter().sum();
    let sq: f64 = outputs.iter().map(|v| v * v).sum();
    (s * s - sq) / 2.0
}

pub fn potential(x: &ActionProfile) -> f64 {
    potential_of(x.outputs())
}

pub fn potential_of(outputs: &[f64]) -> f64 {
    let s: f64 = outputs.iter().sum();
    s * s * s / 3.0 - pair_sum(outputs) + constant_term(outputs.len())
}

/// `df/dx_i = s^2 - sum_{j != i} x_j`.
pub fn potential_gradient(x: &ActionProfile) -> Vec<f64> {
    let s = x.total();
    x.others_totals().into_iter().map(|o| s * s - o).collect()
}

/// Potential after agent `i` best-responds, in closed form:
/// `s r - (2/3) r^{3/2} - sum_{j<k} x_j x_k + const` with `r = s - x_i`.
///
/// Requires `0 < r < 1`, which holds throughout the post-warm-up regime.
pub fn per_agent_next_potential(x: &ActionProfile, i: usize) -> Result<f64> {
    if i >= x.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            n: x.len(),
        });
    }
    let r = x.others_total(i);
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(
            "others' output",
            format!("closed form needs 0 < s - x_i < 1, got {r}"),
        ));
    }
    let s = x.total();
    Ok(s * r - (2.0 / 3.0) * r * r.sqrt() - pair_sum(x.outputs()) + constant_term(x.len()))
}

fn check_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::InvalidWeights(format!(
            "{} weights for {n} agents",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidWeights(format!(
            "weight {w} is not a probability"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
    }
    Ok(())
}

/// `E[f(x_{t+1}) | x_t]` when agent `i` moves with probability `weights[i]`.
pub fn expected_next_potential(x: &ActionProfile, weights: &[f64]) -> Result<f64> {
    check_weights(weights, x.len())?;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w * per_agent_next_potential(x, i)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialReport {
    pub value: f64,
    pub per_agent_next: Vec<f64>,
    pub expected_next: f64,
    /// `expected_next <= (1 - kappa L) value` when `sigma >= 1/4`, otherwise
    /// `expected_next <= value`; both up to [`ROUNDING_SLACK`].
    pub contraction_ok: bool,
    pub sigma: f64,
}

/// Everything the contraction argument looks at, for one profile and one
/// selection distribution with lower weight bound `lower`.
pub fn potential_report(x: &ActionProfile, weights: &[f64], lower: f64) -> Result<PotentialReport> {
    check_weights(weights, x.len())?;
    let per_agent_next = (0..x.len())
        .map(|i| per_agent_next_potential(x, i))
        .collect::<Result<Vec<_>>>()?;
    let expected_next = weights
        .iter()
        .zip(&per_agent_next)
        .map(|(w, f)| w * f)
        .sum::<f64>();
    let value = potential(x);
    let sigma = x.total();
    let factor = if sigma >= 0.25 {
        1.0 - kappa() * lower
    } else {
        1.0
    };
    Ok(PotentialReport {
        value,
        contraction_ok: expected_next <= factor * value + ROUNDING_SLACK,
        per_agent_next,
        expected_next,
        sigma,
    })
}

/// Spectrum of the potential's Hessian `(2 sigma - 1) 11^T + I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianSpectrum {
    /// Eigenvalue 1, with multiplicity `n - 1`.
    pub unit: f64,
    pub unit_multiplicity: usize,
    /// `2 n sigma - (n - 1)`, multiplicity 1, along the all-ones direction.
    pub principal: f64,
}

impl HessianSpectrum {
    /// All `n` eigenvalues in ascending order.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = vec![self.unit; self.unit_multiplicity];
        v.push(self.principal);
        v.sort_by(f64::total_cmp);
        v
    }
}

pub fn potential_hessian_eigs(n: usize, sigma: f64) -> Result<HessianSpectrum> {
    if n < 2 {
        return Err(Error::TooFewAgents(n));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::domain("sigma", format!("{sigma}")));
    }
    let nf = n as f64;
    Ok(HessianSpectrum {
        unit: 1.0,
        unit_multiplicity: n - 1,
        principal: 2.0 * nf * sigma - (nf - 1.0),
    })
}

/// Starting point of the two-agent `z` sequence as a function of `x_{0,1}`.
///
/// `sqrt(x)` on `(0, 1/4)`, `sqrt(x) - x` on `[1/4, 1)` and `sqrt(a)`
/// otherwise. The middle case is the first best response of agent 2; the
/// sign-flipped form `x - sqrt(x)` is negative on that range.
pub fn gamma_two_agent(x0: &ActionProfile, floor_action: f64) -> Result<f64> {
    if x0.len() != 2 {
        return Err(Error::domain(
            "profile",
            format!("two-agent gamma needs 2 agents, got {}", x0.len()),
        ));
    }
    let x = x0.get(0);
    Ok(if x > 0.0 && x < 0.25 {
        x.sqrt()
    } else if (0.25..1.0).contains(&x) {
        x.sqrt() - x
    } else {
        floor_action.sqrt()
    })
}

/// `min(A u B u {a})` with `A = {x_{0,i} in (0, 1)}` and
/// `B = {sqrt((1 - sqrt(y)) / 2) : y in A}`: a lower bound on the total
/// output once the warm-up phase ends.
pub fn gamma_n_agent(x0: &ActionProfile, floor_action: f64) -> f64 {
    x0.outputs()
        .iter()
        .filter(|&&v| v > 0.0 && v < 1.0)
        .flat_map(|&y| [y, ((1.0 - y.sqrt()) / 2.0).sqrt()])
        .fold(floor_action, f64::min)
}

fn check_half_open(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 0.5 {
        Ok(())
    } else {
        Err(Error::domain(
            name,
            format!("must lie in (0, 1/2), got {v}"),
        ))
    }
}

/// `z_0 = gamma`, `z_{t+1} = sqrt(z_t (1 - z_t))`; `steps + 1` terms.
pub fn geometric_mean_sequence(gamma: f64, steps: usize) -> Result<Vec<f64>> {
    check_half_open("gamma", gamma)?;
    let mut z = Vec::with_capacity(steps + 1);
    z.push(gamma);
    for t in 0..steps {
        let prev = z[t];
        z.push((prev * (1.0 - prev)).sqrt());
    }
    Ok(z)
}

/// First `t` with `z_t >= 1/2 - eps` for the geometric-mean sequence.
///
/// Once `z` passes 1/4 the recursion is carried on the deficit
/// `zeta = 1 - 2z`, which obeys `zeta' = zeta^2 / (1 + sqrt(1 - zeta^2))`
/// and stays accurate when `1/2 - eps` is not representable.
pub fn steps_to_near_half(gamma: f64, eps: f64) -> Result<u64> {
    check_half_open("gamma", gamma)?;
    check_half_open("eps", eps)?;
    let mut t = 0u64;
    let mut z = gamma;
    while z < 0.25 {
        if z >= 0.5 - eps {
            return Ok(t);
        }
        z = (z * (1.0 - z)).sqrt();
        t += 1;
    }
    let mut zeta = 1.0 - 2.0 * z;
    while zeta > 2.0 * eps {
        zeta = zeta * zeta / (1.0 + (1.0 - zeta * zeta).sqrt());
        t += 1;
    }
    Ok(t)
}

/// `lg lg (1/gamma) + lg lg (1/eps)`.
pub fn two_agent_predicted_steps(eps: f64, gamma: f64) -> Result<f64> {
    check_half_open("eps", eps)?;
    check_half_open("gamma", gamma)?;
    Ok((1.0 / gamma).log2().log2() + (1.0 / eps).log2().log2())
}

/// Position of a total output in the doubly-exponential partition of (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalIndex {
    pub level: u32,
    /// Set when the interval's lower endpoint is not representable as an f64;
    /// every positive double below 2^-1025 lands here.
    pub capped: bool,
}

/// Deepest level whose lower endpoint `2^-(2^(l-1)+1)` is a (subnormal) double.
pub const MAX_EXACT_LEVEL: u32 = 11;

/// `2^-k` for `k <= 1074`, built from its bit pattern.
fn pow2_neg(k: u32) -> f64 {
    if k <= 1022 {
        f64::from_bits(((1023 - k) as u64) << 52)
    } else {
        f64::from_bits(1u64 << (1074 - k))
    }
}

/// Level 1 is `[1/4, 1)`; level `l >= 2` is `[2^-(2^(l-1)+1), 2^-(2^(l-2)+1))`.
pub fn interval_index(s: f64) -> Result<IntervalIndex> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(
            "total output",
            format!("must lie in (0, 1), got {s}"),
        ));
    }
    if s >= 0.25 {
        return Ok(IntervalIndex {
            level: 1,
            capped: false,
        });
    }
    for level in 2..=MAX_EXACT_LEVEL {
        if s >= pow2_neg((1u32 << (level - 1)) + 1) {
            return Ok(IntervalIndex {
                level,
                capped: false,
            });
        }
    }
    Ok(IntervalIndex {
        level: MAX_EXACT_LEVEL + 1,
        capped: true,
    })
}


#[cfg(test)]
mod properties {
    use super::*;
    use crate::contest::ContestConfig;
    use crate::dynamics::step;
    use proptest::prelude::*;

    /// Profile with total `sigma`, from raw positive weights.
    fn with_total(raw: &[f64], sigma: f64) -> ActionProfile {
        let sum: f64 = raw.iter().sum();
        ActionProfile::new(raw.iter().map(|v| v * sigma / sum).collect()).unwrap()
    }

    fn naive_potential(x: &[f64]) -> f64 {
        let n = x.len() as f64;
        let s: f64 = x.iter().sum();
        let mut pairs = 0.0;
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                pairs += x[i] * x[j];
            }
        }
        s.powi(3) / 3.0 - pairs + (1.0 - 1.0 / n).powi(3) / 6.0
    }

    proptest! {
        #[test]
        fn closed_form_matches_pairwise_sum(x in prop::collection::vec(0.0..2.0f64, 2..12)) {
            prop_assert!((potential_of(&x) - naive_potential(&x)).abs() <= 1e-12);
        }

        #[test]
        fn range_below_unit_total(
            raw in prop::collection::vec(1e-9..1.0f64, 2..20),
            sigma in 0.0..1.0f64,
        ) {
            let f = potential(&with_total(&raw, sigma));
            prop_assert!((-ROUNDING_SLACK..=0.5 + ROUNDING_SLACK).contains(&f));
        }

        #[test]
        fn next_potential_is_potential_after_step(
            raw in prop::collection::vec(1e-6..1.0f64, 2..12),
            sigma in 0.05..0.99f64,
            mover in any::<prop::sample::Index>(),
        ) {
            let x = with_total(&raw, sigma);
            let i = mover.index(x.len());
            let cfg = ContestConfig::homogeneous_with(x.len(), 1.0, 1e-6).unwrap();
            let direct = potential(&step(&cfg, &x, i).unwrap());
            prop_assert!((per_agent_next_potential(&x, i).unwrap() - direct).abs() <= 1e-12);
        }

        #[test]
        fn expected_next_never_exceeds_current(
            raw in prop::collection::vec(1e-6..1.0f64, 2..12),
            sigma in 0.05..0.99f64,
        ) {
            let x = with_total(&raw, sigma);
            let n = x.len();
            let weights = vec![1.0 / n as f64; n];
            prop_assert!(expected_next_potential(&x, &weights).unwrap() <= potential(&x) + ROUNDING_SLACK);
        }

        #[test]
        fn hessian_spectrum_is_affine_in_total(n in 2usize..60, sigma in 0.0..3.0f64) {
            let s = potential_hessian_eigs(n, sigma).unwrap();
            prop_assert_eq!(s.unit_multiplicity, n - 1);
            prop_assert!((s.principal - (2.0 * n as f64 * sigma - (n as f64 - 1.0))).abs() <= 1e-12);
        }

        #[test]
        fn interval_index_moves_at_most_one_level_per_ratio_bound(s in 1e-300..0.999f64) {
            // A post-warm-up step shrinks the total by at most sqrt(3)/2.
            let next = s * 3f64.sqrt() / 2.0;
            let (a, b) = (interval_index(s).unwrap(), interval_index(next).unwrap());
            prop_assert!(b.level <= a.level + 1);
        }
    }
}
