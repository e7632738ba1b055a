//! Seeded invariant suites, sized to finish in a few seconds. Each check
//! reports pass/fail and a short measurement.

use rand::Rng;

use crate::contest::{
    best_deviation_utility, best_response_to, deviation_given, epsilon_gap, equilibrium_profile,
    rescale_unit_cost, utility_given, ActionProfile, ContestConfig,
};
use crate::dynamics::{
    run, step, warmup_conditions_hold, CustomWeights, DynamicsParams, Outcome, SelectionPolicy,
};
use crate::error::Result;
use crate::potential::{
    expected_next_potential, gamma_n_agent, interval_index, kappa, potential_gradient,
    potential_hessian_eigs, potential_of, steps_to_near_half, two_agent_predicted_steps,
    ROUNDING_SLACK,
};
use crate::rng::{run_rng, RunRng};
use crate::walk::{
    coupled_free_walk, coverage_time, empirical_visit_success, lemma_visit_bound, WalkConfig,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(suite: &'static str, name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        suite,
        name,
        passed,
        detail,
    }
}

/// Unit-cost profile with a random mix of zero, small and large outputs.
pub fn random_profile(rng: &mut RunRng, n: usize) -> ActionProfile {
    let v = (0..n)
        .map(|_| match rng.random_range(0..4) {
            0 => 0.0,
            1 => 10f64.powf(rng.random_range(-8.0..-0.7)),
            2 => rng.random_range(0.0..0.3),
            _ => rng.random_range(0.3..3.0),
        })
        .collect();
    ActionProfile::new(v).expect("sampled outputs are finite and non-negative")
}

/// Unit-cost profile with total exactly `sigma`.
pub fn profile_with_total(rng: &mut RunRng, n: usize, sigma: f64) -> ActionProfile {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-12).collect();
    let sum: f64 = raw.iter().sum();
    ActionProfile::new(raw.into_iter().map(|v| v * sigma / sum).collect())
        .expect("scaled outputs are finite and non-negative")
}

pub fn contest_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = run_rng(seed);
    let mut worst_br = f64::NEG_INFINITY;
    let mut worst_dev: f64 = 0.0;
    for _ in 0..2000 {
        let c = 10f64.powf(rng.random_range(-1.0..1.0));
        let s = rng.random_range(1e-6..1.5) / c;
        let br = best_response_to(c, s, 0.01)?;
        let at_br = utility_given(2, c, br, s);
        for k in 0..=400 {
            let z = k as f64 / 400.0 / c;
            worst_br = worst_br.max(utility_given(2, c, z, s) - at_br);
        }
        worst_dev = worst_dev.max((deviation_given(c, s, 0.01) - at_br).abs());
    }
    let mut worst_eq: f64 = 0.0;
    for n in 2..=50 {
        let cfg = ContestConfig::homogeneous_with(n, 1.0, 0.01)?;
        worst_eq = worst_eq.max(epsilon_gap(&cfg, &equilibrium_profile(&cfg)?)?);
    }
    let mut worst_rescale: f64 = 0.0;
    for _ in 0..500 {
        let n = rng.random_range(2..8);
        let c = 10f64.powf(rng.random_range(-1.0..0.5));
        let cfg = ContestConfig::homogeneous_with(n, c, 0.01)?;
        let x = random_profile(&mut rng, n);
        let i = rng.random_range(0..n);
        let (unit, y) = rescale_unit_cost(&cfg, &x)?;
        let a = step(&unit, &y, i)?;
        let b = step(&cfg, &x, i)?.scaled(c)?;
        for k in 0..n {
            worst_rescale = worst_rescale.max((a.get(k) - b.get(k)).abs());
        }
    }
    Ok(vec![
        check(
            "contest",
            "best response beats grid",
            worst_br <= 1e-12,
            format!("max grid excess {worst_br:.3e}"),
        ),
        check(
            "contest",
            "deviation closed form",
            worst_dev <= 1e-12,
            format!("max error {worst_dev:.3e}"),
        ),
        check(
            "contest",
            "equilibrium gap n=2..50",
            worst_eq <= 1e-12,
            format!("max gap {worst_eq:.3e}"),
        ),
        check(
            "contest",
            "rescaling commutes with step",
            worst_rescale <= 1e-12,
            format!("max diff {worst_rescale:.3e}"),
        ),
    ])
}

fn alternation_steps(eps: f64, gamma: f64) -> Result<u64> {
    let cfg = ContestConfig::homogeneous_with(2, 1.0, gamma * gamma)?;
    let x0 = ActionProfile::new(vec![gamma * gamma, 0.0])?;
    let params = DynamicsParams::new(eps, 1000, 0)?;
    let traj = run(
        &cfg,
        &x0,
        &SelectionPolicy::Alternating { first: 1 },
        &params,
    )?;
    Ok(traj.outcome.steps())
}

pub fn dynamics_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    let params = DynamicsParams::new(1e-10, 1000, 0)?;
    let alt = SelectionPolicy::Alternating { first: 0 };
    let table = run(
        &ContestConfig::new(vec![1.0, 0.1], 1e-5)?,
        &ActionProfile::new(vec![0.0, 1e-5])?,
        &alt,
        &params,
    )?;
    let ex2 = run(
        &ContestConfig::new(vec![1.0, 0.16], 0.25)?,
        &ActionProfile::new(vec![0.0, 0.25])?,
        &alt,
        &params,
    )?;
    out.push(check(
        "dynamics",
        "heterogeneous cycles",
        table.outcome
            == Outcome::CycleDetected {
                start: 0,
                period: 6,
            }
            && ex2.outcome
                == Outcome::CycleDetected {
                    start: 0,
                    period: 4,
                },
        format!("{:?} / {:?}", table.outcome, ex2.outcome),
    ));

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 4..=40 {
        for j in 4..=40 {
            let (eps, gamma) = (2f64.powi(-i), 2f64.powi(-j));
            let d = alternation_steps(eps, gamma)? as f64 - two_agent_predicted_steps(eps, gamma)?;
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    out.push(check(
        "dynamics",
        "two-agent rate window",
        lo >= -4.0 && hi <= 6.0,
        format!("steps - prediction in [{lo:.2}, {hi:.2}]"),
    ));

    let mut rng = run_rng(seed);
    let mut violations = [0usize; 4];
    let runs = 200;
    for r in 0..runs {
        let n = rng.random_range(2..10);
        let a = 10f64.powf(rng.random_range(-10.0..-1.0));
        let cfg = ContestConfig::homogeneous_with(n, 1.0, a)?;
        let x0 = random_profile(&mut rng, n);
        let params = DynamicsParams::new(1e-10, 100_000, seed ^ r)
            .unwrap()
            .recording();
        let traj = run(&cfg, &x0, &SelectionPolicy::Uniform, &params)?;
        let Some(tw) = traj.warmup_end else { continue };
        if traj
            .profiles()
            .skip(tw as usize)
            .any(|(_, x)| !warmup_conditions_hold(x.outputs()))
        {
            violations[0] += 1;
        }
        if traj.totals[tw as usize] < gamma_n_agent(&x0, a) {
            violations[1] += 1;
        }
        for t in tw.max(1) as usize..traj.totals.len() - 1 {
            let (s, s1) = (traj.totals[t], traj.totals[t + 1]);
            if s1 / s < 3f64.sqrt() / 2.0 - 1e-12 {
                violations[2] += 1;
            }
            if interval_index(s1)?.level > interval_index(s)?.level + 1 {
                violations[3] += 1;
            }
        }
    }
    out.push(check(
        "dynamics",
        "warm-up and total-output laws",
        violations.iter().all(|&v| v == 0),
        format!(
            "{runs} runs; absorbing/floor/ratio/interval violations {:?}",
            violations
        ),
    ));
    Ok(out)
}

/// Items of the potential inequalities checked on random profiles.
pub fn potential_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = run_rng(seed);
    let mut fails = [0usize; 4];
    let samples = 20_000;
    for _ in 0..samples {
        let n = rng.random_range(2..=20);
        let nf = n as f64;
        let star = (nf - 1.0) / (nf * nf);
        let x = {
            let sigma = rng.random_range(0.0..1.0);
            profile_with_total(&mut rng, n, sigma)
        };
        let f = potential_of(x.outputs());
        if !(-ROUNDING_SLACK..=0.5 + ROUNDING_SLACK).contains(&f) {
            fails[0] += 1;
        }
        let low_mass = 3.0 * (nf - 1.0) / (4.0 * nf);
        if x.total() <= low_mass && f < ((nf - 1.0) / nf).powi(3) / 40.0 - ROUNDING_SLACK {
            fails[1] += 1;
        }
        // The convexity and smoothness bounds are stated for totals below 1
        // and need n >= 3 (for n = 2 the relevant Hessian eigenvalues cross 1).
        if n >= 3 {
            let y = {
                let sigma = rng.random_range(low_mass..1.0);
                profile_with_total(&mut rng, n, sigma)
            };
            let fy = potential_of(y.outputs());
            let dist2: f64 = y.outputs().iter().map(|v| (v - star).powi(2)).sum();
            if fy < 0.5 * dist2 - ROUNDING_SLACK {
                fails[2] += 1;
            }
            let w = {
                let sigma = rng.random_range(0.0..1.0);
                profile_with_total(&mut rng, n, sigma)
            };
            let fw = potential_of(w.outputs());
            let dev_total = w.total() - nf * star;
            let smooth: f64 = w
                .outputs()
                .iter()
                .map(|v| (dev_total - (v - star)).powi(2))
                .sum::<f64>()
                / 2.0;
            if fw > smooth + ROUNDING_SLACK {
                fails[3] += 1;
            }
        }
    }

    let h = 1e-5;
    let mut worst_grad: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    for &n in &[2usize, 3, 5, 10] {
        for _ in 0..100 {
            let x = {
                let sigma = rng.random_range(0.1..1.5);
                profile_with_total(&mut rng, n, sigma)
            };
            let g = potential_gradient(&x);
            let mut hess = vec![vec![0.0; n]; n];
            for i in 0..n {
                let mut p = x.outputs().to_vec();
                let mut m = p.clone();
                p[i] += h;
                m[i] -= h;
                worst_grad = worst_grad
                    .max(((potential_of(&p) - potential_of(&m)) / (2.0 * h) - g[i]).abs());
                // Second derivatives as central differences of the gradient:
                // second differences of f itself lose ~1e-6 to rounding at this step.
                let gp = potential_gradient(&ActionProfile::new(p)?);
                let gm = potential_gradient(&ActionProfile::new(m)?);
                for j in 0..n {
                    hess[j][i] = (gp[j] - gm[j]) / (2.0 * h);
                }
            }
            // The Hessian is (2 sigma - 1) J + I: check against that structure.
            let spec = potential_hessian_eigs(n, x.total())?;
            let off = (spec.principal - spec.unit) / n as f64;
            for (i, row) in hess.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    let expect = off + if i == j { spec.unit } else { 0.0 };
                    worst_eig = worst_eig.max((v - expect).abs());
                }
            }
        }
    }

    let mut window = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 2..=64 {
        for j in 2..=64 {
            let (gamma, eps) = (2f64.powi(-i), 2f64.powi(-j));
            let d = steps_to_near_half(gamma, eps)? as f64 - two_agent_predicted_steps(eps, gamma)?;
            window = (window.0.min(d), window.1.max(d));
        }
    }

    let mut rng2 = run_rng(seed.wrapping_add(1));
    let mut bridge_worst: f64 = 0.0;
    for _ in 0..5000 {
        let n = rng2.random_range(3..=50);
        let nf = n as f64;
        let eps = rng2.random_range(0.0..1.0) / (nf * nf.sqrt());
        let dir: Vec<f64> = (0..n).map(|_| rng2.random_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let star = (nf - 1.0) / (nf * nf);
        let z = ActionProfile::new(dir.iter().map(|d| star + eps * d / norm).collect())?;
        let cfg = ContestConfig::homogeneous_with(n, 1.0, 0.01)?;
        let shortfall = (0..n)
            .map(|i| {
                let u = utility_given(n, 1.0, z.get(i), z.others_total(i));
                Ok(best_deviation_utility(&cfg, &z, i)? - u)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        bridge_worst = bridge_worst.max(shortfall / (3.0 * nf.sqrt() * eps));
    }

    Ok(vec![
        check(
            "potential",
            "range 0 <= f <= 1/2",
            fails[0] == 0,
            format!("{} violations / {samples}", fails[0]),
        ),
        check(
            "potential",
            "lower bound at low mass",
            fails[1] == 0,
            format!("{} violations", fails[1]),
        ),
        check(
            "potential",
            "strong convexity bound (n >= 3)",
            fails[2] == 0,
            format!("{} violations", fails[2]),
        ),
        check(
            "potential",
            "smoothness bound (n >= 3)",
            fails[3] == 0,
            format!("{} violations", fails[3]),
        ),
        check(
            "potential",
            "gradient vs finite differences",
            worst_grad <= 1e-6,
            format!("max error {worst_grad:.3e}"),
        ),
        check(
            "potential",
            "Hessian spectrum vs finite differences",
            worst_eig <= 1e-6,
            format!("max error {worst_eig:.3e}"),
        ),
        check(
            "potential",
            "geometric-mean threshold window",
            window.0 >= -3.0 && window.1 <= 0.0,
            format!("t - prediction in [{:.2}, {:.2}]", window.0, window.1),
        ),
        check(
            "potential",
            "near-equilibrium payoff shortfall <= 3 sqrt(n) eps",
            bridge_worst <= 1.0,
            format!("worst ratio {bridge_worst:.3}"),
        ),
    ])
}

/// Potential decrease and expected contraction along randomised runs.
pub fn contraction_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = run_rng(seed);
    let mut increases = 0usize;
    let mut contraction_fails = 0usize;
    let mut checked = 0usize;
    for r in 0..100 {
        let n = rng.random_range(4..12);
        let a = 10f64.powf(rng.random_range(-8.0..-2.0));
        let cfg = ContestConfig::homogeneous_with(n, 1.0, a)?;
        let weights = CustomWeights::avoid_previous(n)?;
        let lower = weights.lower();
        let policy = SelectionPolicy::WeightedCustom(weights.clone());
        let x0 = random_profile(&mut rng, n);
        let params = DynamicsParams::new(1e-10, 100_000, seed ^ r)
            .unwrap()
            .recording();
        let traj = run(&cfg, &x0, &policy, &params)?;
        let Some(tw) = traj.warmup_end else { continue };
        let pots = traj.potentials.as_ref().expect("homogeneous run");
        for t in tw as usize..pots.len() - 1 {
            if pots[t + 1] > pots[t] + ROUNDING_SLACK {
                increases += 1;
            }
            let x = traj.profile(t as u64).expect("fully recorded");
            if x.total() >= 0.25 {
                let prev = t.checked_sub(1).map(|k| traj.movers[k]);
                let w = weights.weights(t as u64, x, prev)?;
                checked += 1;
                if expected_next_potential(x, &w)?
                    > (1.0 - kappa() * lower) * pots[t] + ROUNDING_SLACK
                {
                    contraction_fails += 1;
                }
            }
        }
    }
    Ok(vec![
        check(
            "potential",
            "non-increasing after warm-up",
            increases == 0,
            format!("{increases} increases"),
        ),
        check(
            "potential",
            "expected contraction when s >= 1/4",
            contraction_fails == 0 && checked > 0,
            format!("{contraction_fails} violations / {checked} states"),
        ),
    ])
}

pub fn walk_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = run_rng(seed);
    let mut worst_margin = f64::INFINITY;
    for p in [0.1, 0.2, 0.3, 0.4] {
        for k in [1, 5, 20] {
            for m in [1, 10, 50] {
                for delta in [0.05, 0.1] {
                    let horizon = lemma_visit_bound(p, k, m, delta)?;
                    let f = empirical_visit_success(
                        &WalkConfig::new(p, k)?,
                        m,
                        horizon,
                        2000,
                        &mut rng,
                    )?;
                    worst_margin = worst_margin.min(f - (1.0 - delta));
                }
            }
        }
    }
    let mut dominated = true;
    for _ in 0..200 {
        let cfg = WalkConfig::new(rng.random_range(0.0..0.5), rng.random_range(1..10))?;
        let (walled, free) = coupled_free_walk(&cfg, 300, &mut rng);
        dominated &= walled
            .states
            .iter()
            .zip(&free)
            .all(|(&y, &z)| y as i64 >= z);
    }
    let n = 20;
    let reps = 4000;
    let cut = n as f64 * (n as f64).ln() + 3.0 * n as f64;
    let mut late = 0;
    for _ in 0..reps {
        let trace: Vec<usize> = (0..2000).map(|_| rng.random_range(0..n)).collect();
        if coverage_time(&trace, n).is_none_or(|t| t as f64 > cut) {
            late += 1;
        }
    }
    let frac = late as f64 / reps as f64;
    Ok(vec![
        check(
            "walk",
            "visit bound holds on grid",
            worst_margin >= 0.0,
            format!("min success - (1 - delta) = {worst_margin:.4}"),
        ),
        check(
            "walk",
            "coupling dominance",
            dominated,
            "200 coupled paths".into(),
        ),
        check(
            "walk",
            "coverage tail",
            frac <= (-3f64).exp() + 0.01,
            format!("P[tau > n ln n + 3n] ~ {frac:.4}"),
        ),
    ])
}

/// All suites in a fixed order.
pub fn run_all(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = contest_suite(seed)?;
    out.extend(dynamics_suite(seed)?);
    out.extend(potential_suite(seed)?);
    out.extend(contraction_suite(seed)?);
    out.extend(walk_suite(seed)?);
    Ok(out)
}
