//! Acceptance suite: the nine headline criteria, each run at its stated
//! scale, tolerance and time limit. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.
//!
//! Reference values are recomputed here from first principles rather than
//! taken from the library wherever that is possible.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;
use tullock_dynamics::contest::{epsilon_gap, equilibrium_profile, ActionProfile, ContestConfig};
use tullock_dynamics::dynamics::{
    run, select_mover, warmup_conditions_hold, CustomWeights, DynamicsParams, Outcome,
    SelectionPolicy, Trajectory,
};
use tullock_dynamics::experiment::{run_experiment, ExperimentSpec, PolicyKind};
use tullock_dynamics::potential::{
    expected_next_potential, gamma_n_agent, interval_index, kappa, potential, potential_gradient,
    potential_hessian_eigs, potential_of, KAPPA_G,
};
use tullock_dynamics::rng::{derive_seed, run_rng, RunRng};
use tullock_dynamics::walk::{
    coverage_time, empirical_visit_success, lemma_visit_bound, WalkConfig,
};
use tullock_dynamics::Result;

const SEED: u64 = 0x7a11_0c4e;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { passed, detail })
}

/// `lg lg (1/v)`.
fn lglg_inv(v: f64) -> f64 {
    (1.0 / v).log2().log2()
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Non-negative profile with total `sigma` and a randomly chosen shape:
/// flat, skewed, sparse or concentrated on one agent.
fn shaped_profile(rng: &mut RunRng, n: usize, sigma: f64) -> ActionProfile {
    let shape = rng.random_range(0..4);
    let mut raw: Vec<f64> = (0..n)
        .map(|_| match shape {
            0 => rng.random_range(0.5..1.0),
            1 => -rng.random::<f64>().max(1e-300).ln(),
            2 => {
                if rng.random_bool(0.5) {
                    0.0
                } else {
                    rng.random::<f64>()
                }
            }
            _ => 1e-6 * rng.random::<f64>(),
        })
        .collect();
    if shape == 3 || raw.iter().all(|&v| v == 0.0) {
        raw[rng.random_range(0..n)] = 1.0;
    }
    let sum: f64 = raw.iter().sum();
    ActionProfile::new(raw.into_iter().map(|v| v * sigma / sum).collect()).unwrap()
}

/// Point uniformly distributed on the unit sphere in `n` dimensions:
/// a normalised vector of Box-Muller normals.
fn unit_direction(rng: &mut RunRng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| {
                let u: f64 = 1.0 - rng.random::<f64>();
                (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * rng.random::<f64>()).cos()
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn two_agent_rate() -> Result<Verdict> {
    let mut worst = (f64::INFINITY, f64::NEG_INFINITY);
    let mut misses = Vec::new();
    for i in 4..=40 {
        for j in 4..=40 {
            let (eps, gamma) = (2f64.powi(-i), 2f64.powi(-j));
            let cfg = ContestConfig::homogeneous_with(2, 1.0, gamma * gamma)?;
            let x0 = ActionProfile::new(vec![gamma * gamma, 0.0])?;
            let traj = run(
                &cfg,
                &x0,
                &SelectionPolicy::Alternating { first: 1 },
                &DynamicsParams::new(eps, 10_000, 0)?,
            )?;
            let Outcome::Converged { steps } = traj.outcome else {
                misses.push((i, j));
                continue;
            };
            let d = steps as f64 - (lglg_inv(eps) + lglg_inv(gamma));
            worst = (worst.0.min(d), worst.1.max(d));
        }
    }
    verdict(
        misses.is_empty() && worst.0 >= -4.0 && worst.1 <= 6.0,
        format!(
            "steps - (lglg 1/eps + lglg 1/gamma) in [{:.2}, {:.2}] over 37x37 grid, {} non-converged",
            worst.0,
            worst.1,
            misses.len()
        ),
    )
}

/// State at time `t`, continuing past the end of the run around the detected cycle.
fn state_at(traj: &Trajectory, t: u64) -> Option<ActionProfile> {
    if let Some(x) = traj.profile(t) {
        return Some(x.clone());
    }
    let c = traj.cycle.as_ref()?;
    let period = c.cycle_states.len() as u64;
    (t >= c.entry_time && period > 0)
        .then(|| c.cycle_states[((t - c.entry_time) % period) as usize].clone())
}

fn heterogeneous_cycles() -> Result<Verdict> {
    let alt = SelectionPolicy::Alternating { first: 0 };
    let params = DynamicsParams::new(1e-10, 100, 0)?.recording();

    let table = run(
        &ContestConfig::new(vec![1.0, 0.1], 1e-5)?,
        &ActionProfile::new(vec![0.0, 1e-5])?,
        &alt,
        &params,
    )?;
    let printed = [
        [0.00000, 0.00001],
        [0.00315, 0.00001],
        [0.00315, 0.17439],
        [0.24321, 0.17439],
        [0.24321, 1.31631],
        [0.00000, 1.31631],
        [0.00000, 0.00001],
        [0.00315, 0.00001],
    ];
    let mut table_err: f64 = 0.0;
    for (t, row) in printed.iter().enumerate() {
        let x = state_at(&table, t as u64).expect("recorded or on the cycle");
        for (v, want) in x.outputs().iter().zip(row) {
            table_err = table_err.max((v - want).abs());
        }
    }
    let table_ok = table.outcome
        == Outcome::CycleDetected {
            start: 0,
            period: 6,
        }
        && table_err <= 5e-6;

    let ex2 = run(
        &ContestConfig::new(vec![1.0, 4.0 / 25.0], 0.25)?,
        &ActionProfile::new(vec![0.0, 0.25])?,
        &alt,
        &params,
    )?;
    let exact = [
        [0.0, 0.25],
        [0.25, 0.25],
        [0.25, 1.0],
        [0.0, 1.0],
        [0.0, 0.25],
    ];
    let mut ex2_err: f64 = 0.0;
    for (t, row) in exact.iter().enumerate() {
        let x = state_at(&ex2, t as u64).expect("recorded or on the cycle");
        for (v, want) in x.outputs().iter().zip(row) {
            ex2_err = ex2_err.max((v - want).abs());
        }
    }
    let ex2_ok = ex2.outcome
        == Outcome::CycleDetected {
            start: 0,
            period: 4,
        }
        && ex2_err <= 1e-12;

    verdict(
        table_ok && ex2_ok,
        format!(
            "c=(1,0.1): {:?}, max table deviation {table_err:.1e}; c=(1,4/25): {:?}, max error {ex2_err:.1e}",
            table.outcome, ex2.outcome
        ),
    )
}

fn mean_steps_by<K: Fn(&tullock_dynamics::experiment::ResultRow) -> f64>(
    spec: &ExperimentSpec,
    grid: &[f64],
    key: K,
) -> Result<(Vec<f64>, usize)> {
    let results = run_experiment(spec)?;
    let bad = results.failures.len()
        + results
            .rows
            .iter()
            .filter(|r| r.outcome != "converged")
            .count();
    let means = grid
        .iter()
        .map(|&g| {
            let steps: Vec<f64> = results
                .rows
                .iter()
                .filter(|r| key(r) == g)
                .map(|r| r.steps as f64)
                .collect();
            steps.iter().sum::<f64>() / steps.len() as f64
        })
        .collect();
    Ok((means, bad))
}

fn uniform_scaling() -> Result<Verdict> {
    let ns = [5usize, 10, 20, 40, 80];
    let by_n = ExperimentSpec {
        policies: vec![PolicyKind::Unif],
        n: ns.to_vec(),
        eps: vec![1e-10],
        gamma: vec![1e-10],
        replicates: 100,
        seed: SEED,
        ..ExperimentSpec::default()
    };
    let n_grid: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let (by_n_means, bad_n) = mean_steps_by(&by_n, &n_grid, |r| r.n as f64)?;
    let nlogn: Vec<f64> = n_grid.iter().map(|n| n * n.ln()).collect();
    let r_n = pearson(&nlogn, &by_n_means);

    let eps_grid: Vec<f64> = (2..=12).map(|k| 10f64.powi(-k)).collect();
    let by_eps = ExperimentSpec {
        policies: vec![PolicyKind::Unif],
        n: vec![10],
        eps: eps_grid.clone(),
        gamma: vec![1e-10],
        replicates: 100,
        seed: SEED,
        ..ExperimentSpec::default()
    };
    let (by_eps_means, bad_eps) = mean_steps_by(&by_eps, &eps_grid, |r| r.eps)?;
    let log_inv: Vec<f64> = eps_grid.iter().map(|e| (1.0 / e).ln()).collect();
    let r_eps = pearson(&log_inv, &by_eps_means);

    verdict(
        bad_n + bad_eps == 0 && r_n >= 0.98 && r_eps >= 0.98,
        format!(
            "corr(mean steps, n ln n) = {r_n:.4}; corr(mean steps, log 1/eps) = {r_eps:.4}; {} unconverged",
            bad_n + bad_eps
        ),
    )
}

/// Counts of potential-lemma violations on random profiles of one worker.
fn potential_samples(seed: u64, samples: usize) -> [usize; 4] {
    let mut rng = run_rng(seed);
    let mut fails = [0usize; 4];
    for _ in 0..samples {
        let n = rng.random_range(2..=20);
        let nf = n as f64;
        let star = (nf - 1.0) / (nf * nf);
        let low_mass = 3.0 * (nf - 1.0) / (4.0 * nf);
        // The lemma is stated on profiles with total below 1.
        let sigma = rng.random_range(0.0..1.0);
        let z = shaped_profile(&mut rng, n, sigma);
        let f = potential(&z);
        let dist2: f64 = z.outputs().iter().map(|v| (v - star).powi(2)).sum();
        let dev_total = sigma - nf * star;
        let smooth: f64 = z
            .outputs()
            .iter()
            .map(|v| (dev_total - (v - star)).powi(2))
            .sum::<f64>()
            / 2.0;
        if !(-1e-12..=0.5 + 1e-12).contains(&f) {
            fails[0] += 1;
        }
        if sigma <= low_mass && f < ((nf - 1.0) / nf).powi(3) / 40.0 - 1e-12 {
            fails[1] += 1;
        }
        // Items 4 and 5 belong to the n >= 3 analysis.
        if n >= 3 && sigma >= low_mass && f < 0.5 * dist2 - 1e-12 {
            fails[2] += 1;
        }
        if n >= 3 && f > smooth + 1e-12 {
            fails[3] += 1;
        }
    }
    fails
}

/// Post-warm-up potential increases and contraction failures along one run.
fn trajectory_potential_checks(seed: u64) -> Result<(usize, usize, usize)> {
    let mut rng = run_rng(seed);
    let n = rng.random_range(3..=12);
    let c = 10f64.powf(rng.random_range(-1.0..1.0));
    let a = 10f64.powf(rng.random_range(-10.0..-2.0)) / c;
    let cfg = ContestConfig::homogeneous_with(n, c, a)?;
    let sigma0 = rng.random_range(0.0..3.0) / c;
    let x0 = shaped_profile(&mut rng, n, sigma0);
    let custom = CustomWeights::avoid_previous(n)
        .ok()
        .filter(|_| rng.random_bool(0.5));
    let policy = match &custom {
        Some(w) => SelectionPolicy::WeightedCustom(w.clone()),
        None => SelectionPolicy::Uniform,
    };
    let lower = custom.as_ref().map_or(1.0 / n as f64, |w| w.lower());
    let traj = run(
        &cfg,
        &x0,
        &policy,
        &DynamicsParams::new(1e-10, 200_000, seed)?.recording(),
    )?;
    let Some(tw) = traj.warmup_end else {
        return Ok((0, 0, 0));
    };
    let pots = traj.potentials.as_ref().expect("homogeneous contest");
    let (mut increases, mut contraction_fails, mut checked) = (0, 0, 0);
    for t in tw as usize..pots.len() {
        if t + 1 < pots.len() && pots[t + 1] > pots[t] + 1e-12 {
            increases += 1;
        }
        let unit = traj.profile(t as u64).expect("recorded").scaled(c)?;
        if unit.total() >= 0.25 {
            let weights = match &custom {
                Some(w) => w.weights(t as u64, &unit, t.checked_sub(1).map(|k| traj.movers[k]))?,
                None => vec![1.0 / n as f64; n],
            };
            checked += 1;
            if expected_next_potential(&unit, &weights)? > (1.0 - kappa() * lower) * pots[t] + 1e-12
            {
                contraction_fails += 1;
            }
        }
    }
    Ok((increases, contraction_fails, checked))
}

fn potential_suite() -> Result<Verdict> {
    let mut zero_err: f64 = 0.0;
    for n in 2..=50 {
        let cfg = ContestConfig::homogeneous_with(n, 1.0, 1e-3)?;
        zero_err = zero_err.max(potential(&equilibrium_profile(&cfg)?).abs());
    }

    let workers = 64u64;
    let fails = (0..workers)
        .into_par_iter()
        .map(|w| potential_samples(derive_seed(SEED, w), 1_000_000 / workers as usize))
        .reduce(|| [0; 4], |a, b| std::array::from_fn(|k| a[k] + b[k]));

    let runs: Vec<(usize, usize, usize)> = (0..400u64)
        .into_par_iter()
        .map(|r| trajectory_potential_checks(derive_seed(SEED ^ 0x4, r)))
        .collect::<Result<_>>()?;
    let increases: usize = runs.iter().map(|r| r.0).sum();
    let contraction_fails: usize = runs.iter().map(|r| r.1).sum();
    let checked: usize = runs.iter().map(|r| r.2).sum();

    let kappa_g = ((1.0 / 3.0 - 27.0 / 125.0) / 64.0f64).min(1.0 / 20.0);
    let kappa_h = (((6.0f64 / 5.0).sqrt() - 1.0).powi(2) / 8.0).min(1.0 / 12.0);
    let kappa_ok = (kappa() - kappa_g * kappa_h).abs() < 1e-18 && KAPPA_G == kappa_g;

    verdict(
        zero_err <= 1e-12
            && fails.iter().all(|&v| v == 0)
            && increases == 0
            && contraction_fails == 0
            && checked > 0
            && kappa_ok,
        format!(
            "max f(z*) {zero_err:.1e}; range/item3/item4/item5 violations {fails:?} over 1e6 profiles; \
             {increases} increases, {contraction_fails}/{checked} contraction failures; kappa {:.4e}",
            kappa()
        ),
    )
}

fn warmup_run(seed: u64) -> Result<[usize; 4]> {
    let mut rng = run_rng(seed);
    let custom = rng.random_bool(0.5);
    // The avoid-previous weights stay below 1/2 only from four agents up.
    let n = rng.random_range(if custom { 4 } else { 3 }..=12);
    let a = 10f64.powf(rng.random_range(-12.0..-1.0));
    let cfg = ContestConfig::homogeneous_with(n, 1.0, a)?;
    let sigma0 = rng.random_range(0.0..3.0);
    let x0 = shaped_profile(&mut rng, n, sigma0);
    let policy = if custom {
        SelectionPolicy::WeightedCustom(CustomWeights::avoid_previous(n)?)
    } else {
        SelectionPolicy::Uniform
    };
    let traj = run(
        &cfg,
        &x0,
        &policy,
        &DynamicsParams::new(1e-10, 200_000, seed)?.recording(),
    )?;
    let mut v = [0usize; 4];
    let Some(tw) = traj.warmup_end else {
        return Ok(v);
    };
    if traj
        .profiles()
        .skip(tw as usize)
        .any(|(_, x)| !warmup_conditions_hold(x.outputs()))
    {
        v[0] += 1;
    }
    if traj.totals[tw as usize] < gamma_n_agent(&x0, a) {
        v[1] += 1;
    }
    for t in tw.max(1) as usize..traj.totals.len() - 1 {
        let (s, s1) = (traj.totals[t], traj.totals[t + 1]);
        if s1 / s < 3f64.sqrt() / 2.0 - 1e-12 {
            v[2] += 1;
        }
        if interval_index(s1)?.level > interval_index(s)?.level + 1 {
            v[3] += 1;
        }
    }
    Ok(v)
}

fn warmup_laws() -> Result<Verdict> {
    let per_run: Vec<[usize; 4]> = (0..1000u64)
        .into_par_iter()
        .map(|r| warmup_run(derive_seed(SEED ^ 0x5, r)))
        .collect::<Result<_>>()?;
    let v: [usize; 4] = std::array::from_fn(|k| per_run.iter().map(|r| r[k]).sum());
    verdict(
        v.iter().all(|&c| c == 0),
        format!("1000 runs; absorbing/floor/ratio/interval violations {v:?}"),
    )
}

fn hessian_numerics() -> Result<Verdict> {
    let mut rng = run_rng(SEED ^ 0x6);
    let (mut grad_err, mut eig_err): (f64, f64) = (0.0, 0.0);
    // f is a cubic, so central differences carry no truncation error in the
    // second derivatives and an O(h^2) one in the first.
    let (hg, hh) = (1e-4, 1e-3);
    for &n in &[2usize, 3, 5, 10] {
        for _ in 0..1000 {
            let sigma = rng.random_range(0.05..2.0);
            let x = shaped_profile(&mut rng, n, sigma);
            let base = x.outputs().to_vec();
            let at = |d: &[(usize, f64)]| {
                let mut v = base.clone();
                for &(i, h) in d {
                    v[i] += h;
                }
                potential_of(&v)
            };
            let g = potential_gradient(&x);
            for (i, gi) in g.iter().enumerate() {
                let fd = (at(&[(i, hg)]) - at(&[(i, -hg)])) / (2.0 * hg);
                grad_err = grad_err.max((fd - gi).abs());
            }
            let hess = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    (at(&[(i, hh)]) - 2.0 * at(&[]) + at(&[(i, -hh)])) / (hh * hh)
                } else {
                    (at(&[(i, hh), (j, hh)]) - at(&[(i, hh), (j, -hh)]) - at(&[(i, -hh), (j, hh)])
                        + at(&[(i, -hh), (j, -hh)]))
                        / (4.0 * hh * hh)
                }
            });
            let mut numeric: Vec<f64> = SymmetricEigen::new(hess)
                .eigenvalues
                .iter()
                .copied()
                .collect();
            numeric.sort_by(f64::total_cmp);
            let analytic = potential_hessian_eigs(n, x.total())?.sorted();
            for (a, b) in numeric.iter().zip(&analytic) {
                eig_err = eig_err.max((a - b).abs());
            }
        }
    }
    verdict(
        grad_err <= 1e-6 && eig_err <= 1e-6,
        format!("max gradient error {grad_err:.2e}, max eigenvalue error {eig_err:.2e}"),
    )
}

fn markov_lemma() -> Result<Verdict> {
    let oracle = |p: f64, k: u64, m: u64, delta: f64| {
        let drift = 1.0 - 2.0 * p;
        (4.0 / drift * ((m + k) as f64).max((1.0 / delta).ln() / drift)).ceil() as u64
    };
    let example_ok = lemma_visit_bound(0.3, 5, 10, 0.1)? == 150;
    let mut cells = Vec::new();
    for p in [0.1, 0.2, 0.3, 0.4] {
        for k in [1u64, 5, 20] {
            for m in [1u64, 10, 50] {
                for delta in [0.05, 0.1] {
                    cells.push((p, k, m, delta));
                }
            }
        }
    }
    let results: Vec<(f64, f64, bool)> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, &(p, k, m, delta))| {
            let horizon = lemma_visit_bound(p, k, m, delta)?;
            let mut rng = run_rng(derive_seed(SEED ^ 0x7, idx as u64));
            let frac =
                empirical_visit_success(&WalkConfig::new(p, k)?, m, horizon, 10_000, &mut rng)?;
            Ok((frac, 1.0 - delta, horizon == oracle(p, k, m, delta)))
        })
        .collect::<Result<_>>()?;
    let worst = results
        .iter()
        .map(|r| r.0 - r.1)
        .fold(f64::INFINITY, f64::min);
    let horizons_ok = results.iter().all(|r| r.2);
    verdict(
        example_ok && horizons_ok && worst >= 0.0,
        format!(
            "{} cells x 1e4 trials; min(success - (1 - delta)) = {worst:.4}; horizon(0.3,5,10,0.1) = {}",
            cells.len(),
            lemma_visit_bound(0.3, 5, 10, 0.1)?
        ),
    )
}

fn coverage_times() -> Result<Verdict> {
    let n = 20;
    let cfg = ContestConfig::homogeneous_with(n, 1.0, 1e-3)?;
    let x = ActionProfile::zeros(n);
    let cut = n as f64 * (n as f64).ln() + 3.0 * n as f64;
    let mut rng = run_rng(SEED ^ 0x8);
    let reps = 10_000;
    let mut late = 0usize;
    for _ in 0..reps {
        let mut trace = Vec::new();
        let tau = loop {
            let t = trace.len() as u64;
            let i = select_mover(
                &SelectionPolicy::Uniform,
                &cfg,
                &x,
                t,
                trace.last().copied(),
                &mut rng,
            )?
            .expect("uniform selection always picks an agent");
            trace.push(i);
            if let Some(last) = coverage_time(&trace, n) {
                // Zero-based index of the covering move, so `last + 1` moves.
                break last + 1;
            }
        };
        late += usize::from(tau as f64 > cut);
    }
    let frac = late as f64 / reps as f64;
    let bound = (-3f64).exp() + 0.01;
    verdict(
        frac <= bound,
        format!(
            "P[coverage > n ln n + 3n] = {frac:.4} (bound {bound:.4}), n = {n}, {reps} replicates"
        ),
    )
}

fn lipschitz_bridge() -> Result<Verdict> {
    let mut rng = run_rng(SEED ^ 0x9);
    let samples = 100_000;
    let mut violations = 0usize;
    let mut worst: f64 = 0.0;
    let mut worst_at = (0usize, 0.0f64);
    for _ in 0..samples {
        let n = rng.random_range(3..=50);
        let nf = n as f64;
        let eps = rng.random_range(0.0..1.0) / (nf * nf.sqrt());
        if eps == 0.0 {
            continue;
        }
        let star = (nf - 1.0) / (nf * nf);
        let dir = unit_direction(&mut rng, n);
        let z = ActionProfile::new(dir.iter().map(|d| star + eps * d).collect())?;
        let cfg = ContestConfig::homogeneous_with(n, 1.0, 1e-3)?;
        let ratio = epsilon_gap(&cfg, &z)? / (3.0 * nf.sqrt() * eps);
        if ratio > 1.0 {
            violations += 1;
        }
        if ratio > worst {
            worst = ratio;
            worst_at = (n, eps * nf * nf.sqrt());
        }
    }
    verdict(
        violations == 0,
        format!(
            "{violations} of {samples} samples exceed 3 sqrt(n) eps; worst gap / (3 sqrt(n) eps) = {worst:.3} \
             at n = {}, eps = {:.2} / (n sqrt n)",
            worst_at.0, worst_at.1
        ),
    )
}

type Criterion = (u32, &'static str, Duration, fn() -> Result<Verdict>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            1,
            "two-agent convergence rate",
            Duration::from_secs(1),
            two_agent_rate,
        ),
        (
            2,
            "heterogeneous cycles",
            Duration::from_millis(100),
            heterogeneous_cycles,
        ),
        (
            3,
            "uniform-selection scaling",
            Duration::from_secs(30),
            uniform_scaling,
        ),
        (
            4,
            "potential suite",
            Duration::from_secs(60),
            potential_suite,
        ),
        (
            5,
            "warm-up and total-output laws",
            Duration::from_secs(30),
            warmup_laws,
        ),
        (
            6,
            "Hessian and gradient numerics",
            Duration::from_secs(10),
            hessian_numerics,
        ),
        (7, "walk visit bound", Duration::from_secs(20), markov_lemma),
        (8, "coverage times", Duration::from_secs(10), coverage_times),
        (
            9,
            "Lipschitz bridge",
            Duration::from_secs(20),
            lipschitz_bridge,
        ),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(v) => (v.passed && elapsed <= limit, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!passed);
        println!(
            "{} criterion {id} {name}: {detail} [{:.3} s, limit {} s]",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
