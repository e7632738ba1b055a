//! `tullock`: run best-response dynamics, parameter sweeps, invariant
//! checks and cycle searches from the command line.
//!
//! Exit codes: 0 success, 1 a check or validation failed, 2 usage error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tullock_dynamics::contest::{epsilon_gap, ActionProfile, ContestConfig};
use tullock_dynamics::dynamics::{run, CustomWeights, DynamicsParams, Outcome, SelectionPolicy};
use tullock_dynamics::experiment::{
    cycle_search, emit_csv, emit_plot_data, emit_svg, run_experiment, AxisTransform, ExperimentSpec,
};
use tullock_dynamics::verify::run_all;
use tullock_dynamics::Error;

#[derive(Parser)]
#[command(
    name = "tullock",
    version,
    about = "Best-response dynamics in lottery contests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the dynamics once and print a summary.
    Simulate(SimulateArgs),
    /// Run a parameter sweep described by a TOML file.
    Experiment(ExperimentArgs),
    /// Run the invariant suites and print a pass/fail table.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Search floor actions that make two heterogeneous agents cycle.
    Cycle(CycleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    /// Two agents alternating (the default for n = 2).
    Alt,
    Unif,
    Round,
    Lex,
    Worst,
    Best,
    /// Uniform over everyone but the previous mover.
    Custom,
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// Number of agents; inferred from --costs or --x0 when omitted.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated costs (default: all 1).
    #[arg(long, value_delimiter = ',')]
    costs: Vec<f64>,
    /// Floor action played against an all-zero field.
    #[arg(long, default_value_t = 1e-5)]
    a: f64,
    /// Comma-separated initial outputs (default: a, 0, ..., 0).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Vec<f64>,
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    #[arg(long, default_value_t = 1e-10)]
    eps: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// First mover under alternation.
    #[arg(long, default_value_t = 0)]
    first: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Both,
}

#[derive(clap::Args)]
struct ExperimentArgs {
    /// TOML sweep description; defaults apply to omitted keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for results.csv / plot.svg; CSV goes to stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Overrides the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// X axis of the SVG plot.
    #[arg(long, default_value = "log_inv_eps")]
    axis: String,
}

#[derive(clap::Args)]
struct CycleArgs {
    /// Cost of agent 1 (agent 0 has cost 1).
    #[arg(long, default_value_t = 0.01)]
    c2: f64,
    /// Log-spaced range `lo:hi` of floor actions.
    #[arg(long, default_value = "1e-12:1e-1")]
    a_grid: String,
    #[arg(long, default_value_t = 200)]
    points: usize,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Check(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Experiment(args) => experiment(args),
        Command::Verify { seed } => verify(seed),
        Command::Cycle(args) => cycle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let n = args
        .n
        .or((!args.costs.is_empty()).then_some(args.costs.len()))
        .or((!args.x0.is_empty()).then_some(args.x0.len()))
        .unwrap_or(2);
    let costs = if args.costs.is_empty() {
        vec![1.0; n]
    } else {
        args.costs
    };
    let x0 = if args.x0.is_empty() {
        ActionProfile::single(n, args.a)?
    } else {
        ActionProfile::new(args.x0)?
    };
    if costs.len() != n || x0.len() != n {
        return Err(Failure::Usage(format!(
            "--n {n}, {} costs and {} initial outputs disagree",
            costs.len(),
            x0.len()
        )));
    }
    let cfg = ContestConfig::new(costs, args.a)?;
    let default = if n == 2 {
        PolicyArg::Alt
    } else {
        PolicyArg::Unif
    };
    let policy = match args.policy.unwrap_or(default) {
        PolicyArg::Alt => SelectionPolicy::Alternating { first: args.first },
        PolicyArg::Unif => SelectionPolicy::Uniform,
        PolicyArg::Round => SelectionPolicy::RoundRobin,
        PolicyArg::Lex => SelectionPolicy::lexicographic(args.eps),
        PolicyArg::Worst => SelectionPolicy::myopic_worst(args.eps),
        PolicyArg::Best => SelectionPolicy::MyopicBest,
        PolicyArg::Custom => SelectionPolicy::WeightedCustom(CustomWeights::avoid_previous(n)?),
    };
    let params = DynamicsParams::new(args.eps, args.max_steps, args.seed)?;
    let traj = run(&cfg, &x0, &policy, &params)?;

    println!("policy      {}", policy.name());
    println!("agents      {n}");
    match traj.outcome {
        Outcome::Converged { steps } => println!("outcome     converged after {steps} steps"),
        Outcome::CycleDetected { start, period } => {
            println!("outcome     cycle detected: entry {start}, period {period}")
        }
        Outcome::Exhausted { steps, stalled } => println!(
            "outcome     exhausted after {steps} steps{}",
            if stalled { " (stalled)" } else { "" }
        ),
    }
    let last = traj.final_profile();
    println!("final x     {}", join(last.outputs()));
    println!("total       {}", last.total());
    println!("gap         {:e}", epsilon_gap(&cfg, last)?);
    match traj.warmup_end {
        Some(t) => println!("warm-up end {t}"),
        None if cfg.homogeneous() => println!("warm-up end not reached"),
        None => {}
    }
    for note in &traj.notes {
        println!("note        {note:?}");
    }
    if let Some(report) = &traj.cycle {
        println!("cycle states:");
        for (k, x) in report.cycle_states.iter().enumerate() {
            println!(
                "  t={:<4} {}",
                report.entry_time + k as u64,
                join(x.outputs())
            );
        }
    }
    Ok(())
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.5}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn experiment(args: ExperimentArgs) -> Result<(), Failure> {
    let mut spec = match &args.config {
        Some(path) => ExperimentSpec::from_path(path)?,
        None => ExperimentSpec::default(),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let axis: AxisTransform = args.axis.parse()?;
    let want_csv = args.format != Format::Svg;
    let want_svg = args.format != Format::Csv;
    if want_svg && args.out.is_none() {
        return Err(Failure::Usage("--format svg/both needs --out".into()));
    }
    let results = run_experiment(&spec)?;

    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            if want_csv {
                emit_csv(&results.rows, fs::File::create(dir.join("results.csv"))?)?;
            }
            if want_svg {
                let svg = emit_svg(&emit_plot_data(&results.rows, axis), axis);
                fs::write(dir.join("plot.svg"), svg)?;
            }
        }
        None => {
            emit_csv(&results.rows, std::io::stdout().lock())?;
        }
    }
    for f in &results.failures {
        eprintln!(
            "cell {} ({} n={} eps={} gamma={}) seed {}: {}",
            f.cell.index,
            f.cell.policy.name(),
            f.cell.n,
            f.cell.eps,
            f.cell.gamma,
            f.seed,
            f.message
        );
    }
    if results.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{} replicate(s) failed",
            results.failures.len()
        )))
    }
}

fn verify(seed: u64) -> Result<(), Failure> {
    let checks = run_all(seed)?;
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        println!(
            "{:<4} {:<10} {:<width$}  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.detail
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {} failed", checks.len(), failed);
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{failed} invariant check(s) failed"
        )))
    }
}

fn cycle(args: CycleArgs) -> Result<(), Failure> {
    let (lo, hi) = args
        .a_grid
        .split_once(':')
        .and_then(|(l, h)| Some((l.parse::<f64>().ok()?, h.parse::<f64>().ok()?)))
        .ok_or_else(|| Failure::Usage(format!("--a-grid expects lo:hi, got {:?}", args.a_grid)))?;
    let search = cycle_search(args.c2, lo, hi, args.points)?;
    println!("c = (1, {})", args.c2);
    println!("backward intervals (outputs that reach agent 1 >= 1):");
    for iv in &search.intervals {
        println!(
            "  depth {:>2}  agent {}  [{:.6e}, {:.6e}]",
            iv.depth, iv.agent, iv.lo, iv.hi
        );
    }
    let validated = search.hits.iter().filter(|h| h.validated()).count();
    println!(
        "{} of {} grid points yield a cycle ({} confirmed by forward simulation)",
        search.hits.len(),
        search.grid.len(),
        validated
    );
    let mut periods: Vec<u64> = search.hits.iter().map(|h| h.predicted_period).collect();
    periods.dedup();
    for p in periods {
        let hs: Vec<_> = search
            .hits
            .iter()
            .filter(|h| h.predicted_period == p)
            .collect();
        println!(
            "  period {:>2}: {} points, a in [{:.3e}, {:.3e}]",
            p,
            hs.len(),
            hs.first().map_or(0.0, |h| h.a),
            hs.last().map_or(0.0, |h| h.a)
        );
    }
    if search.all_validated() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{} predicted cycle(s) not reproduced",
            search.hits.len() - validated
        )))
    }
}
