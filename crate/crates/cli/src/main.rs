//! Command-line surface for the exchangeability-testing experiments.
//!
//! Three subcommands mirror the experiment shapes:
//!
//! - `simulate`: one run of a scenario, trajectory CSV (+ optional SVG).
//! - `sweep`: many independent runs, finals CSV + notched-boxplot stats CSV
//!   (+ optional SVG).
//! - `weights`: the Bayes-Kelly posterior weight snapshot over k.
//!
//! Every command is a pure function of its flags: identical invocations
//! produce byte-identical output files. Exit codes: 0 success, 2 usage
//! error, 1 runtime error.

mod render;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use exchtest_core::betting::BkEngine;
use exchtest_core::conformal::p_value_stream;
use exchtest_core::experiments::{
    boxplot_stats, generate_bernoulli, generate_markov, run_many, run_single, BoxplotStats,
    ProcessId, Trajectory,
};
use exchtest_core::params::{case_preset, DataLaw, MarkovParams, Scenario, ScenarioSize};
use exchtest_core::rng::{RandomSource, PURPOSE_DATA, PURPOSE_THETA};

#[derive(Parser)]
#[command(name = "exchtest", version, about = "Test exchangeability of a binary stream against Markov alternatives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One run: per-step log10 trajectories of the selected processes.
    Simulate(SimulateArgs),
    /// Monte Carlo sweep: final log10 values and boxplot statistics.
    Sweep(SweepArgs),
    /// Bayes-Kelly posterior weights over k at a given step.
    Weights(WeightsArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Markov alternative: "hard", "easy", or "pi10=..,pi11=.."
    #[arg(long, default_value = "hard", value_parser = parse_case)]
    case: MarkovParams,

    /// Stream length: "small", "medium", "large", or "n=.."
    #[arg(long, default_value = "medium", value_parser = parse_scenario)]
    scenario: usize,

    /// Root seed for data and randomizer substreams.
    #[arg(long, default_value_t = 2021)]
    seed: u64,

    /// Draw data from a Bernoulli null instead of the alternative: "pi=FLOAT"
    #[arg(long, value_parser = parse_null)]
    null: Option<f64>,
}

/// Failures after flag parsing. Usage errors exit 2, runtime errors exit 1.
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CommonArgs {
    fn scenario(&self) -> Result<Scenario, CliError> {
        let s = Scenario::under_alternative(self.scenario, self.case, self.seed);
        match self.null {
            None => Ok(s),
            Some(pi) => s.under_null(pi).map_err(|e| CliError::Usage(e.to_string())),
        }
    }
}

#[derive(Args)]
struct ProcessArgs {
    /// Comma-separated processes: ub, lb, bk, sbk, sj, r.
    #[arg(long, default_value = "ub,lb,bk,sbk")]
    processes: String,

    /// Jumping rates used when "sj" is requested.
    #[arg(long, default_value = "0.0001,0.001,0.01,0.1")]
    sj_jump: String,
}

impl ProcessArgs {
    fn resolve(&self) -> Result<Vec<ProcessId>, CliError> {
        let rates: Vec<f64> = self
            .sj_jump
            .split(',')
            .map(|r| {
                r.trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad jumping rate: {r:?}")))
            })
            .collect::<Result<_, _>>()?;
        let mut processes = Vec::new();
        for token in self.processes.split(',') {
            let token = token.trim();
            if token == "sj" {
                // One trajectory per configured jumping rate.
                processes.extend(rates.iter().map(|&jump_rate| ProcessId::Sj { jump_rate }));
            } else {
                processes.push(
                    token
                        .parse::<ProcessId>()
                        .map_err(|e| CliError::Usage(e.to_string()))?,
                );
            }
        }
        Ok(processes)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    procs: ProcessArgs,

    /// Trajectory CSV output path.
    #[arg(long, default_value = "trajectories.csv")]
    out: PathBuf,

    /// Optional SVG line chart.
    #[arg(long)]
    svg: Option<PathBuf>,

    /// Restrict output to the last WINDOW steps.
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    procs: ProcessArgs,

    /// Number of independent runs.
    #[arg(long, default_value_t = 1000)]
    runs: usize,

    /// Finals CSV output path (one row per process and run).
    #[arg(long, default_value = "finals.csv")]
    out: PathBuf,

    /// Boxplot statistics CSV output path.
    #[arg(long, default_value = "boxplot_stats.csv")]
    stats_out: PathBuf,

    /// Optional SVG boxplot.
    #[arg(long)]
    svg: Option<PathBuf>,

    /// Worker threads for the sweep (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct WeightsArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Snapshot step (default: the scenario's last step).
    #[arg(long)]
    step: Option<usize>,

    /// Weight CSV output path.
    #[arg(long, default_value = "weights.csv")]
    out: PathBuf,
}

fn parse_case(s: &str) -> Result<MarkovParams, String> {
    if let Ok(p) = case_preset(s) {
        return Ok(p);
    }
    let mut pi10 = None;
    let mut pi11 = None;
    for part in s.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("bad case: {s:?} (expected hard, easy, or pi10=..,pi11=..)"))?;
        let value: f64 = value.parse().map_err(|_| format!("bad probability: {value:?}"))?;
        match key.trim() {
            "pi10" => pi10 = Some(value),
            "pi11" => pi11 = Some(value),
            other => return Err(format!("unknown case field: {other:?}")),
        }
    }
    match (pi10, pi11) {
        (Some(a), Some(b)) => MarkovParams::new(a, b).map_err(|e| e.to_string()),
        _ => Err(format!("case {s:?} must set both pi10 and pi11")),
    }
}

fn parse_scenario(s: &str) -> Result<usize, String> {
    if let Ok(size) = s.parse::<ScenarioSize>() {
        return Ok(size.n_steps());
    }
    let n: usize = s
        .strip_prefix("n=")
        .ok_or_else(|| format!("bad scenario: {s:?} (expected small, medium, large, or n=..)"))?
        .parse()
        .map_err(|_| format!("bad scenario length in {s:?}"))?;
    if n == 0 {
        return Err("scenario length must be at least 1".into());
    }
    Ok(n)
}

fn parse_null(s: &str) -> Result<f64, String> {
    let pi: f64 = s
        .strip_prefix("pi=")
        .ok_or_else(|| format!("bad null: {s:?} (expected pi=FLOAT)"))?
        .parse()
        .map_err(|_| format!("bad null probability in {s:?}"))?;
    if !(0.0..=1.0).contains(&pi) {
        return Err(format!("null probability {pi} outside [0, 1]"));
    }
    Ok(pi)
}

/// 9 significant digits, locale-independent.
fn fmt9(x: f64) -> String {
    format!("{x:.8e}")
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn trajectory_csv(trajectories: &[Trajectory], first_step: usize) -> String {
    let mut out = String::from("step");
    for t in trajectories {
        let _ = write!(out, ",{}", t.process);
    }
    out.push('\n');
    let n = trajectories.first().map_or(0, |t| t.values.len());
    for i in 0..n {
        let _ = write!(out, "{}", first_step + i);
        for t in trajectories {
            let _ = write!(out, ",{}", fmt9(t.values[i]));
        }
        out.push('\n');
    }
    out
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let scenario = args.common.scenario()?;
    let processes = args.procs.resolve()?;
    let mut trajectories =
        run_single(&scenario, &processes).map_err(|e| CliError::Runtime(e.to_string()))?;

    let window = args.window.unwrap_or(scenario.n_steps).min(scenario.n_steps).max(1);
    let first_step = scenario.n_steps - window + 1;
    for t in &mut trajectories {
        t.values.drain(..scenario.n_steps - window);
    }

    write_file(&args.out, &trajectory_csv(&trajectories, first_step))?;
    if let Some(svg) = &args.svg {
        write_file(svg, &render::trajectory_svg(&trajectories, first_step))?;
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let scenario = args.common.scenario()?;
    let processes = args.procs.resolve()?;

    let sweep = || run_many(&scenario, args.runs, &processes);
    let finals = match args.threads {
        None => sweep(),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Runtime(e.to_string()))?
            .install(sweep),
    }
    .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut finals_csv = String::from("process,run,final_log10\n");
    for f in &finals {
        for (run, value) in f.finals.iter().enumerate() {
            let _ = writeln!(finals_csv, "{},{run},{}", f.process, fmt9(*value));
        }
    }
    write_file(&args.out, &finals_csv)?;

    let stats: Vec<(String, BoxplotStats)> = finals
        .iter()
        .map(|f| {
            let stats = boxplot_stats(&f.finals).map_err(|e| CliError::Runtime(e.to_string()))?;
            Ok((f.process.clone(), stats))
        })
        .collect::<Result<_, CliError>>()?;
    let mut stats_csv = String::from(
        "process,n_samples,median,q1,q3,whisker_low,whisker_high,notch_low,notch_high\n",
    );
    for (label, s) in &stats {
        let _ = writeln!(
            stats_csv,
            "{label},{},{},{},{},{},{},{},{}",
            s.n_samples,
            fmt9(s.median),
            fmt9(s.q1),
            fmt9(s.q3),
            fmt9(s.whisker_low),
            fmt9(s.whisker_high),
            fmt9(s.notch_low),
            fmt9(s.notch_high),
        );
    }
    write_file(&args.stats_out, &stats_csv)?;

    if let Some(svg) = &args.svg {
        write_file(svg, &render::boxplot_svg(&stats))?;
    }
    Ok(())
}

fn cmd_weights(args: &WeightsArgs) -> Result<(), CliError> {
    let scenario = args.common.scenario()?;
    let step = args.step.unwrap_or(scenario.n_steps);
    if step < 1 || step > scenario.n_steps {
        return Err(CliError::Usage(format!(
            "step {step} outside 1..={} for this scenario",
            scenario.n_steps
        )));
    }

    let root = RandomSource::new(scenario.seed);
    let bits = match scenario.data_law {
        DataLaw::Markov(params) => {
            generate_markov(&params, scenario.n_steps, &mut root.substream(0, PURPOSE_DATA))
        }
        DataLaw::Bernoulli(pi) => {
            generate_bernoulli(pi, scenario.n_steps, &mut root.substream(0, PURPOSE_DATA))
        }
    };
    let p_values = p_value_stream(&bits, &mut root.substream(0, PURPOSE_THETA));

    let mut engine = BkEngine::new();
    for p in p_values.iter().take(step) {
        engine
            .step(&scenario.case, *p)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }

    let mut out = String::from("k,weight\n");
    for (k, w) in engine.weights().marginal_over_k().iter().enumerate() {
        let _ = writeln!(out, "{k},{}", fmt9(*w));
    }
    write_file(&args.out, &out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Weights(args) => cmd_weights(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
