//! Scenario execution: data generation, shared-stream runs, Monte Carlo
//! sweeps, and boxplot aggregation.
//!
//! One run draws a single bit stream (data substream) and a single
//! randomizer stream (theta substream); every requested process sees the
//! same bits, and all conformal processes see the same p-values. Runs in a
//! sweep are keyed by run index, so they are order-independent and safe to
//! execute in parallel.

use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::benchmarks::BenchmarkState;
use crate::betting::{BkEngine, SimpleJumperEngine, SimplifiedBkEngine};
use crate::conformal::{p_value_stream, PValue};
use crate::eprocess::EProcessState;
use crate::params::{DataLaw, MarkovParams, Scenario};
use crate::rng::{RandomSource, PURPOSE_DATA, PURPOSE_THETA};

#[derive(Debug, Error, PartialEq)]
pub enum RunError {
    #[error("unknown process: {0:?}")]
    UnknownProcess(String),
    #[error("boxplot statistics need at least 5 samples, got {0}")]
    TooFewSamples(usize),
    #[error("the Bayes-Kelly betting function vanished at step {0}")]
    ZeroNormalizer(usize),
}

/// One capital process to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessId {
    /// Upper benchmark: Markov alternative vs Ber(0.5).
    Ub,
    /// Lower benchmark: Markov alternative vs the MLE Bernoulli fit.
    Lb,
    /// Bayes-Kelly conformal test martingale.
    Bk,
    /// Simplified Bayes-Kelly conformal test martingale.
    Sbk,
    /// Simple Jumper with a given jumping rate.
    Sj { jump_rate: f64 },
    /// Safe e-process.
    R,
}

impl ProcessId {
    pub fn label(&self) -> String {
        match self {
            ProcessId::Ub => "ub".into(),
            ProcessId::Lb => "lb".into(),
            ProcessId::Bk => "bk".into(),
            ProcessId::Sbk => "sbk".into(),
            ProcessId::Sj { jump_rate } => format!("sj{jump_rate}"),
            ProcessId::R => "r".into(),
        }
    }

    pub fn uses_p_values(&self) -> bool {
        matches!(self, ProcessId::Bk | ProcessId::Sbk | ProcessId::Sj { .. })
    }
}

impl FromStr for ProcessId {
    type Err = RunError;

    /// Parses "ub", "lb", "bk", "sbk", "r", and "sj" / "sj=RATE".
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ub" => Ok(ProcessId::Ub),
            "lb" => Ok(ProcessId::Lb),
            "bk" => Ok(ProcessId::Bk),
            "sbk" => Ok(ProcessId::Sbk),
            "r" => Ok(ProcessId::R),
            "sj" => Ok(ProcessId::Sj { jump_rate: 0.01 }),
            other => {
                if let Some(rate) = other.strip_prefix("sj=") {
                    let jump_rate: f64 = rate
                        .parse()
                        .map_err(|_| RunError::UnknownProcess(other.to_string()))?;
                    if (0.0..=1.0).contains(&jump_rate) {
                        return Ok(ProcessId::Sj { jump_rate });
                    }
                }
                Err(RunError::UnknownProcess(other.to_string()))
            }
        }
    }
}

/// Per-step log10 capital of one process over one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub process: String,
    /// values[i] is log10 of the process after step i+1; step 0 is 0.
    pub values: Vec<f64>,
}

/// Markov chain sample: first bit Bernoulli(0.5), then the transition law.
/// Consumes exactly one variate per bit.
pub fn generate_markov(params: &MarkovParams, n: usize, rng: &mut RandomSource) -> Vec<bool> {
    let mut bits = Vec::with_capacity(n);
    let mut prev: Option<bool> = None;
    for _ in 0..n {
        let p1 = match prev {
            None => MarkovParams::FIRST_PROB_ONE,
            Some(b) => params.pi_1_given(b),
        };
        let z = rng.bernoulli(p1);
        bits.push(z);
        prev = Some(z);
    }
    bits
}

/// n i.i.d. Bernoulli(pi) bits.
pub fn generate_bernoulli(pi: f64, n: usize, rng: &mut RandomSource) -> Vec<bool> {
    assert!((0.0..=1.0).contains(&pi));
    (0..n).map(|_| rng.bernoulli(pi)).collect()
}

fn generate_data(scenario: &Scenario, rng: &mut RandomSource) -> Vec<bool> {
    match scenario.data_law {
        DataLaw::Markov(params) => generate_markov(&params, scenario.n_steps, rng),
        DataLaw::Bernoulli(pi) => generate_bernoulli(pi, scenario.n_steps, rng),
    }
}

enum Engine {
    Ub(BenchmarkState, f64),
    Lb(BenchmarkState),
    Bk(BkEngine),
    Sbk(SimplifiedBkEngine),
    Sj(SimpleJumperEngine),
    R(EProcessState, f64),
}

impl Engine {
    fn new(id: &ProcessId) -> Self {
        match id {
            ProcessId::Ub => Engine::Ub(BenchmarkState::new(), 0.0),
            ProcessId::Lb => Engine::Lb(BenchmarkState::new()),
            ProcessId::Bk => Engine::Bk(BkEngine::new()),
            ProcessId::Sbk => Engine::Sbk(SimplifiedBkEngine::new()),
            ProcessId::Sj { jump_rate } => Engine::Sj(SimpleJumperEngine::new(*jump_rate)),
            ProcessId::R => Engine::R(EProcessState::new(), 0.0),
        }
    }

    fn step(&mut self, params: &MarkovParams, z: bool, p: Option<PValue>) -> Result<f64, RunError> {
        match self {
            Engine::Ub(state, log10) => {
                let (next, inc) = state.ub_step(params, z);
                *state = next;
                *log10 += inc;
                Ok(*log10)
            }
            Engine::Lb(state) => {
                let (next, _) = state.ub_step(params, z);
                *state = next;
                Ok(state.lb_value(params).log10())
            }
            Engine::Bk(engine) => {
                engine
                    .step(params, p.expect("bk needs p-values"))
                    .map_err(|e| RunError::ZeroNormalizer(e.step))?;
                Ok(engine.capital().log10())
            }
            Engine::Sbk(engine) => {
                engine.step(params, p.expect("sbk needs p-values"));
                Ok(engine.capital().log10())
            }
            Engine::Sj(engine) => {
                engine.step(p.expect("sj needs p-values"));
                Ok(engine.capital().log10())
            }
            Engine::R(state, log10) => {
                let (next, value) = state.r_step(z);
                *state = next;
                *log10 = value;
                Ok(*log10)
            }
        }
    }
}

fn run_one(
    scenario: &Scenario,
    run_index: u64,
    processes: &[ProcessId],
) -> Result<Vec<Trajectory>, RunError> {
    let root = RandomSource::new(scenario.seed);
    let bits = generate_data(scenario, &mut root.substream(run_index, PURPOSE_DATA));
    let p_values = if processes.iter().any(ProcessId::uses_p_values) {
        Some(p_value_stream(
            &bits,
            &mut root.substream(run_index, PURPOSE_THETA),
        ))
    } else {
        None
    };

    let mut engines: Vec<Engine> = processes.iter().map(Engine::new).collect();
    let mut trajectories: Vec<Trajectory> = processes
        .iter()
        .map(|id| Trajectory {
            process: id.label(),
            values: Vec::with_capacity(scenario.n_steps),
        })
        .collect();

    for (i, &z) in bits.iter().enumerate() {
        let p = p_values.as_ref().map(|ps| ps[i]);
        for (engine, traj) in engines.iter_mut().zip(&mut trajectories) {
            traj.values.push(engine.step(&scenario.case, z, p)?);
        }
    }
    Ok(trajectories)
}

/// Run every requested process on one shared data stream (run index 0).
pub fn run_single(
    scenario: &Scenario,
    processes: &[ProcessId],
) -> Result<Vec<Trajectory>, RunError> {
    run_one(scenario, 0, processes)
}

/// Final log10 values per process over a Monte Carlo sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFinals {
    pub process: String,
    /// finals[i] is the final log10 value of run i.
    pub finals: Vec<f64>,
}

/// Run `n_runs` independent runs of the scenario (in parallel) and collect
/// final log10 values per process, ordered by run index.
pub fn run_many(
    scenario: &Scenario,
    n_runs: usize,
    processes: &[ProcessId],
) -> Result<Vec<SweepFinals>, RunError> {
    assert!(n_runs >= 1);
    let per_run: Vec<Vec<f64>> = (0..n_runs as u64)
        .into_par_iter()
        .map(|run_index| {
            let trajectories = run_one(scenario, run_index, processes)?;
            Ok(trajectories
                .iter()
                .map(|t| *t.values.last().expect("n_steps >= 1"))
                .collect())
        })
        .collect::<Result<_, RunError>>()?;

    Ok(processes
        .iter()
        .enumerate()
        .map(|(j, id)| SweepFinals {
            process: id.label(),
            finals: per_run.iter().map(|run| run[j]).collect(),
        })
        .collect())
}

/// Five-number summary with median notches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxplotStats {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub notch_low: f64,
    pub notch_high: f64,
    pub n_samples: usize,
}

/// Quantile by linear interpolation on the sorted sample.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Notched boxplot statistics: quartiles by linear interpolation, whiskers
/// at the most extreme samples within 1.5 IQR of the box, and the notch at
/// median +- 1.57 IQR / sqrt(n).
pub fn boxplot_stats(samples: &[f64]) -> Result<BoxplotStats, RunError> {
    if samples.len() < 5 {
        return Err(RunError::TooFewSamples(samples.len()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q1 = quantile(&sorted, 0.25);
    let median = quantile(&sorted, 0.5);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let fence_low = q1 - 1.5 * iqr;
    let fence_high = q3 + 1.5 * iqr;
    let whisker_low = *sorted.iter().find(|&&x| x >= fence_low).unwrap();
    let whisker_high = *sorted.iter().rev().find(|&&x| x <= fence_high).unwrap();
    let half_notch = 1.57 * iqr / (sorted.len() as f64).sqrt();
    Ok(BoxplotStats {
        median,
        q1,
        q3,
        whisker_low,
        whisker_high,
        notch_low: median - half_notch,
        notch_high: median + half_notch,
        n_samples: sorted.len(),
    })
}
