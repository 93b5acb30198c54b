//! Model situation parameters: Markov alternatives and scenario presets.

use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("transition probability {0} is outside the open interval (0, 1)")]
    DegenerateTransition(f64),
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("unknown case preset: {0:?}")]
    UnknownCase(String),
    #[error("unknown scenario preset: {0:?}")]
    UnknownScenario(String),
}

/// Transition probabilities of the binary Markov alternative.
///
/// The chain starts from 1 with probability 0.5. Degenerate transition
/// probabilities (0 or 1) are rejected at construction: they put zero density
/// on measure-positive p-value events and can bankrupt the martingale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovParams {
    pi_1_given_0: f64,
    pi_1_given_1: f64,
}

impl MarkovParams {
    /// Probability that the first observation is 1.
    pub const FIRST_PROB_ONE: f64 = 0.5;

    pub fn new(pi_1_given_0: f64, pi_1_given_1: f64) -> Result<Self, ParamError> {
        for p in [pi_1_given_0, pi_1_given_1] {
            if !(p > 0.0 && p < 1.0) {
                return Err(ParamError::DegenerateTransition(p));
            }
        }
        Ok(Self {
            pi_1_given_0,
            pi_1_given_1,
        })
    }

    /// The hard case: Markov(0.4, 0.6).
    pub fn hard() -> Self {
        Self::new(0.4, 0.6).unwrap()
    }

    /// The easy case: Markov(0.1, 0.9).
    pub fn easy() -> Self {
        Self::new(0.1, 0.9).unwrap()
    }

    pub fn pi_1_given_0(&self) -> f64 {
        self.pi_1_given_0
    }

    pub fn pi_1_given_1(&self) -> f64 {
        self.pi_1_given_1
    }

    pub fn pi_0_given_0(&self) -> f64 {
        1.0 - self.pi_1_given_0
    }

    pub fn pi_0_given_1(&self) -> f64 {
        1.0 - self.pi_1_given_1
    }

    /// P(next = 1 | previous bit).
    pub fn pi_1_given(&self, prev: bool) -> f64 {
        if prev {
            self.pi_1_given_1
        } else {
            self.pi_1_given_0
        }
    }

    /// P(next = `to` | previous = `from`).
    pub fn transition(&self, from: bool, to: bool) -> f64 {
        let p1 = self.pi_1_given(from);
        if to {
            p1
        } else {
            1.0 - p1
        }
    }
}

/// Law the observed bits are drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataLaw {
    /// The Markov alternative itself.
    Markov(MarkovParams),
    /// An exchangeable null: i.i.d. Bernoulli(pi).
    Bernoulli(f64),
}

/// Scenario sizes from the experiments: large 10^4, medium 10^3, small 10^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioSize {
    Large,
    Medium,
    Small,
}

impl ScenarioSize {
    pub fn n_steps(self) -> usize {
        match self {
            ScenarioSize::Large => 10_000,
            ScenarioSize::Medium => 1_000,
            ScenarioSize::Small => 100,
        }
    }
}

impl FromStr for ScenarioSize {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "large" => Ok(ScenarioSize::Large),
            "medium" => Ok(ScenarioSize::Medium),
            "small" => Ok(ScenarioSize::Small),
            other => Err(ParamError::UnknownScenario(other.to_string())),
        }
    }
}

/// Parse a case preset name ("hard" or "easy").
pub fn case_preset(name: &str) -> Result<MarkovParams, ParamError> {
    match name {
        "hard" => Ok(MarkovParams::hard()),
        "easy" => Ok(MarkovParams::easy()),
        other => Err(ParamError::UnknownCase(other.to_string())),
    }
}

/// One fully specified experiment: stream length, alternative, data law, seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    /// Number of observations.
    pub n_steps: usize,
    /// The Markov alternative the adapted processes bet on.
    pub case: MarkovParams,
    /// Law of the generated data (the alternative itself, or a Bernoulli null).
    pub data_law: DataLaw,
    /// Root seed; all substreams derive from it.
    pub seed: u64,
}

impl Scenario {
    /// Scenario with data drawn from the alternative itself.
    pub fn under_alternative(n_steps: usize, case: MarkovParams, seed: u64) -> Self {
        assert!(n_steps >= 1, "scenario needs at least one step");
        Self {
            n_steps,
            case,
            data_law: DataLaw::Markov(case),
            seed,
        }
    }

    /// Same alternative, but data drawn from Bernoulli(pi).
    pub fn under_null(self, pi: f64) -> Result<Self, ParamError> {
        if !(0.0..=1.0).contains(&pi) {
            return Err(ParamError::InvalidProbability(pi));
        }
        Ok(Self {
            data_law: DataLaw::Bernoulli(pi),
            ..self
        })
    }
}
