//! Likelihood-ratio benchmarks bracketing the achievable evidence.
//!
//! Both are computed online from the raw bit stream:
//!
//! ```text
//!     UB_n = Markov(pi_1|0, pi_1|1)(z_1..z_n) / Ber(0.5)(z_1..z_n)
//!     LB_n = Markov(pi_1|0, pi_1|1)(z_1..z_n) / Ber(pi_hat)(z_1..z_n)
//! ```
//!
//! with `pi_hat = k/n` the maximum-likelihood Bernoulli fit. UB is
//! multiplicative and accumulated incrementally; LB's denominator changes
//! with every observation, so it is re-evaluated from the sufficient
//! statistics (k, n) in closed form each step. UB_0 = LB_0 = 1, and
//! LB_n <= UB_n always since the MLE denominator dominates Ber(0.5).

use crate::logspace::LogCapital;
use crate::params::MarkovParams;

const LOG10_HALF: f64 = -core::f64::consts::LOG10_2;

/// x log10(x/n) with the 0 log 0 := 0 convention.
fn xlog10_ratio(x: u64, n: u64) -> f64 {
    if x == 0 {
        0.0
    } else {
        x as f64 * (x as f64 / n as f64).log10()
    }
}

/// Sufficient statistics for both benchmarks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BenchmarkState {
    pub n: u64,
    pub k: u64,
    last: Option<bool>,
    log10_markov: f64,
}

impl BenchmarkState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Consume one bit; returns the new state and the UB log10 increment.
    pub fn ub_step(self, params: &MarkovParams, z: bool) -> (BenchmarkState, f64) {
        let prob = match self.last {
            None => MarkovParams::FIRST_PROB_ONE, // symmetric first bit
            Some(prev) => params.transition(prev, z),
        };
        let log10_prob = prob.log10();
        let state = BenchmarkState {
            n: self.n + 1,
            k: self.k + u64::from(z),
            last: Some(z),
            log10_markov: self.log10_markov + log10_prob,
        };
        (state, log10_prob - LOG10_HALF)
    }

    /// log10 UB_n from the running Markov log-likelihood.
    pub fn ub_log10(&self) -> f64 {
        self.log10_markov - self.n as f64 * LOG10_HALF
    }

    /// log10 LB_n, re-derived from (k, n) because pi_hat moves every step.
    pub fn lb_value(&self, _params: &MarkovParams) -> LogCapital {
        if self.n == 0 {
            return LogCapital::UNIT;
        }
        let denom = xlog10_ratio(self.k, self.n) + xlog10_ratio(self.n - self.k, self.n);
        LogCapital::from_log10(self.log10_markov - denom)
    }

    pub fn log10_markov(&self) -> f64 {
        self.log10_markov
    }
}
