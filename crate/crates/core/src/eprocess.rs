//! A safe e-process for the IID null against Markov alternatives.
//!
//! The numerator is a Jeffreys (Beta(1/2, 1/2)) mixture over the two Markov
//! transition probabilities, with the first bit at probability 0.5; the
//! denominator is the maximum-likelihood Bernoulli fit:
//!
//! ```text
//!     R_n = 0.5 * m(t01, t00) * m(t11, t10) / max_pi Ber(pi)(z_1..z_n)
//! ```
//!
//! where `m(a, b) = B(a + 1/2, b + 1/2) / B(1/2, 1/2)` is the mixture
//! marginal of a ones and b zeros, and `tij` counts i -> j transitions.
//! Since the denominator dominates every fixed-pi Bernoulli likelihood,
//! `R_n <= numerator / Ber(pi)(z_1..z_n)` for every pi, and the right-hand
//! side is a nonnegative martingale under Ber(pi) with initial value 1:
//! R is dominated by a test martingale under every Bernoulli null.

use statrs::function::gamma::ln_gamma;

const LN_10: f64 = core::f64::consts::LN_10;

/// log10 of the Jeffreys-mixture marginal of `a` ones and `b` zeros:
/// `B(a + 1/2, b + 1/2) / B(1/2, 1/2)`.
pub fn kt_log_marginal(a: u64, b: u64) -> f64 {
    if a == 0 && b == 0 {
        return 0.0;
    }
    let (af, bf) = (a as f64, b as f64);
    // B(a+1/2, b+1/2) / B(1/2, 1/2) = Gamma(a+1/2) Gamma(b+1/2) / (Gamma(a+b+1) pi)
    (ln_gamma(af + 0.5) + ln_gamma(bf + 0.5)
        - ln_gamma(af + bf + 1.0)
        - core::f64::consts::PI.ln())
        / LN_10
}

fn xlog10_ratio(x: u64, n: u64) -> f64 {
    if x == 0 {
        0.0
    } else {
        x as f64 * (x as f64 / n as f64).log10()
    }
}

/// Transition counts driving the e-process.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EProcessState {
    pub n: u64,
    pub k: u64,
    /// trans[from][to] transition counts.
    trans: [[u64; 2]; 2],
    last: Option<bool>,
}

impl EProcessState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn transitions(&self, from: bool, to: bool) -> u64 {
        self.trans[usize::from(from)][usize::from(to)]
    }

    /// Consume one bit; returns the new state and log10 R_n.
    pub fn r_step(self, z: bool) -> (EProcessState, f64) {
        let mut next = self;
        if let Some(prev) = self.last {
            next.trans[usize::from(prev)][usize::from(z)] += 1;
        }
        next.n += 1;
        next.k += u64::from(z);
        next.last = Some(z);
        let log10_r = next.log10_numerator() - next.log10_mle_denominator();
        (next, log10_r)
    }

    /// log10 of the mixture-Markov numerator.
    pub fn log10_numerator(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        0.5f64.log10()
            + kt_log_marginal(self.trans[0][1], self.trans[0][0])
            + kt_log_marginal(self.trans[1][1], self.trans[1][0])
    }

    /// log10 of the max-likelihood Bernoulli fit (k/n)^k ((n-k)/n)^(n-k).
    pub fn log10_mle_denominator(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        xlog10_ratio(self.k, self.n) + xlog10_ratio(self.n - self.k, self.n)
    }

    /// log10 of the fixed-pi Bernoulli likelihood, for dominance checks.
    pub fn log10_bernoulli_likelihood(&self, pi: f64) -> f64 {
        self.k as f64 * pi.log10() + (self.n - self.k) as f64 * (1.0 - pi).log10()
    }
}
