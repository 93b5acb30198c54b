//! Randomized conformal p-values for binary observations.
//!
//! Nonconformity is the identity map on bits, so the p-value at step n
//! depends only on the running count of 1s. With `k` ones among the first
//! `n` observations, the randomized p-value is
//!
//! ```text
//!     p = theta * k/n              if z_n = 1
//!     p = (k + theta * (n-k)) / n  if z_n = 0
//! ```
//!
//! which realizes the conditional law p ~ U[0, k/n] when z_n = 1 and
//! p ~ U[k/n, 1] when z_n = 0. Under any exchangeable law the p-values are
//! i.i.d. uniform on (0, 1).

use crate::rng::RandomSource;

/// A randomized conformal p-value, strictly inside the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PValue(f64);

impl PValue {
    pub fn new(value: f64) -> Self {
        assert!(
            value > 0.0 && value < 1.0,
            "p-value {value} outside the open unit interval"
        );
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Counts sufficient for the identity-score conformal transducer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConformalState {
    /// Observations seen so far.
    pub n: u64,
    /// Ones among them.
    pub k: u64,
}

impl ConformalState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Consume one bit and one randomizer variate, producing the next p-value.
    pub fn next_p_value(self, z: bool, theta: f64) -> (PValue, ConformalState) {
        debug_assert!(theta > 0.0 && theta < 1.0);
        let n = self.n + 1;
        let k = self.k + u64::from(z);
        let (nf, kf) = (n as f64, k as f64);
        let p = if z {
            theta * kf / nf
        } else {
            (kf + theta * (nf - kf)) / nf
        };
        (PValue::new(p), ConformalState { n, k })
    }
}

/// Fold the transducer over a bit sequence, one fresh theta per step.
pub fn p_value_stream(observations: &[bool], rng: &mut RandomSource) -> Vec<PValue> {
    let mut state = ConformalState::new();
    observations
        .iter()
        .map(|&z| {
            let (p, next) = state.next_p_value(z, rng.next_open01());
            state = next;
            p
        })
        .collect()
}
