//! Log-space capital tracking.
//!
//! Every capital process in this crate (benchmarks, conformal martingales,
//! the safe e-process) is tracked as a base-10 logarithm. Final values in the
//! easy/large regime reach ~10^1600, far outside `f64` range in linear scale,
//! so linear capital is never materialized for long runs.

/// Base-10 logarithm of a nonnegative capital process value.
///
/// `-inf` encodes a bankrupt process; bankruptcy absorbs all later factors.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogCapital {
    log10_value: f64,
}

impl LogCapital {
    /// Initial capital 1 (log10 = 0).
    pub const UNIT: LogCapital = LogCapital { log10_value: 0.0 };

    pub fn from_log10(log10_value: f64) -> Self {
        Self { log10_value }
    }

    pub fn log10(self) -> f64 {
        self.log10_value
    }

    pub fn is_bankrupt(self) -> bool {
        self.log10_value == f64::NEG_INFINITY
    }

    /// Multiply the capital by `factor`, staying in log space.
    ///
    /// A factor of 0 bankrupts the process; a bankrupt process stays bankrupt.
    pub fn mul_factor(self, factor: f64) -> Self {
        debug_assert!(factor >= 0.0, "capital factors must be nonnegative");
        if self.is_bankrupt() {
            return self;
        }
        Self {
            log10_value: self.log10_value + factor.log10(),
        }
    }
}

impl Default for LogCapital {
    fn default() -> Self {
        Self::UNIT
    }
}
