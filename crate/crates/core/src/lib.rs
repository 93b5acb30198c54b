//! Online testing of exchangeability for binary streams against Markov
//! alternatives.
//!
//! The null hypothesis is that the observations are exchangeable (i.i.d.
//! Bernoulli with unknown parameter); the alternative is a two-state Markov
//! chain. Evidence is accumulated by nonnegative capital processes started
//! at 1:
//!
//! - conformal test martingales betting on randomized conformal p-values
//!   ([`betting::BkEngine`], [`betting::SimplifiedBkEngine`],
//!   [`betting::SimpleJumperEngine`]),
//! - likelihood-ratio benchmarks bracketing the achievable evidence
//!   ([`benchmarks::BenchmarkState`]),
//! - a safe e-process valid against every Bernoulli null
//!   ([`eprocess::EProcessState`]).
//!
//! All capital is tracked in base-10 log space ([`logspace::LogCapital`]),
//! and all randomness is derived from a single seed through per-(run,
//! purpose) substreams ([`rng::RandomSource`]), so every experiment is
//! byte-reproducible. [`experiments`] runs scenarios and Monte Carlo sweeps.

pub mod benchmarks;
pub mod betting;
pub mod conformal;
pub mod eprocess;
pub mod experiments;
pub mod logspace;
pub mod params;
pub mod rng;

pub use conformal::{ConformalState, PValue};
pub use logspace::LogCapital;
pub use params::{DataLaw, MarkovParams, Scenario, ScenarioSize};
pub use rng::RandomSource;
