//! Betting engines over the conformal p-value stream.
//!
//! Three strategies are implemented:
//!
//! - **Bayes–Kelly (BK).** Treats the hidden bit sequence as a Bayesian
//!   parameter with the Markov alternative as prior, maintains posterior
//!   weights `w[k, j]` over (count of ones `k`, last bit `j`), and bets the
//!   predictive density of the next p-value. Step n touches O(n) weight
//!   cells, so a full run is O(N^2).
//! - **Simplified Bayes–Kelly (sBK).** Assumes the weights concentrate near
//!   `k ~ n/2` and replaces the last bit by `j = 1{p_{n-1} <= 0.5}`, which
//!   collapses the betting function to a two-piece step. O(1) per step.
//! - **Simple Jumper (SJ).** A baseline mixing the three linear betting
//!   functions `f_eps(p) = 1 + eps (p - 0.5)`, `eps in {-1, 0, 1}`, with
//!   capital redistributed at a fixed jumping rate before every bet.
//!
//! Every betting function is a probability density on [0, 1]; the capital
//! factor per step is the density evaluated at the observed p-value.

use thiserror::Error;

use crate::conformal::PValue;
use crate::logspace::LogCapital;
use crate::params::MarkovParams;

/// The alternative put zero density on the observed p-value.
///
/// Impossible for nondegenerate Markov parameters; raised as a fatal
/// contract violation rather than silently bankrupting the martingale.
#[derive(Debug, Error, PartialEq)]
#[error("betting function vanished at the observed p-value (step {step})")]
pub struct ZeroNormalizer {
    pub step: usize,
}

/// Likelihood of observing p-value `p` at step n+1 given that the first
/// n+1 bits contain `k + z` ones and end in `z`:
///
/// ```text
///     l(n, k, 1, p) = (n+1)/(k+1)    if p <= (k+1)/(n+1), else 0
///     l(n, k, 0, p) = (n+1)/(n-k+1)  if p >= k/(n+1),     else 0
/// ```
///
/// These are the densities of U[0, (k+1)/(n+1)] and U[k/(n+1), 1].
pub fn bk_likelihood(n: usize, k: usize, j: bool, p: f64) -> f64 {
    debug_assert!(k <= n);
    let nf = (n + 1) as f64;
    if j {
        if p <= (k + 1) as f64 / nf {
            nf / (k + 1) as f64
        } else {
            0.0
        }
    } else if p >= k as f64 / nf {
        nf / (n - k + 1) as f64
    } else {
        0.0
    }
}

/// Posterior weights `w[k, j]` over (ones count, last bit) after n steps.
///
/// Weights are kept in linear scale; per-step normalization keeps them in
/// [0, 1] and the normalizer is exactly the capital factor f_n(p_n).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    n: usize,
    /// w[k] = [w_{k,0}, w_{k,1}], k = 0..=n.
    w: Vec<[f64; 2]>,
}

impl WeightTable {
    /// The start table at n = 1: w[0,0] = w[1,1] = 0.5, the prior marginal.
    pub fn initial() -> Self {
        Self {
            n: 1,
            w: vec![[0.5, 0.0], [0.0, 0.5]],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, k: usize, j: bool) -> f64 {
        self.w[k][usize::from(j)]
    }

    pub fn total(&self) -> f64 {
        self.w.iter().map(|c| c[0] + c[1]).sum()
    }

    /// Number of weight cells; the cost of one update step.
    pub fn cells(&self) -> usize {
        2 * (self.n + 1)
    }

    /// One posterior update on the p-value observed at step n+1.
    ///
    /// Unnormalized weights:
    ///
    /// ```text
    ///     w~[k, 0] = (w[k, 0]   pi_0|0 + w[k, 1]   pi_0|1) l(n, k,   0, p)
    ///     w~[k, 1] = (w[k-1, 0] pi_1|0 + w[k-1, 1] pi_1|1) l(n, k-1, 1, p)
    /// ```
    ///
    /// with out-of-range references read as 0. Returns the normalized table
    /// and the normalizer, which equals the predictive density at `p`.
    pub fn update(
        &self,
        params: &MarkovParams,
        p: PValue,
    ) -> Result<(WeightTable, f64), ZeroNormalizer> {
        let n = self.n;
        let p = p.value();
        let mut next = vec![[0.0f64; 2]; n + 2];
        let mut total = 0.0;
        for k in 0..=n {
            let stay = self.w[k][0] * params.pi_0_given_0() + self.w[k][1] * params.pi_0_given_1();
            let w0 = stay * bk_likelihood(n, k, false, p);
            let flip = self.w[k][0] * params.pi_1_given_0() + self.w[k][1] * params.pi_1_given_1();
            let w1 = flip * bk_likelihood(n, k, true, p);
            next[k][0] = w0;
            next[k + 1][1] = w1;
            total += w0 + w1;
        }
        if total <= 0.0 || total.is_nan() {
            return Err(ZeroNormalizer { step: n + 1 });
        }
        for cell in &mut next {
            cell[0] /= total;
            cell[1] /= total;
        }
        Ok((WeightTable { n: n + 1, w: next }, total))
    }

    /// Predictive density of the next p-value at a single point.
    ///
    /// ```text
    ///     f(p) = sum_{k,j} w[k, j] ( (n/(k+1)) pi_1|j 1{p <= (k+1)/n}
    ///                              + (n/(n-k)) pi_0|j 1{p >= k/n} )
    /// ```
    ///
    /// with n = self.n + 1. Both indicators are non-strict.
    pub fn predictive_at(&self, params: &MarkovParams, p: f64) -> f64 {
        let n = (self.n + 1) as f64;
        let mut f = 0.0;
        for (k, cell) in self.w.iter().enumerate() {
            let kf = k as f64;
            let up = if p <= (kf + 1.0) / n { n / (kf + 1.0) } else { 0.0 };
            let down = if p >= kf / n { n / (n - kf) } else { 0.0 };
            for (w, pi1) in cell.iter().zip([params.pi_1_given_0(), params.pi_1_given_1()]) {
                f += w * (up * pi1 + down * (1.0 - pi1));
            }
        }
        f
    }

    /// The full predictive density as a step function with breakpoints at
    /// the grid k/n, k = 0..=n.
    pub fn predictive(&self, params: &MarkovParams) -> StepFunction {
        let n = self.n + 1;
        let breakpoints: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        let values = (0..n)
            .map(|k| {
                let mid = (k as f64 + 0.5) / n as f64;
                self.predictive_at(params, mid)
            })
            .collect();
        StepFunction::new(breakpoints, values)
    }

    /// Marginal weight over k, summed over the last bit. The Fig.-5-style
    /// concentration diagnostic.
    pub fn marginal_over_k(&self) -> Vec<f64> {
        self.w.iter().map(|c| c[0] + c[1]).collect()
    }
}

/// A piecewise-constant density on [0, 1].
///
/// Lookup is right-continuous (the last interval is closed at 1); exact
/// breakpoint hits occur with probability 0, and the betting engines
/// evaluate their densities directly rather than through a lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        assert!(breakpoints.len() >= 2);
        assert_eq!(values.len(), breakpoints.len() - 1);
        assert_eq!(breakpoints[0], 0.0);
        assert_eq!(*breakpoints.last().unwrap(), 1.0);
        assert!(breakpoints.windows(2).all(|w| w[0] < w[1]));
        assert!(values.iter().all(|&v| v >= 0.0));
        Self { breakpoints, values }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, p: f64) -> f64 {
        assert!((0.0..=1.0).contains(&p));
        let idx = match self
            .breakpoints
            .binary_search_by(|b| b.partial_cmp(&p).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        self.values[idx.min(self.values.len() - 1)]
    }

    /// Exact integral over [0, 1].
    pub fn integral(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| v * (w[1] - w[0]))
            .sum()
    }
}

/// The simplified betting function at a point: Eq.-(2)-style two-piece step.
pub fn simplified_betting_function(params: &MarkovParams, j: bool) -> StepFunction {
    let pi1 = params.pi_1_given(j);
    StepFunction::new(vec![0.0, 0.5, 1.0], vec![2.0 * pi1, 2.0 * (1.0 - pi1)])
}

/// One simplified-BK step: the last bit is approximated by
/// `j = 1{p_{n-1} <= 0.5}` and the factor is `2 pi_1|j` for `p <= 0.5`,
/// `2 pi_0|j` otherwise. The first step (no previous p-value) bets 1.
pub fn simplified_bk_step(
    prev_p: Option<PValue>,
    params: &MarkovParams,
    p: PValue,
) -> (f64, PValue) {
    let factor = match prev_p {
        None => 1.0,
        Some(prev) => {
            let j = prev.value() <= 0.5;
            let pi1 = params.pi_1_given(j);
            if p.value() <= 0.5 {
                2.0 * pi1
            } else {
                2.0 * (1.0 - pi1)
            }
        }
    };
    (factor, p)
}

/// Bayes–Kelly engine: posterior weights plus log capital.
///
/// Step 1 bets f_1 = 1 (the first p-value is uniform under every parameter)
/// and leaves the start table untouched; every later step multiplies the
/// capital by the update normalizer, which equals f_n(p_n).
#[derive(Debug, Clone)]
pub struct BkEngine {
    weights: WeightTable,
    capital: LogCapital,
    steps: usize,
    cells_touched: u64,
}

impl BkEngine {
    pub fn new() -> Self {
        Self {
            weights: WeightTable::initial(),
            capital: LogCapital::UNIT,
            steps: 0,
            cells_touched: 0,
        }
    }

    pub fn weights(&self) -> &WeightTable {
        &self.weights
    }

    pub fn capital(&self) -> LogCapital {
        self.capital
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Weight cells written so far; grows quadratically over a full run.
    pub fn cells_touched(&self) -> u64 {
        self.cells_touched
    }

    /// Consume one p-value; returns the capital factor for this step.
    pub fn step(&mut self, params: &MarkovParams, p: PValue) -> Result<f64, ZeroNormalizer> {
        self.steps += 1;
        if self.steps == 1 {
            return Ok(1.0);
        }
        let (next, normalizer) = self.weights.update(params, p)?;
        self.cells_touched += next.cells() as u64;
        self.weights = next;
        self.capital = self.capital.mul_factor(normalizer);
        Ok(normalizer)
    }
}

impl Default for BkEngine {
    fn default() -> Self {
        Self::new()
    }
}

/// Simplified Bayes–Kelly engine.
#[derive(Debug, Clone, Default)]
pub struct SimplifiedBkEngine {
    prev_p: Option<PValue>,
    capital: LogCapital,
    steps: usize,
    cells_touched: u64,
}

impl SimplifiedBkEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn capital(&self) -> LogCapital {
        self.capital
    }

    /// Constant work per step, counted for the cost-model comparison.
    pub fn cells_touched(&self) -> u64 {
        self.cells_touched
    }

    pub fn step(&mut self, params: &MarkovParams, p: PValue) -> f64 {
        self.steps += 1;
        self.cells_touched += 1;
        let (factor, carry) = simplified_bk_step(self.prev_p, params, p);
        self.prev_p = Some(carry);
        self.capital = self.capital.mul_factor(factor);
        factor
    }
}

/// Simple Jumper capital shares over the three betting states.
///
/// Shares are renormalized to sum 1 after every step; the per-step total
/// factor carries the capital, which the engine accumulates in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleJumperState {
    capital_per_state: [f64; 3],
    jump_rate: f64,
}

impl SimpleJumperState {
    /// Equal thirds on eps = -1, 0, 1.
    pub fn new(jump_rate: f64) -> Self {
        assert!((0.0..=1.0).contains(&jump_rate));
        Self {
            capital_per_state: [1.0 / 3.0; 3],
            jump_rate,
        }
    }

    #[cfg(test)]
    pub(crate) fn with_capitals(capitals: [f64; 3], jump_rate: f64) -> Self {
        Self {
            capital_per_state: capitals,
            jump_rate,
        }
    }

    pub fn jump_rate(&self) -> f64 {
        self.jump_rate
    }

    pub fn total(&self) -> f64 {
        self.capital_per_state.iter().sum()
    }

    /// Jump, then bet: redistribute a J-fraction of the total uniformly over
    /// the three states, multiply each state by f_eps(p) = 1 + eps (p - 0.5),
    /// and report the overall factor.
    pub fn step(&self, p: PValue) -> (SimpleJumperState, f64) {
        let before: f64 = self.total();
        let j = self.jump_rate;
        let mut c = self.capital_per_state;
        for share in &mut c {
            *share = (1.0 - j) * *share + j / 3.0 * before;
        }
        for (i, share) in c.iter_mut().enumerate() {
            let eps = i as f64 - 1.0;
            *share *= 1.0 + eps * (p.value() - 0.5);
        }
        let after: f64 = c.iter().sum();
        let factor = after / before;
        for share in &mut c {
            *share /= after;
        }
        (
            SimpleJumperState {
                capital_per_state: c,
                jump_rate: j,
            },
            factor,
        )
    }
}

/// Simple Jumper engine: state shares plus log capital.
#[derive(Debug, Clone)]
pub struct SimpleJumperEngine {
    state: SimpleJumperState,
    capital: LogCapital,
}

impl SimpleJumperEngine {
    pub fn new(jump_rate: f64) -> Self {
        Self {
            state: SimpleJumperState::new(jump_rate),
            capital: LogCapital::UNIT,
        }
    }

    pub fn capital(&self) -> LogCapital {
        self.capital
    }

    pub fn step(&mut self, p: PValue) -> f64 {
        let (next, factor) = self.state.step(p);
        self.state = next;
        self.capital = self.capital.mul_factor(factor);
        factor
    }
}
