//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! Expected values are either frozen from independent oracles implemented
//! here (brute-force posterior enumeration, analytic growth rates) or are
//! structural invariants checked exactly.

use std::time::Instant;

use exchtest_core::benchmarks::BenchmarkState;
use exchtest_core::betting::{
    simplified_betting_function, BkEngine, SimpleJumperEngine, SimplifiedBkEngine, WeightTable,
};
use exchtest_core::conformal::{p_value_stream, ConformalState, PValue};
use exchtest_core::eprocess::EProcessState;
use exchtest_core::experiments::{
    boxplot_stats, generate_bernoulli, generate_markov, run_many, run_single, ProcessId,
};
use exchtest_core::params::{MarkovParams, Scenario};
use exchtest_core::rng::{RandomSource, PURPOSE_DATA, PURPOSE_THETA};

// ---------------------------------------------------------------------------
// Helpers and oracles
// ---------------------------------------------------------------------------

/// Independent oracle for the posterior weights: enumerate all 2^n parameter
/// sequences, weight each by its Markov prior times the product of uniform
/// p-value densities, and marginalize onto (ones count, last bit).
fn brute_force_posterior(params: &MarkovParams, ps: &[f64]) -> Vec<[f64; 2]> {
    let n = ps.len();
    assert!((1..=20).contains(&n));
    let mut table = vec![[0.0f64; 2]; n + 1];
    for mask in 0u32..(1 << n) {
        let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let mut prior = 0.5;
        let mut k = u64::from(bits[0]);
        let mut density = 1.0; // the first p-value is U[0,1] for every parameter
        for i in 1..n {
            prior *= params.transition(bits[i - 1], bits[i]);
            k += u64::from(bits[i]);
            let step = (i + 1) as f64;
            let kf = k as f64;
            density *= if bits[i] {
                if ps[i] <= kf / step {
                    step / kf
                } else {
                    0.0
                }
            } else if ps[i] >= kf / step {
                step / (step - kf)
            } else {
                0.0
            };
        }
        table[k as usize][usize::from(bits[n - 1])] += prior * density;
    }
    let total: f64 = table.iter().map(|c| c[0] + c[1]).sum();
    for cell in &mut table {
        cell[0] /= total;
        cell[1] /= total;
    }
    table
}

fn ks_statistic_uniform(samples: &[f64]) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        d = d.max(((i + 1) as f64 / n - x).abs());
        d = d.max((x - i as f64 / n).abs());
    }
    d
}

fn lag1_correlation(samples: &[f64]) -> f64 {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    let cov = samples
        .windows(2)
        .map(|w| (w[0] - mean) * (w[1] - mean))
        .sum::<f64>()
        / (n - 1) as f64;
    cov / var
}

fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn median(samples: &[f64]) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn random_params(rng: &mut RandomSource) -> MarkovParams {
    let a = 0.05 + 0.9 * rng.next_open01();
    let b = 0.05 + 0.9 * rng.next_open01();
    MarkovParams::new(a, b).unwrap()
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_bayes_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = RandomSource::new(101);
    let mut max_weight_err: f64 = 0.0;
    let mut max_normalizer_err: f64 = 0.0;
    for fixture in 0..200 {
        let n = 2 + fixture % 7; // n in 2..=8
        let params = random_params(&mut rng);
        let ps: Vec<f64> = (0..n).map(|_| rng.next_open01()).collect();

        let oracle = brute_force_posterior(&params, &ps);
        let mut table = WeightTable::initial();
        for &p in &ps[1..] {
            let p = PValue::new(p);
            let predicted = table.predictive_at(&params, p.value());
            let (next, normalizer) = table.update(&params, p).unwrap();
            max_normalizer_err = max_normalizer_err.max((predicted - normalizer).abs());
            table = next;
        }
        for (k, cell) in oracle.iter().enumerate() {
            for j in [false, true] {
                let err = (table.weight(k, j) - cell[usize::from(j)]).abs();
                max_weight_err = max_weight_err.max(err);
            }
        }
    }
    assert!(max_weight_err <= 1e-10, "max weight error {max_weight_err}");
    assert!(
        max_normalizer_err <= 1e-12,
        "max normalizer error {max_normalizer_err}"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "too slow: {elapsed:?}");
    println!(
        "ACCEPTANCE 1 PASS: recursion matches 2^n enumeration (weight err {max_weight_err:.2e}, \
         normalizer err {max_normalizer_err:.2e}, {elapsed:?})"
    );
}

#[test]
fn criterion_02_betting_function_normalization() {
    let start = Instant::now();
    let mut rng = RandomSource::new(202);
    // 1000 randomized BK states reached by evolving tables with random
    // parameters and p-values.
    let mut checked = 0;
    while checked < 1000 {
        let params = random_params(&mut rng);
        let mut table = WeightTable::initial();
        let len = 2 + (rng.next_open01() * 30.0) as usize;
        for _ in 0..len {
            let f = table.predictive(&params);
            assert!(
                (f.integral() - 1.0).abs() <= 1e-9,
                "BK predictive integral {} at n={}",
                f.integral(),
                table.n()
            );
            checked += 1;
            let (next, _) = table.update(&params, PValue::new(rng.next_open01())).unwrap();
            table = next;
            if checked == 1000 {
                break;
            }
        }
    }
    // Simplified betting functions at every (j, params) combination.
    for params in [
        MarkovParams::hard(),
        MarkovParams::easy(),
        MarkovParams::new(0.23, 0.77).unwrap(),
        MarkovParams::new(0.9, 0.15).unwrap(),
    ] {
        for j in [false, true] {
            let f = simplified_betting_function(&params, j);
            assert!((f.integral() - 1.0).abs() <= 1e-9);
        }
    }
    // Simple Jumper betting functions are linear, so the trapezoid rule is
    // exact: integral = (f(0) + f(1)) / 2.
    for eps in [-1.0, 0.0, 1.0] {
        let f = |p: f64| 1.0 + eps * (p - 0.5);
        let integral = (f(0.0) + f(1.0)) / 2.0;
        assert!((integral - 1.0).abs() <= 1e-9);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "too slow: {elapsed:?}");
    println!("ACCEPTANCE 2 PASS: all betting functions integrate to 1 ({elapsed:?})");
}

#[test]
fn criterion_03_martingale_property_under_null() {
    let start = Instant::now();
    let params = MarkovParams::hard();
    let root = RandomSource::new(303);
    let n_runs = 100_000;
    let n_steps = 20;
    let mut bk_finals = Vec::with_capacity(n_runs);
    let mut sbk_finals = Vec::with_capacity(n_runs);
    let mut sj_finals = Vec::with_capacity(n_runs);
    for run in 0..n_runs as u64 {
        let bits = generate_bernoulli(0.5, n_steps, &mut root.substream(run, PURPOSE_DATA));
        let ps = p_value_stream(&bits, &mut root.substream(run, PURPOSE_THETA));
        let mut bk = BkEngine::new();
        let mut sbk = SimplifiedBkEngine::new();
        let mut sj = SimpleJumperEngine::new(0.01);
        for &p in &ps {
            bk.step(&params, p).unwrap();
            sbk.step(&params, p);
            sj.step(p);
        }
        bk_finals.push(10f64.powf(bk.capital().log10()));
        sbk_finals.push(10f64.powf(sbk.capital().log10()));
        sj_finals.push(10f64.powf(sj.capital().log10()));
    }
    for (name, finals) in [("BK", &bk_finals), ("sBK", &sbk_finals), ("SJ", &sj_finals)] {
        let (mean, se) = mean_and_se(finals);
        assert!(
            (mean - 1.0).abs() <= 5.0 * se,
            "{name} mean {mean} is {} SEs from 1",
            (mean - 1.0).abs() / se
        );
        println!("ACCEPTANCE 3 PASS ({name}): mean final capital {mean:.4} (se {se:.4})");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "too slow: {elapsed:?}");
}

#[test]
fn criterion_04_conformal_p_value_law() {
    let root = RandomSource::new(404);
    let bits = generate_bernoulli(0.5, 10_000, &mut root.substream(0, PURPOSE_DATA));
    let mut theta_rng = root.substream(0, PURPOSE_THETA);

    // Conditional bounds, checked exactly at every step.
    let mut state = ConformalState::new();
    let mut values = Vec::with_capacity(bits.len());
    for &z in &bits {
        let (p, next) = state.next_p_value(z, theta_rng.next_open01());
        let ratio = next.k as f64 / next.n as f64;
        if z {
            assert!(p.value() <= ratio);
        } else {
            assert!(p.value() >= ratio);
        }
        state = next;
        values.push(p.value());
    }

    let ks = ks_statistic_uniform(&values);
    let rho = lag1_correlation(&values);
    assert!(ks < 0.02, "KS statistic {ks}");
    assert!(rho.abs() < 0.03, "lag-1 correlation {rho}");
    println!("ACCEPTANCE 4 PASS: KS {ks:.4}, lag-1 correlation {rho:.4}, bounds exact");
}

#[test]
fn criterion_05_benchmark_ordering_and_growth() {
    let start = Instant::now();
    // Expected growth: analytic per-step log10 UB increments under the
    // stationary chain (state 1 and 0 each with probability 0.5):
    //   easy: 0.9 log10(1.8) + 0.1 log10(0.2) = 0.159839.. dits
    //   hard: 0.6 log10(1.2) + 0.4 log10(0.8) = 0.008752.. dits
    for (params, expected, rel_tol) in [
        (MarkovParams::easy(), 159.8, 0.10),
        (MarkovParams::hard(), 8.75, 0.25),
    ] {
        let scenario = Scenario::under_alternative(1000, params, 2021);
        let root = RandomSource::new(scenario.seed);
        let mut finals = Vec::new();
        for run in 0..100u64 {
            let bits = generate_markov(&params, 1000, &mut root.substream(run, PURPOSE_DATA));
            let mut state = BenchmarkState::new();
            for &z in &bits {
                let (next, _) = state.ub_step(&params, z);
                state = next;
                assert!(
                    state.lb_value(&params).log10() <= state.ub_log10() + 1e-9,
                    "LB exceeded UB"
                );
            }
            finals.push(state.ub_log10());
        }
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        assert!(
            (mean - expected).abs() <= rel_tol * expected,
            "mean final log10 UB {mean} vs expected {expected}"
        );
        println!(
            "ACCEPTANCE 5 PASS: mean final log10 UB {mean:.2} (expected {expected} +- {:.0}%)",
            rel_tol * 100.0
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "too slow: {elapsed:?}");
}

#[test]
fn criterion_06_bk_tracks_benchmarks() {
    let scenario = Scenario::under_alternative(1000, MarkovParams::easy(), 2021);
    let finals = run_many(&scenario, 100, &[ProcessId::Ub, ProcessId::Bk]).unwrap();
    let gaps: Vec<f64> = finals[0]
        .finals
        .iter()
        .zip(&finals[1].finals)
        .map(|(ub, bk)| ub - bk)
        .collect();
    let gap = median(&gaps);
    assert!(gap <= 5.0, "median final log10 UB - BK gap {gap}");
    println!("ACCEPTANCE 6 PASS: median final log10 (UB - BK) = {gap:.2} <= 5");
}

#[test]
fn criterion_07_simplified_bk_degrades_in_easy_case() {
    let scenario = Scenario::under_alternative(1000, MarkovParams::easy(), 2021);
    let processes = [ProcessId::Ub, ProcessId::Lb, ProcessId::Bk, ProcessId::Sbk];
    let finals = run_many(&scenario, 1000, &processes).unwrap();

    // The boxplot pipeline must produce stats for all four processes.
    for f in &finals {
        let stats = boxplot_stats(&f.finals).unwrap();
        assert!(stats.q1 <= stats.median && stats.median <= stats.q3);
        assert!(stats.notch_low <= stats.median && stats.median <= stats.notch_high);
        assert_eq!(stats.n_samples, 1000);
    }

    let bk_median = median(&finals[2].finals);
    let sbk_median = median(&finals[3].finals);
    assert!(
        sbk_median < bk_median,
        "sBK median {sbk_median} not below BK median {bk_median}"
    );
    println!(
        "ACCEPTANCE 7 PASS: easy-case medians sBK {sbk_median:.1} < BK {bk_median:.1}; \
         boxplot stats emitted for ub, lb, bk, sbk"
    );
}

#[test]
fn criterion_08_simple_jumper_weakness() {
    let jump_rates = [0.0001, 0.001, 0.01, 0.1];
    for params in [MarkovParams::hard(), MarkovParams::easy()] {
        let scenario = Scenario::under_alternative(10_000, params, 2021);
        let mut processes = vec![ProcessId::Bk];
        processes.extend(jump_rates.iter().map(|&jump_rate| ProcessId::Sj { jump_rate }));
        let finals = run_many(&scenario, 30, &processes).unwrap();
        let bk_median = median(&finals[0].finals);
        let best_sj = finals[1..]
            .iter()
            .map(|f| median(&f.finals))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(
            best_sj < bk_median,
            "best SJ median {best_sj} not below BK median {bk_median}"
        );
        println!(
            "ACCEPTANCE 8 PASS: large-scenario medians, best SJ {best_sj:.1} < BK {bk_median:.1}"
        );
    }
}

#[test]
fn criterion_09_safe_e_process_dominance() {
    let params = MarkovParams::hard();
    let root = RandomSource::new(2021);
    let mut positive_finals = 0;
    for run in 0..30u64 {
        let bits = generate_markov(&params, 10_000, &mut root.substream(run, PURPOSE_DATA));
        let mut state = EProcessState::new();
        let mut log10_r = 0.0;
        for &z in &bits {
            let (next, value) = state.r_step(z);
            state = next;
            log10_r = value;
            let numerator = state.log10_numerator();
            for i in 1..=9 {
                let pi = i as f64 / 10.0;
                let martingale = numerator - state.log10_bernoulli_likelihood(pi);
                assert!(
                    log10_r <= martingale + 1e-9,
                    "dominance violated at n={} pi={pi}",
                    state.n
                );
            }
        }
        if log10_r > 0.0 {
            positive_finals += 1;
        }
    }
    assert!(
        positive_finals > 15,
        "R grew on only {positive_finals}/30 hard/large runs"
    );
    println!(
        "ACCEPTANCE 9 PASS: dominance holds on the pi grid; R grew on {positive_finals}/30 runs"
    );
}

#[test]
fn criterion_10_complexity_separation() {
    let params = MarkovParams::hard();
    let root = RandomSource::new(1010);
    let bits = generate_bernoulli(0.5, 1000, &mut root.substream(0, PURPOSE_DATA));
    let ps = p_value_stream(&bits, &mut root.substream(0, PURPOSE_THETA));

    // Instrumented cost: BK's per-step cell count is 2(n+1) - linear in n -
    // while sBK touches a constant number of cells per step.
    let mut bk = BkEngine::new();
    let mut sbk = SimplifiedBkEngine::new();
    let mut prev_cells = 0;
    for (i, &p) in ps.iter().enumerate() {
        bk.step(&params, p).unwrap();
        sbk.step(&params, p);
        let step_cost = bk.cells_touched() - prev_cells;
        prev_cells = bk.cells_touched();
        if i >= 1 {
            assert_eq!(step_cost, 2 * (i as u64 + 2), "BK step cost not linear at {i}");
        }
    }
    assert_eq!(sbk.cells_touched(), 1000, "sBK step cost not constant");

    // Wall clock: a full large-scenario BK run (1e4 steps, ~1e8 cell writes).
    let scenario = Scenario::under_alternative(10_000, params, 2021);
    let start = Instant::now();
    let trajectories = run_single(&scenario, &[ProcessId::Bk]).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(trajectories[0].values.len(), 10_000);
    assert!(elapsed.as_secs_f64() < 30.0, "large BK run took {elapsed:?}");
    println!(
        "ACCEPTANCE 10 PASS: BK per-step cost linear, sBK constant; \
         large BK run in {elapsed:?}"
    );
}
