//! Random-trial comparison of the search against the fixed-step oracle,
//! with the t-tests used to summarise error and runtime.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::error::Result;
use crate::kinematics::{SearchConfig, VehicleState};
use crate::oracle::{simulate_ttc, OracleConfig};
use crate::star::second_order_ttc;
use crate::ttc_first::TtcOutcome;
use crate::vec2::Vec2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),
}

/// Seeded description of a batch of random encounters. Each component of
/// position, velocity and acceleration is drawn uniformly from
/// `(-range, range)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub seed: u64,
    pub n_trials: usize,
    pub p_range: f64,
    pub v_range: f64,
    pub a_range: f64,
    pub phi: f64,
    pub horizon: f64,
}

impl TrialSpec {
    pub fn new(seed: u64, n_trials: usize) -> Self {
        Self { seed, n_trials, p_range: 20.0, v_range: 1.0, a_range: 0.1, phi: 5.0, horizon: 100.0 }
    }

    pub fn search_config(&self) -> SearchConfig<f64> {
        SearchConfig::default().with_phi(self.phi).with_horizon(self.horizon)
    }

    /// The encounters, in order. The same seed always yields the same list.
    pub fn trials(&self) -> Vec<(VehicleState<f64>, VehicleState<f64>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let vec = |rng: &mut ChaCha8Rng, range: f64| {
            let x = rng.random_range(-range..range);
            let y = rng.random_range(-range..range);
            Vec2::new(x, y)
        };
        (0..self.n_trials)
            .map(|_| {
                let mut draw = || {
                    let p = vec(&mut rng, self.p_range);
                    let v = vec(&mut rng, self.v_range);
                    let a = vec(&mut rng, self.a_range);
                    VehicleState { p, v, a, t0: 0.0 }
                };
                let i = draw();
                let j = draw();
                (i, j)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub star: TtcOutcome<f64>,
    pub oracle: TtcOutcome<f64>,
    /// Seconds; absent when the trial was run without timing.
    pub time_star: Option<f64>,
    pub time_oracle: Option<f64>,
}

impl TrialRecord {
    /// `|star - oracle|` when both report a collision.
    pub fn abs_error(&self) -> Option<f64> {
        Some((self.star.time()? - self.oracle.time()?).abs())
    }

    pub fn agrees_on_finiteness(&self) -> bool {
        self.star.is_collision() == self.oracle.is_collision()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub n_trials: usize,
    /// Trials where both methods report a collision.
    pub n_finite: usize,
    /// Trials where the methods disagree on whether a collision happens.
    pub n_disagree: usize,
    pub mean_abs_error: Option<f64>,
    pub std_error: Option<f64>,
    pub max_abs_error: Option<f64>,
    pub mean_time_star: Option<f64>,
    pub mean_time_oracle: Option<f64>,
    /// One-sample test of the mean error against the oracle step.
    pub t_statistic: Option<f64>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub spec: TrialSpec,
    pub oracle_dt: f64,
    pub stats: TrialStats,
    pub records: Vec<TrialRecord>,
}

/// Runs every trial with both methods, one after the other on a single
/// thread, timing each call.
pub fn run_trials(spec: &TrialSpec, oracle_dt: f64) -> Result<TrialReport> {
    let cfg = spec.search_config();
    let ocfg = OracleConfig::matching(&cfg, oracle_dt);
    let mut records = Vec::with_capacity(spec.n_trials);
    for (index, (si, sj)) in spec.trials().into_iter().enumerate() {
        let clock = Instant::now();
        let star = second_order_ttc(&si, &sj, &cfg)?.outcome;
        let time_star = clock.elapsed().as_secs_f64();
        let clock = Instant::now();
        let oracle = simulate_ttc(&si, &sj, &ocfg)?;
        let time_oracle = clock.elapsed().as_secs_f64();
        records.push(TrialRecord { index, star, oracle, time_star: Some(time_star), time_oracle: Some(time_oracle) });
    }
    Ok(report(spec, oracle_dt, records))
}

/// Like [`run_trials`] but spread over worker threads and without timing.
/// When `only_finite` is set, the oracle is skipped for trials the search
/// reports as collision-free.
pub fn compare_trials(spec: &TrialSpec, oracle_dt: f64, only_finite: bool) -> Result<TrialReport> {
    let cfg = spec.search_config();
    let ocfg = OracleConfig::matching(&cfg, oracle_dt);
    let records = spec
        .trials()
        .into_par_iter()
        .enumerate()
        .map(|(index, (si, sj))| {
            let star = second_order_ttc(&si, &sj, &cfg)?.outcome;
            let oracle = if only_finite && !star.is_collision() {
                TtcOutcome::NoCollision
            } else {
                simulate_ttc(&si, &sj, &ocfg)?
            };
            Ok(TrialRecord { index, star, oracle, time_star: None, time_oracle: None })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(report(spec, oracle_dt, records))
}

fn report(spec: &TrialSpec, oracle_dt: f64, records: Vec<TrialRecord>) -> TrialReport {
    let stats = summarize(&records, oracle_dt);
    TrialReport { spec: *spec, oracle_dt, stats, records }
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation (divisor `n - 1`).
fn sample_std(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

/// Error and timing statistics over `records`.
pub fn summarize(records: &[TrialRecord], oracle_dt: f64) -> TrialStats {
    let errors: Vec<f64> = records.iter().filter_map(TrialRecord::abs_error).collect();
    let star_times: Vec<f64> = records.iter().filter_map(|r| r.time_star).collect();
    let oracle_times: Vec<f64> = records.iter().filter_map(|r| r.time_oracle).collect();
    let mean_abs_error = mean(&errors);
    let std_error = sample_std(&errors);
    let test = match (mean_abs_error, std_error) {
        (Some(m), Some(s)) => one_sample_t(m, s, errors.len(), oracle_dt).ok(),
        _ => None,
    };
    TrialStats {
        n_trials: records.len(),
        n_finite: errors.len(),
        n_disagree: records.iter().filter(|r| !r.agrees_on_finiteness()).count(),
        mean_abs_error,
        std_error,
        max_abs_error: errors.iter().copied().reduce(f64::max),
        mean_time_star: mean(&star_times),
        mean_time_oracle: mean(&oracle_times),
        t_statistic: test.map(|t| t.0),
        p_value: test.map(|t| t.1),
    }
}

fn lower_tail(t: f64, df: f64) -> std::result::Result<f64, StatsError> {
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|_| StatsError::DegenerateSample("invalid degrees of freedom"))?;
    Ok(dist.cdf(t))
}

/// One-sample t-test of `H1: mean < mu0`; returns `(t, p)`.
pub fn one_sample_t(mean: f64, std: f64, n: usize, mu0: f64) -> std::result::Result<(f64, f64), StatsError> {
    if n < 2 {
        return Err(StatsError::DegenerateSample("need at least two observations"));
    }
    if !(std > 0.0) {
        return Err(StatsError::DegenerateSample("standard deviation must be positive"));
    }
    let t = (mean - mu0) / (std / (n as f64).sqrt());
    Ok((t, lower_tail(t, (n - 1) as f64)?))
}

/// Welch two-sample t-test of `H1: mean1 < mean2`; returns `(t, p)` with
/// Welch–Satterthwaite degrees of freedom.
pub fn two_sample_t(
    mean1: f64,
    std1: f64,
    n1: usize,
    mean2: f64,
    std2: f64,
    n2: usize,
) -> std::result::Result<(f64, f64), StatsError> {
    if n1 < 2 || n2 < 2 {
        return Err(StatsError::DegenerateSample("need at least two observations per sample"));
    }
    let v1 = std1 * std1 / n1 as f64;
    let v2 = std2 * std2 / n2 as f64;
    if !(v1 + v2 > 0.0) {
        return Err(StatsError::DegenerateSample("both samples have zero variance"));
    }
    let t = (mean1 - mean2) / (v1 + v2).sqrt();
    let df = (v1 + v2).powi(2) / (v1 * v1 / (n1 - 1) as f64 + v2 * v2 / (n2 - 1) as f64);
    Ok((t, lower_tail(t, df)?))
}
