//! Seeded, parallel Monte Carlo repetitions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use trunc_regress::gibbs::{draw, posterior};
use trunc_regress::synth::GroundTruth;
use trunc_regress::{fit, solve_ols, solve_ridge, Dataset, EstimatorResult, ParamVector};

use crate::config::{Estimator, ExperimentConfig};

/// RNG of repetition `rep`: stream `rep` of the ChaCha8 generator keyed by the
/// master seed, so a repetition's draws do not depend on scheduling.
pub fn rep_rng(master_seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(rep as u64);
    rng
}

/// Everything fitted on one training set.
#[derive(Debug, Clone)]
pub struct Repetition {
    pub data: Dataset,
    pub truth: GroundTruth,
    pub ols: ParamVector,
    pub ridge: Option<ParamVector>,
    pub minmax: Option<EstimatorResult>,
    /// One draw from the Gibbs posterior.
    pub gibbs: Option<ParamVector>,
}

impl Repetition {
    pub fn minmax_differs(&self, config: &ExperimentConfig) -> bool {
        self.minmax
            .as_ref()
            .is_some_and(|m| !config.minmax.same_params(&m.theta_hat, &self.ols))
    }
}

/// Generates repetition `rep` and fits the configured estimators.
pub fn simulate(config: &ExperimentConfig, rep: usize) -> trunc_regress::Result<Repetition> {
    let mut rng = rep_rng(config.master_seed, rep);
    let (data, truth) =
        config
            .design
            .generate(config.n, config.d, config.sigma, &config.noise, &mut rng)?;
    let all: Vec<usize> = (0..data.len()).collect();
    let ols = solve_ols(&data, &all)?;
    let ridge = if config.runs(Estimator::Ridge) {
        Some(solve_ridge(&data, config.lambda())?)
    } else {
        None
    };
    let minmax = if config.runs(Estimator::Minmax) {
        Some(fit(&data, &config.minmax)?)
    } else {
        None
    };
    let gibbs = match &config.gibbs {
        Some(spec) => Some(draw(&posterior(&data, spec)?, &mut rng)),
        None => None,
    };
    Ok(Repetition {
        data,
        truth,
        ols,
        ridge,
        minmax,
        gibbs,
    })
}

/// Outcome of one repetition. Excess risks are exact; `None` marks an
/// estimator that was not requested.
#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionRecord {
    pub rep: usize,
    pub excess_ols: f64,
    pub excess_minmax: Option<f64>,
    pub minmax_differs: bool,
    pub n_removed: usize,
    pub alpha: Option<f64>,
    pub excess_ridge: Option<f64>,
    pub excess_gibbs: Option<f64>,
    /// Set when the repetition failed; all risks are then NaN.
    pub error: Option<String>,
}

impl RepetitionRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }

    pub fn improves(&self) -> bool {
        self.minmax_differs && self.excess_minmax.is_some_and(|m| m < self.excess_ols)
    }

    fn from_error(rep: usize, err: trunc_regress::Error) -> Self {
        Self {
            rep,
            excess_ols: f64::NAN,
            excess_minmax: None,
            minmax_differs: false,
            n_removed: 0,
            alpha: None,
            excess_ridge: None,
            excess_gibbs: None,
            error: Some(err.to_string()),
        }
    }
}

fn record(
    config: &ExperimentConfig,
    rep: usize,
    r: &Repetition,
) -> trunc_regress::Result<RepetitionRecord> {
    let excess = |t: &ParamVector| r.truth.excess_risk(t);
    let opt = |t: Option<&ParamVector>| t.map(excess).transpose();
    Ok(RepetitionRecord {
        rep,
        excess_ols: excess(&r.ols)?,
        excess_minmax: opt(r.minmax.as_ref().map(|m| &m.theta_hat))?,
        minmax_differs: r.minmax_differs(config),
        n_removed: r.minmax.as_ref().map_or(0, |m| m.n_removed(r.data.len())),
        alpha: r.minmax.as_ref().map(|m| m.alpha_used),
        excess_ridge: opt(r.ridge.as_ref())?,
        excess_gibbs: opt(r.gibbs.as_ref())?,
        error: None,
    })
}

/// Runs one repetition; failures are captured in the record.
pub fn run_repetition(config: &ExperimentConfig, rep: usize) -> RepetitionRecord {
    simulate(config, rep)
        .and_then(|r| record(config, rep, &r))
        .unwrap_or_else(|e| RepetitionRecord::from_error(rep, e))
}

/// All repetitions, in `rep` order regardless of the worker schedule.
pub fn run_repetitions(config: &ExperimentConfig) -> Vec<RepetitionRecord> {
    (0..config.repetitions)
        .into_par_iter()
        .map(|rep| run_repetition(config, rep))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use rand::Rng;

    fn config(extra: &str) -> ExperimentConfig {
        let s = format!(
            "trunc-bench --gen inc --n 60 --d 2 --noise heavy --seed 9 --out unused {extra}"
        );
        parse_config(s.split_whitespace()).unwrap()
    }

    #[test]
    fn streams_are_distinct_and_stable() {
        let a: u64 = rep_rng(5, 0).random();
        let b: u64 = rep_rng(5, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, rep_rng(5, 0).random::<u64>());
    }

    #[test]
    fn records_are_keyed_by_rep() {
        let c = config("--reps 12");
        let recs = run_repetitions(&c);
        assert_eq!(recs.len(), 12);
        for (i, r) in recs.iter().enumerate() {
            assert_eq!(r.rep, i);
            assert_eq!(*r, run_repetition(&c, i));
            assert!(r.excess_ols >= 0.0 && r.excess_minmax.unwrap() >= 0.0);
            assert!(!r.failed());
            if !r.minmax_differs {
                assert_eq!(r.excess_minmax, Some(r.excess_ols));
            }
        }
    }

    #[test]
    fn unrequested_estimators_are_absent() {
        let c = config("--reps 1 --estimators ols");
        let r = run_repetition(&c, 0);
        assert_eq!(
            (r.excess_minmax, r.excess_ridge, r.excess_gibbs),
            (None, None, None)
        );
        assert!(!r.minmax_differs);
    }

    #[test]
    fn ridge_and_gibbs() {
        let c = config(
            "--reps 1 --estimators ridge,gibbs --lambda 0.5 --gibbs-box -20:40 --gibbs-grid 41",
        );
        let r = run_repetition(&c, 0);
        assert!(r.excess_ridge.unwrap() >= 0.0);
        assert!(r.excess_gibbs.unwrap() >= 0.0);
    }
}
