//! Reproducible Monte Carlo trial runner.
//!
//! Each trial gets an independent child seed derived from the plan's master
//! seed, so batches may run with any degree of parallelism: per-trial
//! results depend only on (master_seed, trial_index) and the aggregation is
//! a commutative count, making summaries identical across thread counts.

use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::{
    detection_probability_theoretical, dishonest_premature_measure, forged_result_attack,
    intercept_resend_attack, song_baseline_run, AdversaryError, AttackModel,
};
use crate::protocol::{run_protocol, ProtocolConfig};

/// Child seed for one trial: SplitMix64 finalizer over the master seed
/// offset by the golden-ratio multiple of (index + 1).
///
/// z = master + (index + 1) * 0x9E3779B97F4A7C15, then
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9,
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB,
/// z = z ^ (z >> 31), all wrapping.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add((index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Wilson score interval for a binomial proportion at critical value z.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    debug_assert!(trials >= 1 && successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// A batch of independent runs of one configuration under one attack model.
#[derive(Debug, Clone)]
pub struct TrialPlan {
    pub base_config: ProtocolConfig,
    /// Reconstruction subset, participants 1..=n.
    pub subset: Vec<usize>,
    pub attack: AttackModel,
    pub trials: u64,
    pub master_seed: u64,
}

impl TrialPlan {
    /// Plan over the default subset {1, .., t}.
    pub fn new(base_config: ProtocolConfig, attack: AttackModel, trials: u64, master_seed: u64) -> Self {
        let subset = (1..=base_config.t).collect();
        TrialPlan { base_config, subset, attack, trials, master_seed }
    }

    /// The model's headline success probability, where theory pins one:
    /// 1 for honest runs, the detection formula for intercept-resend, 1/d
    /// for the baseline and for premature measurement (the independent-
    /// uniform product analysis), exact 0/1 for forgery detection.
    pub fn theoretical_rate(&self) -> Option<f64> {
        let d = self.base_config.d.get();
        match self.attack {
            AttackModel::None => Some(1.0),
            AttackModel::InterceptResend => Some(detection_probability_theoretical(
                d,
                self.base_config.m as u32,
            )),
            AttackModel::DishonestMeasure { .. } => Some(1.0 / d as f64),
            AttackModel::ForgedResult { forged } => {
                Some(if forged == self.base_config.secret { 0.0 } else { 1.0 })
            }
            AttackModel::SongBaseline => Some(1.0 / d as f64),
        }
    }
}

/// Per-trial observation, in trial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub detected: bool,
    pub aborted: bool,
    pub recovered: Option<u64>,
    /// recovered == dealer secret.
    pub matches_secret: bool,
    /// The model's headline event; see [`TrialPlan::theoretical_rate`].
    pub success: bool,
}

/// Order-independent aggregate of a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsSummary {
    pub trials: u64,
    pub successes: u64,
    pub detection_count: u64,
    pub empirical_rate: f64,
    pub confidence_interval_95: (f64, f64),
    pub theoretical_rate: Option<f64>,
    /// True iff the empirical rate sits within 3 binomial standard
    /// deviations of the theoretical rate (exact match required when the
    /// theoretical rate is 0 or 1); vacuously true without a theory value.
    pub within_tolerance: bool,
}

fn run_one(plan: &TrialPlan, trial: u64) -> Result<TrialRecord, AdversaryError> {
    let mut config = plan.base_config.clone();
    config.master_seed = derive_seed(plan.master_seed, trial);
    let secret = config.secret;
    let (detected, aborted, recovered) = match plan.attack {
        AttackModel::None => {
            let (_, result) = run_protocol(&config, &plan.subset)?;
            (!result.hash_ok, result.aborted, result.a0_prime.map(|v| v.value()))
        }
        AttackModel::InterceptResend => {
            let (_, outcome) = intercept_resend_attack(&config, &plan.subset)?;
            (outcome.detected, outcome.aborted, outcome.recovered)
        }
        AttackModel::DishonestMeasure { target } => {
            let (_, outcome) = dishonest_premature_measure(&config, target, &plan.subset)?;
            (outcome.detected, outcome.aborted, outcome.recovered)
        }
        AttackModel::ForgedResult { forged } => {
            let (_, outcome) = forged_result_attack(&config, forged, &plan.subset)?;
            (outcome.detected, outcome.aborted, outcome.recovered)
        }
        AttackModel::SongBaseline => {
            let outcome = song_baseline_run(&config, &plan.subset)?;
            (outcome.detected, outcome.aborted, outcome.recovered)
        }
    };
    let matches_secret = recovered == Some(secret);
    let success = match plan.attack {
        AttackModel::None => !aborted && !detected && matches_secret,
        AttackModel::InterceptResend | AttackModel::ForgedResult { .. } => detected,
        AttackModel::DishonestMeasure { .. } | AttackModel::SongBaseline => matches_secret,
    };
    Ok(TrialRecord { trial, detected, aborted, recovered, matches_secret, success })
}

/// Runs the batch and returns both the aggregate and the per-trial records
/// (in trial order, regardless of scheduling).
pub fn run_trials_with_records(
    plan: &TrialPlan,
) -> Result<(StatsSummary, Vec<TrialRecord>), AdversaryError> {
    plan.base_config.validate_subset(&plan.subset)?;
    let records: Vec<TrialRecord> = (0..plan.trials)
        .into_par_iter()
        .map(|trial| run_one(plan, trial))
        .collect::<Result<_, _>>()?;

    let successes = records.iter().filter(|r| r.success).count() as u64;
    let detection_count = records.iter().filter(|r| r.detected).count() as u64;
    let empirical_rate = successes as f64 / plan.trials as f64;
    let theoretical_rate = plan.theoretical_rate();
    let within_tolerance = match theoretical_rate {
        Some(p) => {
            let sigma = (p * (1.0 - p) / plan.trials as f64).sqrt();
            (empirical_rate - p).abs() <= 3.0 * sigma
        }
        None => true,
    };
    let summary = StatsSummary {
        trials: plan.trials,
        successes,
        detection_count,
        empirical_rate,
        confidence_interval_95: wilson_interval(successes, plan.trials, 1.96),
        theoretical_rate,
        within_tolerance,
    };
    Ok((summary, records))
}

/// Runs the batch and returns the aggregate. Identical plans give identical
/// summaries at any parallelism level.
pub fn run_trials(plan: &TrialPlan) -> Result<StatsSummary, AdversaryError> {
    run_trials_with_records(plan).map(|(summary, _)| summary)
}
