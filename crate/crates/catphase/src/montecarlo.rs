//! Monte Carlo campaigns: simulated repeated experiments producing empirical
//! mean square error and bias, with an exhaustive small-m oracle.
//!
//! Reproducibility contract: every trial draws from its own ChaCha8 stream
//! whose 256-bit key is derived from `(master_seed, trial_index)` by a
//! splitmix64 chain. Trials are therefore order-independent and safe to run
//! in parallel; aggregation is a sequential fold over trial index, so a
//! campaign is bit-identical for any parallelism degree. The key schedule is
//! part of the output format and must not change between versions.

use rand::distributions::Distribution;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use rayon::prelude::*;

use crate::bounds::{cramer_rao, reference_scales, ziv_zakai_closed, FisherKind};
use crate::error::{Error, Result};
use crate::likelihood::{
    log_binomial_pmf_continuous, ml_estimate, EstimatorMethod, OutcomeTally,
};
use crate::model::{outcome_probability, Outcome, Phase, PriorWindow, ProbeSpec};

/// Largest m for which the exhaustive MSE oracle enumerates all tallies.
const ORACLE_MAX_M: u64 = 5000;
/// Clamp fractions above this raise a warning flag in the summary.
const CLAMP_WARNING_FRACTION: f64 = 0.01;

/// How the true phase of each trial is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiPolicy {
    /// Every trial uses the same true phase.
    Fixed(f64),
    /// Each trial draws its true phase uniformly from the prior window.
    SampleFromPrior,
}

/// Full description of a simulation campaign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignConfig {
    pub probe: ProbeSpec,
    pub prior: PriorWindow,
    pub m: u64,
    pub trials: u64,
    pub phi_policy: PhiPolicy,
    pub estimator_method: EstimatorMethod,
    pub master_seed: u64,
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidInput("campaign needs trials >= 1".into()));
        }
        if self.m < 1 {
            return Err(Error::InvalidInput("campaign needs m >= 1".into()));
        }
        if let PhiPolicy::Fixed(phi) = self.phi_policy {
            if !(0.0..=self.prior.width()).contains(&phi) {
                return Err(Error::InvalidInput(format!(
                    "fixed phase {phi} lies outside the prior window [0, {}]",
                    self.prior.width()
                )));
            }
        }
        Ok(())
    }
}

/// One simulated experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub index: u64,
    pub phi_true: f64,
    pub k: u64,
    pub phi_hat: f64,
    /// Estimation error `phi_hat - phi_true`.
    pub error: f64,
    pub clamped: bool,
}

/// Ratios of the empirical rmse against the reference scales and bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparisons {
    pub vs_weak: f64,
    pub vs_strong: f64,
    pub vs_prior_width: f64,
    pub vs_cr: f64,
    pub vs_zz_closed: f64,
}

/// Aggregate statistics of a campaign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignSummary {
    pub trials: u64,
    pub mse: f64,
    pub mse_stderr: f64,
    pub bias: f64,
    pub bias_stderr: f64,
    pub rmse: f64,
    pub clamp_fraction: f64,
    pub clamp_warning: bool,
    pub comparisons: Comparisons,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-trial random stream keyed by `(master_seed, index)`.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut index_state = index;
    let mut state = master_seed ^ splitmix64(&mut index_state);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Draws the number of `+` outcomes in `m` shots at true phase `phi`.
pub fn sample_tally<R: Rng>(probe: &ProbeSpec, phi: Phase, m: u64, rng: &mut R) -> u64 {
    let p_plus = outcome_probability(probe, phi, Outcome::Plus);
    Binomial::new(m, p_plus)
        .expect("outcome probability is always inside (0, 1)")
        .sample(rng)
}

fn run_trial(config: &CampaignConfig, index: u64) -> TrialRecord {
    let mut rng = trial_rng(config.master_seed, index);
    let phi_true = match config.phi_policy {
        PhiPolicy::Fixed(phi) => phi,
        PhiPolicy::SampleFromPrior => rng.gen::<f64>() * config.prior.width(),
    };
    let phi = Phase::new(phi_true).expect("finite phase draw");
    let k = sample_tally(&config.probe, phi, config.m, &mut rng);
    let tally = OutcomeTally::new(k, config.m).expect("sampled tally is valid");
    let estimate = ml_estimate(&tally, &config.probe, config.estimator_method);
    TrialRecord {
        index,
        phi_true,
        k,
        phi_hat: estimate.phi_hat,
        error: estimate.phi_hat - phi_true,
        clamped: estimate.clamped,
    }
}

/// Runs every trial of a campaign and aggregates the summary statistics.
pub fn run_campaign(config: &CampaignConfig) -> Result<(Vec<TrialRecord>, CampaignSummary)> {
    config.validate()?;
    let records: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect();
    let summary = summarize(config, &records)?;
    Ok((records, summary))
}

fn summarize(config: &CampaignConfig, records: &[TrialRecord]) -> Result<CampaignSummary> {
    let n = records.len() as f64;
    let mut sum_err = 0.0;
    let mut sum_sq = 0.0;
    let mut sum_4 = 0.0;
    let mut clamped = 0u64;
    for r in records {
        sum_err += r.error;
        sum_sq += r.error * r.error;
        sum_4 += r.error * r.error * r.error * r.error;
        if r.clamped {
            clamped += 1;
        }
    }
    let bias = sum_err / n;
    let mse = sum_sq / n;
    let rmse = mse.sqrt();
    // sample variances of the error and squared-error populations
    let var_err = (sum_sq / n - bias * bias).max(0.0);
    let var_sq = (sum_4 / n - mse * mse).max(0.0);
    let bias_stderr = (var_err / n).sqrt();
    let mse_stderr = (var_sq / n).sqrt();
    let clamp_fraction = clamped as f64 / n;

    let (weak, strong) = reference_scales(&config.probe, config.m)?;
    let cr_phi = match config.phi_policy {
        PhiPolicy::Fixed(phi) => phi,
        PhiPolicy::SampleFromPrior => 0.5 * config.prior.width(),
    };
    let cr = cramer_rao(
        &config.probe,
        config.m,
        Phase::new(cr_phi)?,
        FisherKind::Classical,
    )?;
    let zz = ziv_zakai_closed(&config.probe, config.m)?;
    Ok(CampaignSummary {
        trials: records.len() as u64,
        mse,
        mse_stderr,
        bias,
        bias_stderr,
        rmse,
        clamp_fraction,
        clamp_warning: clamp_fraction > CLAMP_WARNING_FRACTION,
        comparisons: Comparisons {
            vs_weak: rmse / weak,
            vs_strong: rmse / strong,
            vs_prior_width: rmse / config.prior.width(),
            vs_cr: rmse / cr,
            vs_zz_closed: rmse / zz,
        },
    })
}

/// Exact mean square error of the estimator by exhaustive enumeration of all
/// tallies: `sum_k P(k|phi) (phi_hat(k) - phi)^2`. Limited to small m.
pub fn mse_oracle_exact(
    probe: &ProbeSpec,
    phi: Phase,
    m: u64,
    method: EstimatorMethod,
) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidInput("oracle needs m >= 1".into()));
    }
    if m > ORACLE_MAX_M {
        return Err(Error::Exhaustive(format!(
            "exhaustive MSE oracle supports m <= {ORACLE_MAX_M}, got {m}"
        )));
    }
    let p_plus = outcome_probability(probe, phi, Outcome::Plus);
    let mut mse = 0.0;
    for k in 0..=m {
        let pmf = log_binomial_pmf_continuous(k as f64, m as f64, p_plus).exp();
        let tally = OutcomeTally::new(k, m)?;
        let estimate = ml_estimate(&tally, probe, method);
        let err = estimate.phi_hat - phi.radians();
        mse += pmf * err * err;
    }
    Ok(mse)
}
