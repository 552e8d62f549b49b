//! Seeded Monte-Carlo campaigns.
//!
//! Trial `i` draws from its own ChaCha stream `(seed, i)`, per-trial results
//! are collected in index order and reduced sequentially, so every report is
//! bit-identical for any worker count.

pub mod jensen;
pub mod ser;
pub mod stats;
pub mod sweep;

use rayon::prelude::*;

use crate::analytic::{JensenVariant, NmseFormulas};
use crate::error::{Error, Result};
use crate::estimation::{
    lr_estimate_nonreciprocal, lr_estimate_reciprocal, tx_estimate_downlink,
    tx_estimate_reciprocal, tx_estimate_uplink, ur_estimate,
};
use crate::model::linalg::fro_sq;
use crate::model::rng::{trial_rng, Stream};
use crate::model::{
    forward_training, reverse_training, round_trip_training, sample_channels, CMat,
    ChannelRealization, ForwardPhase,
};
use crate::params::{PowerAllocation, SystemParams};

pub use jensen::{adjudicate_jensen, jensen_oracle, JensenAdjudication};
pub use ser::{run_ser_experiment, SerOptions, SerReport};
pub use stats::{compensated_sum, Summary};
pub use sweep::{sweep_forward_length, sweep_power_allocation, AllocRow, SolveDetail};

type Params = SystemParams<f64>;

/// Gives up on a trial after this many rank-deficient redraws.
const MAX_REDRAWS: usize = 1000;

/// Channel draw and the two receivers' estimates after one full protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub channels: ChannelRealization,
    pub lr_estimate: CMat,
    pub ur_estimate: CMat,
}

/// Runs every training phase of the allocation's scheme once.
pub fn simulate_protocol(
    p: &Params,
    alloc: &PowerAllocation<f64>,
    variant: JensenVariant,
    rng: &mut Stream,
) -> Result<TrialOutcome> {
    let ch = sample_channels(p, alloc.scheme(), rng);
    let (phase, h_d_hat) = match alloc {
        PowerAllocation::Reciprocal(a) => {
            let rev = reverse_training(p, a.e_r, p.tau_r, &ch, rng);
            (
                ForwardPhase::reciprocal(p, a),
                tx_estimate_reciprocal(&rev, p, a.e_r)?.estimate,
            )
        }
        PowerAllocation::NonReciprocal(a) => {
            let rev = reverse_training(p, a.e_2, p.tau_2, &ch, rng);
            let hu = tx_estimate_uplink(&rev, p, a.e_2)?;
            let rt = round_trip_training(p, a.e_0, a.e_1, &ch, rng);
            (
                ForwardPhase::nonreciprocal(p, a),
                tx_estimate_downlink(&rt, &hu, p, a)?.estimate,
            )
        }
    };
    let fwd = forward_training(p, phase, &h_d_hat, &ch, rng)?;
    let lr = match alloc {
        PowerAllocation::Reciprocal(a) => lr_estimate_reciprocal(&fwd, p, a)?,
        PowerAllocation::NonReciprocal(a) => lr_estimate_nonreciprocal(&fwd, p, a, variant)?,
    };
    let ur = ur_estimate(&fwd, p, phase)?;
    Ok(TrialOutcome {
        channels: ch,
        lr_estimate: lr.estimate,
        ur_estimate: ur.estimate,
    })
}

/// [`simulate_protocol`] with rank-deficient AN bases redrawn; returns the
/// number of redraws alongside the outcome.
pub fn simulate_with_redraws(
    p: &Params,
    alloc: &PowerAllocation<f64>,
    variant: JensenVariant,
    rng: &mut Stream,
) -> Result<(TrialOutcome, usize)> {
    let mut redraws = 0;
    loop {
        match simulate_protocol(p, alloc, variant, rng) {
            Err(Error::RankDeficient { .. }) if redraws < MAX_REDRAWS => redraws += 1,
            other => return other.map(|o| (o, redraws)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmseReport {
    pub analytic_lr: f64,
    pub analytic_ur: f64,
    pub empirical_lr: f64,
    pub empirical_ur: f64,
    pub half_width_lr: f64,
    pub half_width_ur: f64,
    pub trials: usize,
    /// Trials redrawn because the transmitter's estimate was rank deficient.
    pub resampled_trials: usize,
    pub jensen: JensenVariant,
}

pub fn run_nmse_experiment(
    p: &Params,
    alloc: &PowerAllocation<f64>,
    trials: usize,
    seed: u64,
    variant: JensenVariant,
) -> Result<NmseReport> {
    p.validate()?;
    if trials < 100 {
        return Err(Error::InvalidParams(format!(
            "trials = {trials} must be at least 100"
        )));
    }
    if !alloc.is_nonnegative() {
        return Err(Error::InvalidParams(
            "allocation has a negative entry".into(),
        ));
    }
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let (o, redraws) = simulate_with_redraws(p, alloc, variant, &mut rng)?;
            let lr = fro_sq(&(&o.lr_estimate - &o.channels.h_d)) / (p.n_t * p.n_l) as f64;
            let ur = fro_sq(&(&o.ur_estimate - &o.channels.g)) / (p.n_t * p.n_u) as f64;
            Ok((lr, ur, redraws))
        })
        .collect::<Result<Vec<_>>>()?;
    let lr = Summary::of(&per_trial.iter().map(|t| t.0).collect::<Vec<_>>());
    let ur = Summary::of(&per_trial.iter().map(|t| t.1).collect::<Vec<_>>());
    let formulas = NmseFormulas::new(alloc.scheme(), *p).with_jensen(variant);
    Ok(NmseReport {
        analytic_lr: formulas.nmse_l(alloc).unwrap_or(f64::NAN),
        analytic_ur: formulas.nmse_u(alloc).unwrap_or(f64::NAN),
        empirical_lr: lr.mean,
        empirical_ur: ur.mean,
        half_width_lr: lr.half_width,
        half_width_ur: ur.half_width,
        trials,
        resampled_trials: per_trial.iter().map(|t| t.2).sum(),
        jensen: variant,
    })
}
