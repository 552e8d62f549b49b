//! Sampling check of the eigenvalue expectation behind the non-reciprocal
//! LR disturbance.

use rayon::prelude::*;

use super::Summary;
use crate::analytic::{beta, jensen_surrogate, JensenVariant};
use crate::error::{Error, Result};
use crate::estimation::tx_estimate_uplink;
use crate::model::rng::trial_rng;
use crate::model::{reverse_training, sample_channels};
use crate::params::{NonReciprocalAllocation, Scheme, SystemParams};

type Params = SystemParams<f64>;

/// Sample mean of `1/(β/λ + 1)` over the unordered eigenvalues `λ` of
/// `Ĥ_u Ĥ_uᴴ`, with `Ĥ_u` produced by simulated reverse training.
pub fn jensen_oracle(
    p: &Params,
    alloc: &NonReciprocalAllocation<f64>,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidParams("samples must be positive".into()));
    }
    let b = beta(p, alloc.e_0, alloc.e_1, alloc.e_2);
    let values = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let ch = sample_channels(p, Scheme::NonReciprocal, &mut rng);
            let rev = reverse_training(p, alloc.e_2, p.tau_2, &ch, &mut rng);
            let hu = tx_estimate_uplink(&rev, p, alloc.e_2)?.estimate;
            let eig = (&hu * hu.adjoint()).symmetric_eigenvalues();
            let f: f64 = eig.iter().map(|&l| resolved_share(b, l.max(0.0))).sum();
            Ok(f / p.n_l as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Summary::of(&values).mean)
}

/// `1/(β/λ + 1)` with the limits at `β = 0` and `β = ∞` taken exactly.
pub fn resolved_share(beta: f64, lambda: f64) -> f64 {
    if beta == 0.0 {
        1.0
    } else if !beta.is_finite() || lambda == 0.0 {
        0.0
    } else {
        lambda / (beta + lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JensenAdjudication {
    pub sampled: f64,
    pub printed: f64,
    pub sigma_squared: f64,
    pub closer: JensenVariant,
}

impl JensenAdjudication {
    pub fn error_of(&self, v: JensenVariant) -> f64 {
        let x = match v {
            JensenVariant::Printed => self.printed,
            JensenVariant::SigmaSquared => self.sigma_squared,
        };
        (x - self.sampled).abs()
    }
}

pub fn adjudicate_jensen(
    p: &Params,
    alloc: &NonReciprocalAllocation<f64>,
    samples: usize,
    seed: u64,
) -> Result<JensenAdjudication> {
    let sampled = jensen_oracle(p, alloc, samples, seed)?;
    let printed = jensen_surrogate(p, alloc, JensenVariant::Printed);
    let sigma_squared = jensen_surrogate(p, alloc, JensenVariant::SigmaSquared);
    let closer = if (sigma_squared - sampled).abs() < (printed - sampled).abs() {
        JensenVariant::SigmaSquared
    } else {
        JensenVariant::Printed
    };
    Ok(JensenAdjudication {
        sampled,
        printed,
        sigma_squared,
        closer,
    })
}
