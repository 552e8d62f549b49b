//! LMMSE estimators at the transmitter, the LR and the UR.
//!
//! Receivers know every second-order statistic (variances, AN power, the
//! transmitter's error variance) but no realizations.

use crate::analytic::{
    beta, lmmse_error_var, lr_noise_var_nonreciprocal, lr_noise_var_reciprocal,
    nmse_l_nonreciprocal_approx, nmse_l_reciprocal, round_trip_fraction, ur_noise_var,
    JensenVariant,
};
use crate::error::Result;
use crate::model::linalg::{hermitian_solve, lmmse_white};
use crate::model::{CMat, ForwardPhase, TrainingPhaseSignals, C64};
use crate::params::{echo_gain, NonReciprocalAllocation, ReciprocalAllocation, SystemParams};

type Params = SystemParams<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateWithError {
    pub estimate: CMat,
    /// Analytic per-entry error variance (conditional on `conditioning` when set).
    pub error_var: f64,
    /// Quantity the estimator conditioned on, e.g. the uplink estimate.
    pub conditioning: Option<CMat>,
}

impl EstimateWithError {
    fn plain(estimate: CMat, error_var: f64) -> Self {
        Self {
            estimate,
            error_var,
            conditioning: None,
        }
    }
}

/// Variance of the aggregate per-entry disturbance an estimator assumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseStats {
    pub effective_noise_var: f64,
}

/// Transmitter's downlink estimate from reciprocal reverse training
/// (estimates `Hᵀ`, returns `Ĥ = (Ĥᵀ)ᵀ`).
pub fn tx_estimate_reciprocal(
    rev: &TrainingPhaseSignals,
    p: &Params,
    e_r: f64,
) -> Result<EstimateWithError> {
    let ht = lmmse_white(&rev.transmit, &rev.received[0], p.var_h, p.var_wt)?;
    Ok(EstimateWithError::plain(
        ht.transpose(),
        lmmse_error_var(p.var_h, e_r, p.n_l, p.var_wt),
    ))
}

pub fn lr_noise_stats_reciprocal(p: &Params, a: &ReciprocalAllocation<f64>) -> NoiseStats {
    NoiseStats {
        effective_noise_var: lr_noise_var_reciprocal(p, a.e_r, a.var_a),
    }
}

/// LR's estimate of `H` from `Y_L`, treating leaked AN as white noise.
pub fn lr_estimate_reciprocal(
    fwd: &TrainingPhaseSignals,
    p: &Params,
    a: &ReciprocalAllocation<f64>,
) -> Result<EstimateWithError> {
    let noise = lr_noise_stats_reciprocal(p, a).effective_noise_var;
    let pilot = ForwardPhase::reciprocal(p, a).pilot(p.n_t);
    let est = lmmse_white(&pilot, &fwd.received[0], p.var_h, noise)?;
    Ok(EstimateWithError::plain(
        est,
        nmse_l_reciprocal(p, a.e_r, a.e_f, a.var_a),
    ))
}

/// UR's estimate of `G` from `Y_U`; AN is white with per-entry variance
/// `(N_t-N_L)·σ_a²·σ_G²`.
pub fn ur_estimate(
    fwd: &TrainingPhaseSignals,
    p: &Params,
    phase: ForwardPhase,
) -> Result<EstimateWithError> {
    let noise = ur_noise_var(p, phase.var_a);
    let est = lmmse_white(&phase.pilot(p.n_t), &fwd.received[1], p.var_g, noise)?;
    let err = lmmse_error_var(p.var_g, phase.energy / p.n_t as f64, 1, noise);
    Ok(EstimateWithError::plain(est, err))
}

/// Transmitter's estimate of the uplink `H_u` (`N_L × N_t`).
pub fn tx_estimate_uplink(
    rev: &TrainingPhaseSignals,
    p: &Params,
    e_2: f64,
) -> Result<EstimateWithError> {
    let est = lmmse_white(&rev.transmit, &rev.received[0], p.var_hu, p.var_wt)?;
    Ok(EstimateWithError::plain(
        est,
        lmmse_error_var(p.var_hu, e_2, p.n_l, p.var_wt),
    ))
}

/// Transmitter's estimate of the downlink `H_d` from the round-trip echo,
/// conditioned on the uplink estimate:
/// `k · X_t0ᴴ Y_t1 Ĥ_uᴴ (Ĥ_u Ĥ_uᴴ + β I)⁻¹` with
/// `k = σ_Hd² N_t / (α (σ_Hd² E_0 + N_t σ_w²))`.
pub fn tx_estimate_downlink(
    rt: &TrainingPhaseSignals,
    h_u_hat: &EstimateWithError,
    p: &Params,
    a: &NonReciprocalAllocation<f64>,
) -> Result<EstimateWithError> {
    let hu = &h_u_hat.estimate;
    let alpha = echo_gain(p, a.e_0, a.e_1);
    let b = beta(p, a.e_0, a.e_1, a.e_2);
    if !(alpha > 0.0) || !(a.e_0 > 0.0) || !b.is_finite() {
        return Ok(EstimateWithError {
            estimate: CMat::zeros(p.n_t, p.n_l),
            error_var: p.var_hd,
            conditioning: Some(hu.clone()),
        });
    }
    let n_t = p.n_t as f64;
    let k = p.var_hd * n_t / (alpha * (p.var_hd * a.e_0 + n_t * p.var_w));
    let mut m = hu * hu.adjoint();
    for i in 0..p.n_l {
        m[(i, i)] += b;
    }
    // (Ĥ_u Ĥ_uᴴ + βI)⁻¹ Ĥ_u, whose adjoint is the right factor
    let z = hermitian_solve(m.clone(), hu)?;
    let est = rt.transmit.adjoint() * &rt.received[1] * z.adjoint() * C64::from(k);

    // tr(P (P + βI)⁻¹) = N_L - β tr((P + βI)⁻¹)
    let inv = hermitian_solve(m, &CMat::identity(p.n_l, p.n_l))?;
    let tr_inv: f64 = (0..p.n_l).map(|i| inv[(i, i)].re).sum();
    let resolved = p.n_l as f64 - b * tr_inv;
    let err = p.var_hd - p.var_hd * round_trip_fraction(p, a.e_0) * resolved / p.n_l as f64;
    Ok(EstimateWithError {
        estimate: est,
        error_var: err,
        conditioning: Some(hu.clone()),
    })
}

pub fn lr_noise_stats_nonreciprocal(
    p: &Params,
    a: &NonReciprocalAllocation<f64>,
    variant: JensenVariant,
) -> NoiseStats {
    NoiseStats {
        effective_noise_var: lr_noise_var_nonreciprocal(p, a, variant),
    }
}

/// LR's estimate of `H_d` in the non-reciprocal protocol, using the
/// approximate disturbance variance.
pub fn lr_estimate_nonreciprocal(
    fwd: &TrainingPhaseSignals,
    p: &Params,
    a: &NonReciprocalAllocation<f64>,
    variant: JensenVariant,
) -> Result<EstimateWithError> {
    let noise = lr_noise_stats_nonreciprocal(p, a, variant).effective_noise_var;
    let pilot = ForwardPhase::nonreciprocal(p, a).pilot(p.n_t);
    let est = lmmse_white(&pilot, &fwd.received[0], p.var_hd, noise)?;
    Ok(EstimateWithError::plain(
        est,
        nmse_l_nonreciprocal_approx(p, a, variant),
    ))
}
