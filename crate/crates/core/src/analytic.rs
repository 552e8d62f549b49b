//! Closed-form NMSE evaluators and the derived constants shared by both
//! allocators.
//!
//! Every NMSE here is per channel entry, so the prior variance is the value
//! reached with no training at all.

use std::fmt;
use std::str::FromStr;

use crate::params::{echo_gain, NonReciprocalAllocation, PowerAllocation, Scheme, SystemParams};
use crate::scalar::{count, Real};

/// Surrogate for `E{1/(β/λ+1)}` over the unordered eigenvalue `λ` of `Ĥ_u Ĥ_uᴴ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum JensenVariant {
    /// `N_t·σ / (β + N_t·σ)`, with `σ = sqrt(σ²)`.
    #[default]
    Printed,
    /// `N_t·σ² / (β + N_t·σ²)`, i.e. the eigenvalue mean plugged in.
    SigmaSquared,
}

impl fmt::Display for JensenVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JensenVariant::Printed => "printed",
            JensenVariant::SigmaSquared => "sigma-squared",
        })
    }
}

impl FromStr for JensenVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "printed" => Ok(JensenVariant::Printed),
            "sigma-squared" | "sigma_squared" | "sigma2" => Ok(JensenVariant::SigmaSquared),
            other => Err(format!("unknown jensen variant '{other}'")),
        }
    }
}

/// Per-entry LMMSE error variance `(1/σ_prior² + E/(n·σ_noise²))^-1` for a
/// semi-unitary pilot carrying energy `e` from `n` antennas. Written so that
/// zero energy returns the prior bit-exactly.
pub fn lmmse_error_var<T: Real>(var_prior: T, energy: T, n: usize, var_noise: T) -> T {
    var_prior / (T::one() + var_prior * energy / (count::<T>(n) * var_noise))
}

/// Per-entry disturbance seen by the LR in reciprocal forward training:
/// `(N_t-N_L)·e_tx·σ_a² + σ_w²`, where `e_tx` is the transmitter's error variance.
pub fn lr_noise_var_reciprocal<T: Real>(p: &SystemParams<T>, e_r: T, var_a: T) -> T {
    let e_tx = lmmse_error_var(p.var_h, e_r, p.n_l, p.var_wt);
    count::<T>(p.an_dims()) * e_tx * var_a + p.var_w
}

/// LR NMSE for reciprocal channels.
pub fn nmse_l_reciprocal<T: Real>(p: &SystemParams<T>, e_r: T, e_f: T, var_a: T) -> T {
    lmmse_error_var(p.var_h, e_f, p.n_t, lr_noise_var_reciprocal(p, e_r, var_a))
}

/// Per-entry disturbance at the UR: `(N_t-N_L)·σ_a²·σ_G² + σ_v²`.
pub fn ur_noise_var<T: Real>(p: &SystemParams<T>, var_a: T) -> T {
    count::<T>(p.an_dims()) * var_a * p.var_g + p.var_v
}

/// UR NMSE for reciprocal channels (forward energy `e_f`).
pub fn nmse_u_reciprocal<T: Real>(p: &SystemParams<T>, e_f: T, var_a: T) -> T {
    lmmse_error_var(p.var_g, e_f, p.n_t, ur_noise_var(p, var_a))
}

/// UR NMSE for non-reciprocal channels (forward energy `e_3`); same form as
/// the reciprocal case.
pub fn nmse_u_nonreciprocal<T: Real>(p: &SystemParams<T>, e_3: T, var_a: T) -> T {
    nmse_u_reciprocal(p, e_3, var_a)
}

/// Variance of each entry of the uplink estimate Ĥ_u:
/// `σ_Hu⁴·E_2 / (σ_Hu²·E_2 + N_L·σ_w̃²)`.
pub fn sigma_sq<T: Real>(p: &SystemParams<T>, e_2: T) -> T {
    let v = p.var_hu;
    v * v * e_2 / (v * e_2 + count::<T>(p.n_l) * p.var_wt)
}

/// Regularizer of the transmitter's downlink estimator. Infinite when the
/// echo gain is zero (no round-trip information).
pub fn beta<T: Real>(p: &SystemParams<T>, e_0: T, e_1: T, e_2: T) -> T {
    let alpha = echo_gain(p, e_0, e_1);
    let uplink_err = count::<T>(p.n_l) * lmmse_error_var(p.var_hu, e_2, p.n_l, p.var_wt);
    if alpha <= T::zero() {
        return T::infinity();
    }
    let prior = (p.var_hd.recip() + e_0 / (count::<T>(p.n_t) * p.var_w)).recip();
    uplink_err + p.var_wt / (alpha * alpha * p.var_hd * p.var_w) * prior
}

/// `σ_Hd²·E_0 / (σ_Hd²·E_0 + N_t·σ_w²)`: the fraction of downlink power the
/// round-trip phase can resolve.
pub fn round_trip_fraction<T: Real>(p: &SystemParams<T>, e_0: T) -> T {
    let s = p.var_hd * e_0;
    s / (s + count::<T>(p.n_t) * p.var_w)
}

/// Surrogate for `E{1/(β/λ+1)}`; zero when either β is infinite or σ² is zero.
pub fn jensen_surrogate<T: Real>(
    p: &SystemParams<T>,
    alloc: &NonReciprocalAllocation<T>,
    variant: JensenVariant,
) -> T {
    let b = beta(p, alloc.e_0, alloc.e_1, alloc.e_2);
    let s2 = sigma_sq(p, alloc.e_2);
    let spread = match variant {
        JensenVariant::Printed => s2.sqrt(),
        JensenVariant::SigmaSquared => s2,
    };
    let m = count::<T>(p.n_t) * spread;
    if !b.is_finite() || m <= T::zero() {
        return T::zero();
    }
    m / (b + m)
}

/// Per-entry disturbance seen by the LR in non-reciprocal forward training,
/// with the eigenvalue expectation replaced by its surrogate.
pub fn lr_noise_var_nonreciprocal<T: Real>(
    p: &SystemParams<T>,
    alloc: &NonReciprocalAllocation<T>,
    variant: JensenVariant,
) -> T {
    let leak = p.var_hd
        - p.var_hd * round_trip_fraction(p, alloc.e_0) * jensen_surrogate(p, alloc, variant);
    count::<T>(p.an_dims()) * alloc.var_a * leak + p.var_w
}

/// Approximate LR NMSE for non-reciprocal channels.
pub fn nmse_l_nonreciprocal_approx<T: Real>(
    p: &SystemParams<T>,
    alloc: &NonReciprocalAllocation<T>,
    variant: JensenVariant,
) -> T {
    lmmse_error_var(
        p.var_hd,
        alloc.e_3,
        p.n_t,
        lr_noise_var_nonreciprocal(p, alloc, variant),
    )
}

/// `γ̃ = (1/γ - 1/σ_G²)·N_t·σ_v²`: the largest AN-free forward energy that
/// keeps the UR NMSE at or above `γ`.
pub fn gamma_tilde<T: Real>(p: &SystemParams<T>, gamma: T) -> T {
    (gamma.recip() - p.var_g.recip()) * count::<T>(p.n_t) * p.var_v
}

/// Threshold on the reverse energy above which AN starts paying off.
pub fn mu<T: Real>(p: &SystemParams<T>) -> T {
    count::<T>(p.n_l) * (p.var_v * p.var_wt / (p.var_g * p.var_w) - p.var_wt / p.var_h)
}

/// Largest forward-training energy the transmitter can spend under the
/// scheme's budgets.
pub fn max_forward_energy<T: Real>(p: &SystemParams<T>, scheme: Scheme) -> T {
    match scheme {
        Scheme::Reciprocal => {
            let tx = p.p_bar_t * count(p.tau_f);
            let avg = p.p_ave * count(p.tau_r + p.tau_f);
            tx.min(avg)
        }
        Scheme::NonReciprocal => {
            let tx = p.p_bar_t * count(p.tau_0 + p.tau_3);
            let avg = p.p_ave * count(2 * p.tau_0 + p.tau_2 + p.tau_3);
            tx.min(avg)
        }
    }
}

/// `(γ_min, γ_max)`: the UR NMSE reachable without AN at full forward energy,
/// and the prior variance.
pub fn gamma_bounds<T: Real>(p: &SystemParams<T>, scheme: Scheme) -> (T, T) {
    let e = max_forward_energy(p, scheme);
    let lo = (p.var_g.recip() + e / (count::<T>(p.n_t) * p.var_v)).recip();
    (lo, p.var_g)
}

/// LR NMSE with no AN and all admissible energy in forward training.
pub fn nmse_lower_bound<T: Real>(p: &SystemParams<T>, scheme: Scheme) -> T {
    let (n_t, n_l) = (p.n_t, p.n_l);
    let (prior, budget) = match scheme {
        Scheme::Reciprocal => (
            p.var_h,
            (p.p_bar_t * count(n_t)).min(p.p_ave * count(n_l + n_t)),
        ),
        Scheme::NonReciprocal => (
            p.var_hd,
            (lit2(p.p_bar_t) * count(n_t)).min(p.p_ave * count(3 * n_t + n_l)),
        ),
    };
    (prior.recip() + budget / (count::<T>(n_t) * p.var_w)).recip()
}

fn lit2<T: Real>(x: T) -> T {
    x + x
}

/// Constants that recur across both allocators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants<T> {
    pub gamma_tilde: T,
    pub mu: T,
    /// Entry variance of Ĥ_u (non-reciprocal only; zero otherwise).
    pub sigma_sq: T,
    /// Downlink-estimator regularizer (non-reciprocal only; zero otherwise).
    pub beta: T,
}

impl<T: Real> DerivedConstants<T> {
    pub fn new(p: &SystemParams<T>, gamma: T, alloc: Option<&NonReciprocalAllocation<T>>) -> Self {
        let (sigma_sq, beta) = match alloc {
            Some(a) => (sigma_sq(p, a.e_2), beta(p, a.e_0, a.e_1, a.e_2)),
            None => (T::zero(), T::zero()),
        };
        Self {
            gamma_tilde: gamma_tilde(p, gamma),
            mu: mu(p),
            sigma_sq,
            beta,
        }
    }
}

/// Scheme-aware front end over the free functions above.
#[derive(Debug, Clone, Copy)]
pub struct NmseFormulas<T> {
    pub scheme: Scheme,
    pub params: SystemParams<T>,
    pub jensen: JensenVariant,
}

impl<T: Real> NmseFormulas<T> {
    pub fn new(scheme: Scheme, params: SystemParams<T>) -> Self {
        Self {
            scheme,
            params,
            jensen: JensenVariant::default(),
        }
    }

    pub fn with_jensen(mut self, variant: JensenVariant) -> Self {
        self.jensen = variant;
        self
    }

    /// LR NMSE; `None` when the allocation belongs to the other scheme.
    pub fn nmse_l(&self, alloc: &PowerAllocation<T>) -> Option<T> {
        match (self.scheme, alloc) {
            (Scheme::Reciprocal, PowerAllocation::Reciprocal(a)) => {
                Some(nmse_l_reciprocal(&self.params, a.e_r, a.e_f, a.var_a))
            }
            (Scheme::NonReciprocal, PowerAllocation::NonReciprocal(a)) => {
                Some(nmse_l_nonreciprocal_approx(&self.params, a, self.jensen))
            }
            _ => None,
        }
    }

    pub fn nmse_u(&self, alloc: &PowerAllocation<T>) -> Option<T> {
        match (self.scheme, alloc) {
            (Scheme::Reciprocal, PowerAllocation::Reciprocal(a)) => {
                Some(nmse_u_reciprocal(&self.params, a.e_f, a.var_a))
            }
            (Scheme::NonReciprocal, PowerAllocation::NonReciprocal(a)) => {
                Some(nmse_u_nonreciprocal(&self.params, a.e_3, a.var_a))
            }
            _ => None,
        }
    }

    pub fn lower_bound(&self) -> T {
        nmse_lower_bound(&self.params, self.scheme)
    }
}
