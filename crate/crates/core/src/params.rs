//! System configuration and power-allocation value types.
//!
//! All powers, energies and variances are linear. Training energies are
//! `power × training length`, so an allocation is independent of how the
//! energy is spread over the training slots.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{count, db_to_linear, lit, Real};

/// Channel model between the transmitter and the legitimate receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Uplink is the transpose of the downlink (TDD).
    Reciprocal,
    /// Independent uplink and downlink (FDD); needs round-trip training.
    NonReciprocal,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Reciprocal => "reciprocal",
            Scheme::NonReciprocal => "non-reciprocal",
        })
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "reciprocal" | "rec" => Ok(Scheme::Reciprocal),
            "non-reciprocal" | "nonreciprocal" | "nonrec" => Ok(Scheme::NonReciprocal),
            other => Err(format!("unknown scheme '{other}'")),
        }
    }
}

/// Antenna counts, second-order statistics, training lengths and power limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    /// Transmit antennas.
    pub n_t: usize,
    /// Legitimate-receiver antennas.
    pub n_l: usize,
    /// Unauthorized-receiver antennas.
    pub n_u: usize,
    /// Reciprocal channel element variance.
    pub var_h: T,
    /// Non-reciprocal downlink element variance.
    pub var_hd: T,
    /// Non-reciprocal uplink element variance.
    pub var_hu: T,
    /// Transmitter-to-UR element variance.
    pub var_g: T,
    /// Noise at the LR.
    pub var_w: T,
    /// Noise at the transmitter.
    pub var_wt: T,
    /// Noise at the UR.
    pub var_v: T,
    pub tau_r: usize,
    pub tau_f: usize,
    pub tau_0: usize,
    pub tau_2: usize,
    pub tau_3: usize,
    /// Average power limit over the whole training block.
    pub p_ave: T,
    /// Transmitter individual power limit.
    pub p_bar_t: T,
    /// LR individual power limit.
    pub p_bar_l: T,
}

impl<T: Real> SystemParams<T> {
    /// The 4×2×2 reference setup: unit variances, minimum training lengths,
    /// transmitter limit 30 dB and LR limit 20 dB.
    pub fn reference(p_ave_db: T) -> Self {
        Self::with_antennas(4, 2, 2, p_ave_db)
    }

    /// Unit variances, training lengths equal to the sending terminal's antenna
    /// count, 30 dB / 20 dB individual limits.
    pub fn with_antennas(n_t: usize, n_l: usize, n_u: usize, p_ave_db: T) -> Self {
        let one = T::one();
        Self {
            n_t,
            n_l,
            n_u,
            var_h: one,
            var_hd: one,
            var_hu: one,
            var_g: one,
            var_w: one,
            var_wt: one,
            var_v: one,
            tau_r: n_l,
            tau_f: n_t,
            tau_0: n_t,
            tau_2: n_l,
            tau_3: n_t,
            p_ave: db_to_linear(p_ave_db),
            p_bar_t: db_to_linear(lit(30.0)),
            p_bar_l: db_to_linear(lit(20.0)),
        }
    }

    pub fn with_p_ave_db(mut self, db: T) -> Self {
        self.p_ave = db_to_linear(db);
        self
    }

    /// Number of AN dimensions, `N_t - N_L`.
    pub fn an_dims(&self) -> usize {
        self.n_t - self.n_l
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n_t < 2 {
            return bad(format!("n_t = {} must be at least 2", self.n_t));
        }
        if self.n_l == 0 || self.n_u == 0 {
            return bad("receiver antenna counts must be positive".into());
        }
        if self.n_t <= self.n_l {
            return bad(format!(
                "n_t = {} must exceed n_l = {} for a nonempty AN null space",
                self.n_t, self.n_l
            ));
        }
        if self.tau_f < self.n_t || self.tau_3 < self.n_t || self.tau_0 < self.n_t {
            return bad("forward and round-trip training must last at least n_t slots".into());
        }
        if self.tau_r < self.n_l || self.tau_2 < self.n_l {
            return bad("reverse training must last at least n_l slots".into());
        }
        let positive = [
            ("var_h", self.var_h),
            ("var_hd", self.var_hd),
            ("var_hu", self.var_hu),
            ("var_g", self.var_g),
            ("var_w", self.var_w),
            ("var_wt", self.var_wt),
            ("var_v", self.var_v),
            ("p_ave", self.p_ave),
            ("p_bar_t", self.p_bar_t),
            ("p_bar_l", self.p_bar_l),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return bad(format!("{name} = {v} must be finite and > 0"));
            }
        }
        Ok(())
    }

    /// Converts every real field to another scalar type.
    pub fn cast<U: Real>(&self) -> SystemParams<U> {
        let c = |x: T| U::from(x).expect("castable");
        SystemParams {
            n_t: self.n_t,
            n_l: self.n_l,
            n_u: self.n_u,
            var_h: c(self.var_h),
            var_hd: c(self.var_hd),
            var_hu: c(self.var_hu),
            var_g: c(self.var_g),
            var_w: c(self.var_w),
            var_wt: c(self.var_wt),
            var_v: c(self.var_v),
            tau_r: self.tau_r,
            tau_f: self.tau_f,
            tau_0: self.tau_0,
            tau_2: self.tau_2,
            tau_3: self.tau_3,
            p_ave: c(self.p_ave),
            p_bar_t: c(self.p_bar_t),
            p_bar_l: c(self.p_bar_l),
        }
    }
}

/// Reverse/forward energies and AN variance for reciprocal channels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReciprocalAllocation<T> {
    pub e_r: T,
    pub e_f: T,
    /// Per-entry AN variance.
    pub var_a: T,
}

/// Round-trip, echo, reverse and forward energies plus AN variance for
/// non-reciprocal channels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NonReciprocalAllocation<T> {
    pub e_0: T,
    pub e_1: T,
    pub e_2: T,
    pub e_3: T,
    pub var_a: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerAllocation<T> {
    Reciprocal(ReciprocalAllocation<T>),
    NonReciprocal(NonReciprocalAllocation<T>),
}

impl<T: Real> PowerAllocation<T> {
    pub fn scheme(&self) -> Scheme {
        match self {
            PowerAllocation::Reciprocal(_) => Scheme::Reciprocal,
            PowerAllocation::NonReciprocal(_) => Scheme::NonReciprocal,
        }
    }

    pub fn var_a(&self) -> T {
        match self {
            PowerAllocation::Reciprocal(a) => a.var_a,
            PowerAllocation::NonReciprocal(a) => a.var_a,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        let ge0 = |x: T| x >= T::zero();
        match self {
            PowerAllocation::Reciprocal(a) => ge0(a.e_r) && ge0(a.e_f) && ge0(a.var_a),
            PowerAllocation::NonReciprocal(a) => {
                ge0(a.e_0) && ge0(a.e_1) && ge0(a.e_2) && ge0(a.e_3) && ge0(a.var_a)
            }
        }
    }
}

impl<T: Real> ReciprocalAllocation<T> {
    /// AN energy spent during forward training, `(N_t-N_L)·σ_a²·τ_F`.
    pub fn an_energy(&self, params: &SystemParams<T>) -> T {
        count::<T>(params.an_dims()) * self.var_a * count(params.tau_f)
    }
}

impl<T: Real> NonReciprocalAllocation<T> {
    /// Amplify-and-forward gain applied by the LR to its round-trip echo.
    pub fn echo_gain(&self, params: &SystemParams<T>) -> T {
        echo_gain(params, self.e_0, self.e_1)
    }

    /// AN energy spent during forward training, `(N_t-N_L)·σ_a²·τ_3`.
    pub fn an_energy(&self, params: &SystemParams<T>) -> T {
        count::<T>(params.an_dims()) * self.var_a * count(params.tau_3)
    }
}

/// `α = sqrt(E_1 / (E_0·N_L·σ_Hd² + τ_0·N_L·σ_w²))`.
pub fn echo_gain<T: Real>(params: &SystemParams<T>, e_0: T, e_1: T) -> T {
    let n_l = count::<T>(params.n_l);
    let denom = e_0 * n_l * params.var_hd + count::<T>(params.tau_0) * n_l * params.var_w;
    (e_1 / denom).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_setup_is_valid() {
        let p = SystemParams::<f64>::reference(20.0);
        p.validate().unwrap();
        assert_eq!(
            (p.tau_r, p.tau_f, p.tau_0, p.tau_2, p.tau_3),
            (2, 4, 4, 2, 4)
        );
        assert!((p.p_ave - 100.0).abs() < 1e-9);
        assert!((p.p_bar_t - 1000.0).abs() < 1e-9);
        assert!((p.p_bar_l - 100.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_square_transmitter() {
        let mut p = SystemParams::<f64>::reference(20.0);
        p.n_l = 4;
        p.tau_r = 4;
        p.tau_2 = 4;
        assert!(matches!(p.validate(), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn rejects_nonpositive_variance() {
        let mut p = SystemParams::<f64>::reference(20.0);
        p.var_v = 0.0;
        assert!(p.validate().is_err());
        let mut p = SystemParams::<f64>::reference(20.0);
        p.p_bar_l = f64::NAN;
        assert!(p.validate().is_err());
    }

    #[test]
    fn rejects_short_training() {
        let mut p = SystemParams::<f64>::reference(20.0);
        p.tau_f = 3;
        assert!(p.validate().is_err());
    }

    #[test]
    fn echo_gain_matches_hand_value() {
        // E_0 = E_1 = 4, tau_0 = 4, N_L = 2, unit variances: sqrt(4 / (8 + 8)).
        let p = SystemParams::<f64>::reference(20.0);
        assert!((echo_gain(&p, 4.0, 4.0) - 0.5).abs() < 1e-15);
        assert_eq!(echo_gain(&p, 4.0, 0.0), 0.0);
    }

    #[test]
    fn scheme_parses() {
        assert_eq!("reciprocal".parse::<Scheme>().unwrap(), Scheme::Reciprocal);
        assert_eq!(
            "non-reciprocal".parse::<Scheme>().unwrap(),
            Scheme::NonReciprocal
        );
        assert!("tdd".parse::<Scheme>().is_err());
        assert_eq!(Scheme::NonReciprocal.to_string(), "non-reciprocal");
    }

    #[test]
    fn casts_to_f32() {
        let p = SystemParams::<f64>::reference(25.0).cast::<f32>();
        assert!(p.validate().is_ok());
        assert!((p.p_ave - 316.227_77).abs() < 1e-2);
    }
}
