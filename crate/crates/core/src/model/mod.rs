//! Channel draws and training-phase signal construction.
//!
//! Conventions: a transmit block is `τ × (antennas)`, a channel maps sender
//! antennas (rows) to receiver antennas (columns), so `Y = X·H + noise`.

pub mod linalg;
pub mod rng;

use nalgebra::{Complex, DMatrix};
use rand::Rng;

use crate::error::Result;
use crate::params::{
    echo_gain, NonReciprocalAllocation, ReciprocalAllocation, Scheme, SystemParams,
};
use linalg::{fro_sq, null_space_basis, pilot_matrix, random_semi_unitary};
use rng::gaussian_matrix;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// One draw of every channel matrix in the model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Transmitter to LR, `N_t × N_L`.
    pub h_d: CMat,
    /// LR to transmitter, `N_L × N_t`; the transpose of `h_d` when reciprocal.
    pub h_u: CMat,
    /// Transmitter to UR, `N_t × N_U`.
    pub g: CMat,
}

pub fn sample_channels<R: Rng + ?Sized>(
    p: &SystemParams<f64>,
    scheme: Scheme,
    rng: &mut R,
) -> ChannelRealization {
    let (h_d, h_u) = match scheme {
        Scheme::Reciprocal => {
            let h = gaussian_matrix(rng, p.n_t, p.n_l, p.var_h);
            let t = h.transpose();
            (h, t)
        }
        Scheme::NonReciprocal => {
            let d = gaussian_matrix(rng, p.n_t, p.n_l, p.var_hd);
            let u = gaussian_matrix(rng, p.n_l, p.n_t, p.var_hu);
            (d, u)
        }
    };
    let g = gaussian_matrix(rng, p.n_t, p.n_u, p.var_g);
    ChannelRealization { h_d, h_u, g }
}

/// What was sent and what each terminal received during one phase.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPhaseSignals {
    pub transmit: CMat,
    /// Forward: `[Y_L, Y_U]`. Reverse: `[Y_t]`. Round trip: `[Y_L0, Y_t1]`.
    pub received: Vec<CMat>,
    /// `τ × (N_t-N_L)` AN samples (forward phase with AN only).
    pub an_matrix: Option<CMat>,
    /// Orthonormal null-space basis the AN was steered through.
    pub an_basis: Option<CMat>,
}

/// Energy, AN variance and length of a forward-training phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardPhase {
    pub energy: f64,
    pub var_a: f64,
    pub tau: usize,
}

impl ForwardPhase {
    pub fn reciprocal(p: &SystemParams<f64>, a: &ReciprocalAllocation<f64>) -> Self {
        Self {
            energy: a.e_f,
            var_a: a.var_a,
            tau: p.tau_f,
        }
    }

    pub fn nonreciprocal(p: &SystemParams<f64>, a: &NonReciprocalAllocation<f64>) -> Self {
        Self {
            energy: a.e_3,
            var_a: a.var_a,
            tau: p.tau_3,
        }
    }

    /// Pilot block `sqrt(E/N_t)·C_t`.
    pub fn pilot(&self, n_t: usize) -> CMat {
        pilot_matrix(self.tau, n_t) * C64::from((self.energy / n_t as f64).sqrt())
    }
}

/// LR to transmitter pilot: `Y_t = sqrt(E/N_L)·C_L·H_u + W̃`.
pub fn reverse_training<R: Rng + ?Sized>(
    p: &SystemParams<f64>,
    energy: f64,
    tau: usize,
    ch: &ChannelRealization,
    rng: &mut R,
) -> TrainingPhaseSignals {
    let x = pilot_matrix(tau, p.n_l) * C64::from((energy / p.n_l as f64).sqrt());
    let y = &x * &ch.h_u + gaussian_matrix(rng, tau, p.n_t, p.var_wt);
    TrainingPhaseSignals {
        transmit: x,
        received: vec![y],
        an_matrix: None,
        an_basis: None,
    }
}

/// Private random broadcast followed by the LR's amplify-and-forward echo.
pub fn round_trip_training<R: Rng + ?Sized>(
    p: &SystemParams<f64>,
    e_0: f64,
    e_1: f64,
    ch: &ChannelRealization,
    rng: &mut R,
) -> TrainingPhaseSignals {
    let c = random_semi_unitary(rng, p.tau_0, p.n_t);
    let x = c * C64::from((e_0 / p.n_t as f64).sqrt());
    let y_l0 = &x * &ch.h_d + gaussian_matrix(rng, p.tau_0, p.n_l, p.var_w);
    let alpha = echo_gain(p, e_0, e_1);
    let y_t1 = &y_l0 * &ch.h_u * C64::from(alpha) + gaussian_matrix(rng, p.tau_0, p.n_t, p.var_wt);
    TrainingPhaseSignals {
        transmit: x,
        received: vec![y_l0, y_t1],
        an_matrix: None,
        an_basis: None,
    }
}

/// Forward pilot plus AN steered into the null space of the transmitter's
/// downlink estimate. An all-zero estimate carries no direction, so the AN
/// basis is then drawn at random.
pub fn forward_training<R: Rng + ?Sized>(
    p: &SystemParams<f64>,
    phase: ForwardPhase,
    h_d_hat: &CMat,
    ch: &ChannelRealization,
    rng: &mut R,
) -> Result<TrainingPhaseSignals> {
    let mut x = phase.pilot(p.n_t);
    let (mut an_matrix, mut an_basis) = (None, None);
    if phase.var_a > 0.0 {
        let basis = if fro_sq(h_d_hat) == 0.0 {
            random_semi_unitary(rng, p.n_t, p.n_t)
                .columns(p.n_l, p.an_dims())
                .into_owned()
        } else {
            null_space_basis(h_d_hat)?
        };
        let a = gaussian_matrix(rng, phase.tau, p.an_dims(), phase.var_a);
        x += &a * basis.adjoint();
        an_matrix = Some(a);
        an_basis = Some(basis);
    }
    let y_l = &x * &ch.h_d + gaussian_matrix(rng, phase.tau, p.n_l, p.var_w);
    let y_u = &x * &ch.g + gaussian_matrix(rng, phase.tau, p.n_u, p.var_v);
    Ok(TrainingPhaseSignals {
        transmit: x,
        received: vec![y_l, y_u],
        an_matrix,
        an_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rng::make_rng;

    fn params() -> SystemParams<f64> {
        SystemParams::reference(20.0)
    }

    #[test]
    fn reciprocal_channels_are_transposes() {
        let mut rng = make_rng(1);
        let ch = sample_channels(&params(), Scheme::Reciprocal, &mut rng);
        assert_eq!(ch.h_d.shape(), (4, 2));
        assert_eq!(ch.h_u.shape(), (2, 4));
        assert_eq!(ch.g.shape(), (4, 2));
        assert_eq!(ch.h_u, ch.h_d.transpose());
    }

    #[test]
    fn channel_moments() {
        let p = params();
        let mut rng = make_rng(2);
        let trials = 10_000;
        let (mut pow, mut cross) = (0.0, C64::new(0.0, 0.0));
        for _ in 0..trials {
            let ch = sample_channels(&p, Scheme::NonReciprocal, &mut rng);
            pow += ch.h_d[(0, 0)].norm_sqr();
            cross += ch.h_d[(0, 0)] * ch.h_u[(0, 0)].conj();
        }
        let pow = pow / trials as f64;
        let cross = cross / trials as f64;
        assert!((0.97..=1.03).contains(&pow), "{pow}");
        assert!(cross.norm() < 0.03, "{cross}");
    }

    #[test]
    fn forward_without_an_is_plain_pilot() {
        let p = params();
        let mut rng = make_rng(3);
        let ch = sample_channels(&p, Scheme::Reciprocal, &mut rng);
        let phase = ForwardPhase {
            energy: 4.0,
            var_a: 0.0,
            tau: 4,
        };
        let s = forward_training(&p, phase, &ch.h_d, &ch, &mut rng).unwrap();
        assert_eq!(s.transmit, phase.pilot(4));
        assert!(s.an_matrix.is_none());
        // per-row pilot power E_F / tau_F = 1
        for r in 0..4 {
            let pw: f64 = s.transmit.row(r).iter().map(|z| z.norm_sqr()).sum();
            assert!((pw - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn an_is_invisible_with_perfect_csi() {
        let p = params();
        let mut rng = make_rng(4);
        let ch = sample_channels(&p, Scheme::Reciprocal, &mut rng);
        let phase = ForwardPhase {
            energy: 4.0,
            var_a: 50.0,
            tau: 4,
        };
        let s = forward_training(&p, phase, &ch.h_d, &ch, &mut rng).unwrap();
        let leak = s.an_matrix.unwrap() * s.an_basis.unwrap().adjoint() * &ch.h_d;
        assert!(fro_sq(&leak).sqrt() < 1e-10);
    }

    #[test]
    fn reverse_pilot_energy_and_silence() {
        let p = params();
        let mut rng = make_rng(5);
        let ch = sample_channels(&p, Scheme::Reciprocal, &mut rng);
        let s = reverse_training(&p, 2.0, 2, &ch, &mut rng);
        assert!((fro_sq(&s.transmit) - 2.0).abs() < 1e-12);

        let trials = 10_000;
        let mut pow = 0.0;
        for _ in 0..trials {
            let s = reverse_training(&p, 0.0, 2, &ch, &mut rng);
            pow += fro_sq(&s.received[0]) / 8.0;
        }
        assert!((pow / trials as f64 - 1.0).abs() < 0.03);
    }

    #[test]
    fn zero_echo_is_pure_noise() {
        let p = params();
        let mut rng = make_rng(6);
        let ch = sample_channels(&p, Scheme::NonReciprocal, &mut rng);
        let mut a = make_rng(60);
        let mut b = make_rng(60);
        let s = round_trip_training(&p, 4.0, 0.0, &ch, &mut a);
        // replay the draws: unitary, W_0, then W̃_1
        let _ = random_semi_unitary(&mut b, 4, 4);
        let _ = gaussian_matrix(&mut b, 4, 2, 1.0);
        let w1 = gaussian_matrix(&mut b, 4, 4, 1.0);
        assert_eq!(s.received[1], w1);
    }

    #[test]
    fn echo_energy_matches_budget() {
        let p = params();
        let mut rng = make_rng(7);
        let (e_0, e_1) = (10.0, 6.0);
        let alpha = echo_gain(&p, e_0, e_1);
        let trials = 10_000;
        let mut energy = 0.0;
        for _ in 0..trials {
            let ch = sample_channels(&p, Scheme::NonReciprocal, &mut rng);
            let s = round_trip_training(&p, e_0, e_1, &ch, &mut rng);
            energy += alpha * alpha * fro_sq(&s.received[0]);
        }
        let mean = energy / trials as f64;
        assert!((mean / e_1 - 1.0).abs() < 0.03, "{mean}");
    }

    #[test]
    fn forward_energy_accounting() {
        let p = params();
        let mut rng = make_rng(8);
        let phase = ForwardPhase {
            energy: 4.0,
            var_a: 0.5,
            tau: 4,
        };
        let trials = 10_000;
        let mut energy = 0.0;
        for _ in 0..trials {
            let ch = sample_channels(&p, Scheme::Reciprocal, &mut rng);
            let s = forward_training(&p, phase, &ch.h_d, &ch, &mut rng).unwrap();
            energy += fro_sq(&s.transmit);
        }
        let expected = 4.0 + 2.0 * 0.5 * 4.0;
        assert!((energy / trials as f64 / expected - 1.0).abs() < 0.03);
    }

    #[test]
    fn zero_estimate_uses_random_an_basis() {
        let p = params();
        let mut rng = make_rng(9);
        let ch = sample_channels(&p, Scheme::Reciprocal, &mut rng);
        let phase = ForwardPhase {
            energy: 4.0,
            var_a: 1.0,
            tau: 4,
        };
        let s = forward_training(&p, phase, &CMat::zeros(4, 2), &ch, &mut rng).unwrap();
        let n = s.an_basis.unwrap();
        assert!(fro_sq(&(n.adjoint() * &n - CMat::identity(2, 2))).sqrt() < 1e-12);
    }

    #[test]
    fn whole_phase_is_deterministic() {
        let p = params();
        let run = || {
            let mut rng = rng::trial_rng(99, 3);
            let ch = sample_channels(&p, Scheme::Reciprocal, &mut rng);
            let phase = ForwardPhase {
                energy: 4.0,
                var_a: 1.0,
                tau: 4,
            };
            forward_training(&p, phase, &ch.h_d, &ch, &mut rng).unwrap()
        };
        assert_eq!(run(), run());
    }
}
