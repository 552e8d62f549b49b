//! Symbol error rate of a rate-3/4 orthogonal space-time block code decoded
//! with each receiver's own channel estimate.
//!
//! Code matrix (rows are slots, columns are antennas):
//!
//! ```text
//!  s1    s2    s3    0
//! -s2*   s1*   0     s3
//! -s3*   0     s1*  -s2
//!  0    -s3*   s2*   s1
//! ```
//!
//! Every row carries three unit-power symbols, so the block is scaled by
//! `sqrt(P_ave/3)` to put `P_ave` on the air in each slot. Data-phase noise
//! has the same variance as in training. No AN is sent with data.

use rayon::prelude::*;

use super::{simulate_with_redraws, Summary};
use crate::analytic::JensenVariant;
use crate::error::{Error, Result};
use crate::model::linalg::fro_sq;
use crate::model::rng::{gaussian_matrix, trial_rng};
use crate::model::{CMat, C64};
use crate::params::{PowerAllocation, SystemParams};
use rand::Rng;

type Params = SystemParams<f64>;

pub const CODE_NAME: &str = "ostbc-4x4-rate3/4";
const SLOTS: usize = 4;
const ANTENNAS: usize = 4;
const SYMBOLS: usize = 3;

/// Code block for symbols `s`; rows are time slots, columns antennas.
#[rustfmt::skip]
pub fn ostbc_block(s: &[C64; SYMBOLS]) -> CMat {
    let z = C64::new(0.0, 0.0);
    let [s1, s2, s3] = *s;
    CMat::from_row_slice(SLOTS, ANTENNAS, &[
         s1,          s2,          s3,          z,
        -s2.conj(),   s1.conj(),   z,           s3,
        -s3.conj(),   z,           s1.conj(),  -s2,
         z,          -s3.conj(),   s2.conj(),   s1,
    ])
}

/// Blocks for the six real coordinates `(Re s_k, Im s_k)`.
fn basis_blocks() -> Vec<CMat> {
    let mut out = Vec::with_capacity(2 * SYMBOLS);
    for k in 0..SYMBOLS {
        for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            let mut s = [C64::new(0.0, 0.0); SYMBOLS];
            s[k] = unit;
            out.push(ostbc_block(&s));
        }
    }
    out
}

/// Square QAM with unit average energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qam {
    pub order: usize,
    side: usize,
    scale: f64,
}

impl Qam {
    pub fn new(order: usize) -> Result<Self> {
        if !matches!(order, 4 | 16 | 64) {
            return Err(Error::InvalidParams(format!(
                "QAM order {order} not in {{4, 16, 64}}"
            )));
        }
        let side = (order as f64).sqrt().round() as usize;
        Ok(Self {
            order,
            side,
            scale: (2.0 * (order as f64 - 1.0) / 3.0).sqrt().recip(),
        })
    }

    fn level(&self, i: usize) -> f64 {
        (2.0 * i as f64 - (self.side as f64 - 1.0)) * self.scale
    }

    pub fn point(&self, index: usize) -> C64 {
        C64::new(self.level(index % self.side), self.level(index / self.side))
    }

    fn slice(&self, x: f64) -> usize {
        let i = ((x / self.scale + (self.side as f64 - 1.0)) / 2.0).round();
        i.clamp(0.0, (self.side - 1) as f64) as usize
    }

    pub fn detect(&self, z: C64) -> usize {
        self.slice(z.re) + self.side * self.slice(z.im)
    }
}

/// Linear combiner: matched filter on the real-equivalent model, normalized
/// by `‖Ĥ‖²`. Exact for the true channel because the code is orthogonal.
pub fn ostbc_combine(y: &CMat, h_hat: &CMat, amplitude: f64) -> [C64; SYMBOLS] {
    let norm = fro_sq(h_hat) * amplitude;
    let mut coords = [0.0; 2 * SYMBOLS];
    if norm > 0.0 {
        for (c, b) in coords.iter_mut().zip(basis_blocks()) {
            let col = &b * h_hat;
            *c = col
                .iter()
                .zip(y.iter())
                .map(|(a, v)| (a.conj() * v).re)
                .sum::<f64>()
                / norm;
        }
    }
    std::array::from_fn(|k| C64::new(coords[2 * k], coords[2 * k + 1]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerOptions {
    pub qam_order: usize,
    pub trials: usize,
    pub seed: u64,
    /// Give the LR the true downlink instead of its estimate.
    pub perfect_csi_lr: bool,
    pub jensen: JensenVariant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SerReport {
    pub ser_lr: f64,
    pub ser_ur: f64,
    pub half_width_lr: f64,
    pub half_width_ur: f64,
    pub trials: usize,
    pub qam_order: usize,
    pub code: &'static str,
}

/// One channel realization and one code block per trial.
pub fn run_ser_experiment(
    p: &Params,
    alloc: &PowerAllocation<f64>,
    opts: &SerOptions,
) -> Result<SerReport> {
    p.validate()?;
    if p.n_t != ANTENNAS {
        return Err(Error::UnsupportedGeometry(format!(
            "the code needs n_t = 4, got {}",
            p.n_t
        )));
    }
    if opts.trials == 0 {
        return Err(Error::InvalidParams("trials must be positive".into()));
    }
    let qam = Qam::new(opts.qam_order)?;
    let amplitude = (p.p_ave / SYMBOLS as f64).sqrt();
    let per_trial = (0..opts.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(opts.seed, i as u64);
            let (o, _) = simulate_with_redraws(p, alloc, opts.jensen, &mut rng)?;
            let idx: [usize; SYMBOLS] = std::array::from_fn(|_| rng.random_range(0..qam.order));
            let s = idx.map(|k| qam.point(k));
            let x = ostbc_block(&s) * C64::from(amplitude);
            let y_l = &x * &o.channels.h_d + gaussian_matrix(&mut rng, SLOTS, p.n_l, p.var_w);
            let y_u = &x * &o.channels.g + gaussian_matrix(&mut rng, SLOTS, p.n_u, p.var_v);
            let lr_channel = if opts.perfect_csi_lr {
                &o.channels.h_d
            } else {
                &o.lr_estimate
            };
            let errors = |y: &CMat, h: &CMat| {
                let z = ostbc_combine(y, h, amplitude);
                z.iter()
                    .zip(&idx)
                    .filter(|(zk, &k)| qam.detect(**zk) != k)
                    .count() as f64
                    / SYMBOLS as f64
            };
            Ok((errors(&y_l, lr_channel), errors(&y_u, &o.ur_estimate)))
        })
        .collect::<Result<Vec<_>>>()?;
    let lr = Summary::of(&per_trial.iter().map(|t| t.0).collect::<Vec<_>>());
    let ur = Summary::of(&per_trial.iter().map(|t| t.1).collect::<Vec<_>>());
    Ok(SerReport {
        ser_lr: lr.mean,
        ser_ur: ur.mean,
        half_width_lr: lr.half_width,
        half_width_ur: ur.half_width,
        trials: opts.trials,
        qam_order: opts.qam_order,
        code: CODE_NAME,
    })
}
