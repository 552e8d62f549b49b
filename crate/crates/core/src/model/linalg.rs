//! Dense complex linear-algebra helpers shared by the training model and the
//! estimators.

use nalgebra::{Complex, DMatrix};
use rand::Rng;

use super::rng::gaussian_matrix;
use super::{CMat, C64};
use crate::error::{Error, Result};

/// Relative singular-value cutoff for numerical rank.
pub const RANK_TOL: f64 = 1e-10;

/// Squared Frobenius norm.
pub fn fro_sq(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// `τ × n` normalized DFT columns; `Cᴴ C = I_n` whenever `τ ≥ n`.
pub fn pilot_matrix(tau: usize, n: usize) -> CMat {
    assert!(tau >= n, "pilot needs tau >= n ({tau} < {n})");
    let scale = (tau as f64).sqrt().recip();
    DMatrix::from_fn(tau, n, |k, j| {
        let phase = -2.0 * std::f64::consts::PI * (k * j) as f64 / tau as f64;
        Complex::from_polar(scale, phase)
    })
}

/// Haar-distributed `τ × n` matrix with orthonormal columns.
pub fn random_semi_unitary<R: Rng + ?Sized>(rng: &mut R, tau: usize, n: usize) -> CMat {
    assert!(tau >= n);
    let g = gaussian_matrix(rng, tau, n, 1.0);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..tau {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Number of singular values above `RANK_TOL · σ_max`.
pub fn numerical_rank(m: &CMat) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// Orthonormal basis of the left null space of a full-column-rank `n × k`
/// matrix, returned as `n × (n-k)` with `Nᴴ·h = 0` and `Nᴴ·N = I`.
pub fn null_space_basis(h_hat: &CMat) -> Result<CMat> {
    let (n, k) = h_hat.shape();
    let svd = h_hat.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top > 0.0 && svd.singular_values[i] > RANK_TOL * top)
        .collect();
    if keep.len() < k {
        return Err(Error::RankDeficient {
            rank: keep.len(),
            expected: k,
        });
    }
    let mut basis: Vec<nalgebra::DVector<C64>> =
        keep.iter().map(|&i| u.column(i).into_owned()).collect();
    let range_dim = basis.len();

    // Greedily add the identity column with the largest residual after
    // projecting out everything chosen so far.
    let mut used = vec![false; n];
    while basis.len() < n {
        let mut best: Option<(usize, nalgebra::DVector<C64>, f64)> = None;
        for (i, taken) in used.iter().enumerate() {
            if *taken {
                continue;
            }
            let mut v = nalgebra::DVector::<C64>::zeros(n);
            v[i] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dotc(&v);
                    v.axpy(-c, b, C64::new(1.0, 0.0));
                }
            }
            let norm = v.norm();
            if best.as_ref().is_none_or(|(_, _, bn)| norm > *bn) {
                best = Some((i, v, norm));
            }
        }
        let (i, v, norm) = best.expect("candidates remain while basis is incomplete");
        used[i] = true;
        basis.push(v.unscale(norm));
    }
    let cols: Vec<_> = basis[range_dim..].to_vec();
    Ok(CMat::from_columns(&cols))
}

/// LMMSE estimate of `B` from `Y = X·B + N`, where `B` and `N` have i.i.d.
/// entries of variance `var_prior` and `var_noise`:
/// `var_prior · Xᴴ (var_prior·X Xᴴ + var_noise·I)⁻¹ Y`.
pub fn lmmse_white(x: &CMat, y: &CMat, var_prior: f64, var_noise: f64) -> Result<CMat> {
    let tau = x.nrows();
    let mut gram = x * x.adjoint() * C64::from(var_prior);
    for i in 0..tau {
        gram[(i, i)] += var_noise;
    }
    let sol = hermitian_solve(gram, y)?;
    Ok(x.adjoint() * sol * C64::from(var_prior))
}

/// Solves `A·X = B` for Hermitian positive-definite `A`, adding a small
/// diagonal jitter when the plain factorization fails.
pub fn hermitian_solve(a: CMat, b: &CMat) -> Result<CMat> {
    if let Some(ch) = a.clone().cholesky() {
        return Ok(ch.solve(b));
    }
    let n = a.nrows();
    let trace: f64 = (0..n).map(|i| a[(i, i)].re).sum();
    let jitter = 1e-12 * trace.abs().max(f64::MIN_POSITIVE) / n as f64;
    let mut a = a;
    for i in 0..n {
        a[(i, i)] += jitter;
    }
    a.cholesky()
        .map(|ch| ch.solve(b))
        .ok_or(Error::SingularRegressor)
}
