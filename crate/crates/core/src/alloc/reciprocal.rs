//! Power allocation for reciprocal channels.
//!
//! Given a reverse energy `E_R`, the best forward energy and AN level put the
//! UR floor and the average budget both on their boundary, which leaves a
//! one-dimensional search over `E_R`.

use rayon::prelude::*;

use crate::analytic::{gamma_tilde, mu, nmse_l_reciprocal, nmse_u_reciprocal};
use crate::error::{Error, Result};
use crate::params::{ReciprocalAllocation, SystemParams};
use crate::scalar::{count, lit, Real};

/// Energy caps over the whole training block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budgets<T> {
    /// Shared by both terminals.
    pub average: T,
    /// LR reverse-training energy cap.
    pub lr: T,
    /// Transmitter forward-training energy cap (pilot plus AN).
    pub tx: T,
}

impl<T: Real> Budgets<T> {
    /// Power limits times the configured training lengths.
    pub fn from_params(p: &SystemParams<T>) -> Self {
        Self {
            average: p.p_ave * count(p.tau_r + p.tau_f),
            lr: p.p_bar_l * count(p.tau_r),
            tx: p.p_bar_t * count(p.tau_f),
        }
    }

    /// Power limits times the minimum training lengths, so the energies do
    /// not grow when `τ_F` is lengthened.
    pub fn at_minimum_lengths(p: &SystemParams<T>) -> Self {
        Self {
            average: p.p_ave * count(p.n_t + p.n_l),
            lr: p.p_bar_l * count(p.n_l),
            tx: p.p_bar_t * count(p.n_t),
        }
    }

    /// Average budget after discarding the part the individual caps cannot use.
    pub fn effective_average(&self) -> T {
        self.average.min(self.lr + self.tx)
    }

    /// `max{L, Tx} ≤ B ≤ L + Tx`: every cap can bind.
    pub fn all_effective(&self) -> bool {
        self.lr.max(self.tx) <= self.average && self.average <= self.lr + self.tx
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocProblem<T> {
    pub params: SystemParams<T>,
    /// Floor on the UR NMSE.
    pub gamma: T,
    pub budgets: Budgets<T>,
}

impl<T: Real> AllocProblem<T> {
    pub fn new(params: SystemParams<T>, gamma: T) -> Self {
        Self {
            params,
            gamma,
            budgets: Budgets::from_params(&params),
        }
    }

    pub fn with_budgets(mut self, budgets: Budgets<T>) -> Self {
        self.budgets = budgets;
        self
    }

    pub fn gamma_tilde(&self) -> T {
        gamma_tilde(&self.params, self.gamma)
    }

    /// Largest forward energy the caps allow with no reverse training.
    fn forward_cap(&self) -> T {
        self.budgets.tx.min(self.budgets.effective_average())
    }

    /// AN energy per slot `(N_t-N_L)·σ_a²` that spends the remaining average
    /// budget once the UR floor is met with equality.
    pub fn alpha_of_er(&self, e_r: T) -> T {
        let p = &self.params;
        let gt = self.gamma_tilde();
        (self.budgets.effective_average() - gt - e_r)
            / (count::<T>(p.tau_f) + p.var_g * gt / p.var_v)
    }

    /// Forward energy that puts the UR NMSE exactly on the floor for AN
    /// level `alpha = (N_t-N_L)·σ_a²`.
    pub fn ef_of_alpha(&self, alpha: T) -> T {
        let p = &self.params;
        self.gamma_tilde() * (p.var_g * alpha / p.var_v + T::one())
    }

    pub fn ef_of_er(&self, e_r: T) -> T {
        self.ef_of_alpha(self.alpha_of_er(e_r))
    }

    fn allocation_at(&self, e_r: T) -> ReciprocalAllocation<T> {
        let alpha = self.alpha_of_er(e_r).max(T::zero());
        ReciprocalAllocation {
            e_r,
            e_f: self.ef_of_alpha(alpha),
            var_a: alpha / count(self.params.an_dims()),
        }
    }

    pub fn objective(&self, a: &ReciprocalAllocation<T>) -> T {
        nmse_l_reciprocal(&self.params, a.e_r, a.e_f, a.var_a)
    }

    fn check_gamma(&self) -> Result<()> {
        let g = self.gamma;
        if !(g > T::zero()) || g > self.params.var_g || !g.is_finite() {
            return Err(Error::InfeasibleGamma {
                gamma: g.to_f64().unwrap_or(f64::NAN),
                max: self.params.var_g.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    /// Names of the constraints that hold with equality (relative `tol`).
    pub fn active_constraints(&self, a: &ReciprocalAllocation<T>, tol: T) -> Vec<&'static str> {
        let p = &self.params;
        let b = &self.budgets;
        let fwd = a.e_f + a.an_energy(p);
        let near = |x: T, cap: T| (cap - x).abs() <= tol * cap.abs().max(T::one());
        let mut out = Vec::new();
        if near(nmse_u_reciprocal(p, a.e_f, a.var_a), self.gamma) {
            out.push("ur_floor");
        }
        if near(a.e_r + fwd, b.average) {
            out.push("average");
        }
        if near(a.e_r, b.lr) {
            out.push("lr_energy");
        }
        if near(fwd, b.tx) {
            out.push("tx_energy");
        }
        out
    }

    /// Every constraint holds within relative `tol`.
    pub fn is_feasible(&self, a: &ReciprocalAllocation<T>, tol: T) -> bool {
        let p = &self.params;
        let b = &self.budgets;
        let fwd = a.e_f + a.an_energy(p);
        let le = |x: T, cap: T| x <= cap + tol * cap.abs().max(T::one());
        let nonneg = a.e_r >= T::zero() && a.e_f >= T::zero() && a.var_a >= T::zero();
        nonneg
            && le(a.e_r + fwd, b.average)
            && le(a.e_r, b.lr)
            && le(fwd, b.tx)
            && nmse_u_reciprocal(p, a.e_f, a.var_a) >= self.gamma * (T::one() - tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// No reverse training and no AN; the forward energy sits on the UR floor.
    ClosedForm,
    /// One-dimensional search over the reverse energy.
    LineSearch,
    /// The floor is met even at full forward power, so no AN is needed.
    Unconstrained,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::ClosedForm => "closed-form",
            Branch::LineSearch => "line-search",
            Branch::Unconstrained => "unconstrained",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReciprocalSolution<T> {
    pub alloc: ReciprocalAllocation<T>,
    /// LR NMSE at `alloc`.
    pub objective: T,
    pub nmse_u: T,
    pub branch: Branch,
    pub active_constraints: Vec<&'static str>,
}

impl<T: Real> ReciprocalSolution<T> {
    fn new(problem: &AllocProblem<T>, alloc: ReciprocalAllocation<T>, branch: Branch) -> Self {
        Self {
            objective: problem.objective(&alloc),
            nmse_u: nmse_u_reciprocal(&problem.params, alloc.e_f, alloc.var_a),
            active_constraints: problem.active_constraints(&alloc, lit(1e-9)),
            alloc,
            branch,
        }
    }
}

const SCAN_POINTS: usize = 512;
const GOLDEN_REL_WIDTH: f64 = 1e-9;

pub fn solve_reciprocal<T: Real>(problem: &AllocProblem<T>) -> Result<ReciprocalSolution<T>> {
    problem.check_gamma()?;
    let b = &problem.budgets;
    let gt = problem.gamma_tilde();
    let zero = T::zero();

    if gt >= problem.forward_cap() {
        let a = ReciprocalAllocation {
            e_r: zero,
            e_f: problem.forward_cap(),
            var_a: zero,
        };
        return Ok(ReciprocalSolution::new(problem, a, Branch::Unconstrained));
    }

    let m = mu(&problem.params);
    let hi = b.lr.min(b.effective_average() - gt);
    if m > hi {
        let a = ReciprocalAllocation {
            e_r: zero,
            e_f: gt,
            var_a: zero,
        };
        return Ok(ReciprocalSolution::new(problem, a, Branch::ClosedForm));
    }
    let lo = zero.max(m).max(b.effective_average() - b.tx);
    let e_r = line_search(|x| problem.objective(&problem.allocation_at(x)), lo, hi);
    Ok(ReciprocalSolution::new(
        problem,
        problem.allocation_at(e_r),
        Branch::LineSearch,
    ))
}

/// Minimizes `f` on `[lo, hi]`: a uniform scan, then golden-section refinement
/// inside the bracket around the best scan point. Ties go to the smaller argument.
pub fn line_search<T: Real, F: Fn(T) -> T + Sync>(f: F, lo: T, hi: T) -> T {
    if hi <= lo {
        return lo;
    }
    let n = SCAN_POINTS;
    let step = (hi - lo) / count(n - 1);
    let at = |i: usize| if i == n - 1 { hi } else { lo + step * count(i) };
    let values: Vec<T> = (0..n).into_par_iter().map(|i| f(at(i))).collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    let (mut a, mut b) = (at(best.saturating_sub(1)), at((best + 1).min(n - 1)));
    let width = lit::<T>(GOLDEN_REL_WIDTH) * (hi - lo);
    let r = lit::<T>(0.618_033_988_749_894_8);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a <= width {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let (x, fx) = if fc <= fd { (c, fc) } else { (d, fd) };
    if fx < values[best] {
        x
    } else {
        at(best)
    }
}

/// Brute-force search over a `(E_R, (N_t-N_L)·σ_a²)` lattice with the forward
/// energy set to its largest feasible value, followed by `refine` zoomed
/// lattices around the incumbent.
pub fn grid_oracle_reciprocal<T: Real>(
    problem: &AllocProblem<T>,
    resolution: usize,
    refine: usize,
) -> Result<ReciprocalSolution<T>> {
    problem.check_gamma()?;
    let p = &problem.params;
    let b = &problem.budgets;
    let tau_f = count::<T>(p.tau_f);
    let an = count::<T>(p.an_dims());
    let avg = b.effective_average();

    let evaluate = |e_r: T, alpha: T| -> Option<(T, ReciprocalAllocation<T>)> {
        let e_f = (b.tx - alpha * tau_f)
            .min(avg - e_r - alpha * tau_f)
            .min(problem.ef_of_alpha(alpha));
        if e_f < T::zero() || e_r > b.lr {
            return None;
        }
        let a = ReciprocalAllocation {
            e_r,
            e_f,
            var_a: alpha / an,
        };
        Some((problem.objective(&a), a))
    };

    let (mut r_lo, mut r_hi) = (T::zero(), b.lr.min(avg));
    let (mut a_lo, mut a_hi) = (T::zero(), b.tx.min(avg) / tau_f);
    let mut best: Option<(T, ReciprocalAllocation<T>)> = None;
    for round in 0..=refine {
        let n = resolution;
        let rs = (r_hi - r_lo) / count(n);
        let as_ = (a_hi - a_lo) / count(n);
        let rows: Vec<Option<(T, ReciprocalAllocation<T>)>> = (0..=n)
            .into_par_iter()
            .map(|i| {
                let e_r = r_lo + rs * count(i);
                let mut row_best: Option<(T, ReciprocalAllocation<T>)> = None;
                for j in 0..=n {
                    if let Some(c) = evaluate(e_r, a_lo + as_ * count(j)) {
                        if row_best.as_ref().is_none_or(|(v, _)| c.0 < *v) {
                            row_best = Some(c);
                        }
                    }
                }
                row_best
            })
            .collect();
        for c in rows.into_iter().flatten() {
            if best.as_ref().is_none_or(|(v, _)| c.0 < *v) {
                best = Some(c);
            }
        }
        let Some((_, inc)) = best.as_ref() else {
            if round == 0 {
                return Err(Error::NoFeasiblePoint);
            }
            break;
        };
        let two = lit::<T>(2.0);
        r_lo = (inc.e_r - two * rs).max(T::zero());
        r_hi = (inc.e_r + two * rs).min(b.lr.min(avg));
        let alpha = inc.var_a * an;
        a_lo = (alpha - two * as_).max(T::zero());
        a_hi = alpha + two * as_;
    }
    let (_, a) = best.ok_or(Error::NoFeasiblePoint)?;
    Ok(ReciprocalSolution::new(problem, a, Branch::LineSearch))
}
