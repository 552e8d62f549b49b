//! Non-reciprocal allocation by condensation.
//!
//! Variables `x = [t, t0, t1, t2, t3, t4]` with
//! `t0 = σ_Hd²E_0/N_t + σ_w²`, `t1 = α²`, `t2 = E_2/N_L`, `t3 = E_3/N_t`,
//! `t4 = (N_t-N_L)σ_a²σ_G² + σ_v²`, and `t` the LR SNR surrogate, so that the
//! LR NMSE is `(1/σ_Hd² + t/σ_w²)⁻¹`. Every constraint is a posynomial except
//! `t ≤ f̄1/f̄2`, written as `num(x)/den(x) ≤ 1`; each pass replaces `den` by
//! its local monomial fit, which never exceeds it, so every iterate stays
//! feasible and `t` never decreases.

use super::posynomial::{Monomial, Posynomial};
use super::solver::{GeometricProgram, GpOptions};
use crate::analytic::{nmse_l_nonreciprocal_approx, nmse_u_nonreciprocal, JensenVariant};
use crate::error::{Error, Result};
use crate::params::{echo_gain, NonReciprocalAllocation, SystemParams};
use crate::scalar::{count, lit, Real};

const N: usize = 6;
const T: usize = 0;
const T0: usize = 1;
const T1: usize = 2;
const T2: usize = 3;
const T3: usize = 4;
const T4: usize = 5;

/// Energy caps over the four-phase training block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonRecBudgets<R> {
    pub average: R,
    /// LR echo plus reverse-training energy.
    pub lr: R,
    /// Transmitter round-trip plus forward energy (pilot and AN).
    pub tx: R,
}

impl<R: Real> NonRecBudgets<R> {
    pub fn from_params(p: &SystemParams<R>) -> Self {
        Self {
            average: p.p_ave * count(2 * p.tau_0 + p.tau_2 + p.tau_3),
            lr: p.p_bar_l * count(p.tau_0 + p.tau_2),
            tx: p.p_bar_t * count(p.tau_0 + p.tau_3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonRecProblem<R> {
    pub params: SystemParams<R>,
    pub gamma: R,
    pub budgets: NonRecBudgets<R>,
}

impl<R: Real> NonRecProblem<R> {
    pub fn new(params: SystemParams<R>, gamma: R) -> Self {
        Self {
            params,
            gamma,
            budgets: NonRecBudgets::from_params(&params),
        }
    }

    pub fn check(&self) -> Result<()> {
        let p = &self.params;
        if p.tau_0 != p.n_t {
            return Err(Error::UnsupportedGeometry(format!(
                "round-trip length {} must equal n_t = {}",
                p.tau_0, p.n_t
            )));
        }
        let g = self.gamma;
        if !(g > R::zero()) || !(g < p.var_g) {
            return Err(Error::InfeasibleGamma {
                gamma: g.to_f64().unwrap_or(f64::NAN),
                max: p.var_g.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    /// Constraint check in the original energy variables (relative `tol`).
    pub fn is_feasible(&self, a: &NonReciprocalAllocation<R>, tol: R) -> bool {
        let p = &self.params;
        let b = &self.budgets;
        let an = a.an_energy(p);
        let le = |x: R, cap: R| x <= cap + tol * cap.abs().max(R::one());
        let nonneg = [a.e_0, a.e_1, a.e_2, a.e_3, a.var_a]
            .iter()
            .all(|&v| v >= R::zero());
        nonneg
            && le(a.e_0 + a.e_1 + a.e_2 + a.e_3 + an, b.average)
            && le(a.e_0 + a.e_3 + an, b.tx)
            && le(a.e_1 + a.e_2, b.lr)
            && nmse_u_nonreciprocal(p, a.e_3, a.var_a) >= self.gamma * (R::one() - tol)
    }

    fn consts(&self) -> GpConstants<R> {
        let p = &self.params;
        let shift =
            count::<R>(p.n_t) * p.var_w / p.var_hd + count::<R>(p.tau_3) * p.var_v / p.var_g;
        GpConstants {
            c1: (self.gamma.recip() - p.var_g.recip()).recip(),
            c2: (self.budgets.average + shift).recip(),
            c3: (self.budgets.tx + shift).recip(),
            c4: self.budgets.lr.recip(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpConstants<R> {
    /// UR floor: `c1·t3/t4 ≤ 1`.
    pub c1: R,
    /// Average budget.
    pub c2: R,
    /// Transmitter budget.
    pub c3: R,
    /// LR budget.
    pub c4: R,
}

/// Point in the transformed variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpState<R> {
    pub t: R,
    pub t0: R,
    pub t1: R,
    pub t2: R,
    pub t3: R,
    pub t4: R,
}

impl<R: Real> GpState<R> {
    pub fn to_vec(&self) -> Vec<R> {
        vec![self.t, self.t0, self.t1, self.t2, self.t3, self.t4]
    }

    pub fn from_slice(x: &[R]) -> Self {
        Self {
            t: x[T],
            t0: x[T0],
            t1: x[T1],
            t2: x[T2],
            t3: x[T3],
            t4: x[T4],
        }
    }
}

/// `f̄1/f̄2` at the state's `t0..t4`: the largest admissible `t`.
pub fn snr_ratio<R: Real>(p: &SystemParams<R>, s: &GpState<R>) -> R {
    let (n_l, k, r) = shape_consts(p);
    let big_p = n_l * s.t0 * s.t1 + k * s.t0 * s.t1 * s.t2 + s.t2 + r;
    let p2 = (n_l * s.t0 * s.t1 + s.t2 + r) / p.var_w + k * s.t1 * s.t2;
    let f1 = s.t3 * big_p;
    let f2 = (s.t4 - p.var_v) / p.var_g * p.var_hd * p2 + big_p;
    f1 / f2
}

fn shape_consts<R: Real>(p: &SystemParams<R>) -> (R, R, R) {
    let n_l = count::<R>(p.n_l);
    let k = count::<R>(p.n_t) * p.var_hu / p.var_wt;
    let r = p.var_wt / p.var_hu;
    (n_l, k, r)
}

/// Terms of `P''`-type brackets shared by both sides of the ratio constraint,
/// each multiplied by the monomial `extra`.
fn bracket<R: Real>(
    p: &SystemParams<R>,
    scale: R,
    extra: &[usize],
    with_t0: bool,
) -> Vec<Monomial<R>> {
    let (n_l, k, r) = shape_consts(p);
    let mono = |c: R, vars: &[usize]| {
        let mut all = extra.to_vec();
        all.extend_from_slice(vars);
        Monomial::product(scale * c, N, &all)
    };
    if with_t0 {
        // P = N_L t0 t1 + k t0 t1 t2 + t2 + r
        vec![
            mono(n_l, &[T0, T1]),
            mono(k, &[T0, T1, T2]),
            mono(R::one(), &[T2]),
            mono(r, &[]),
        ]
    } else {
        // P'' = (N_L/σ_w²) t0 t1 + k t1 t2 + t2/σ_w² + r/σ_w²
        let w = p.var_w;
        vec![
            mono(n_l / w, &[T0, T1]),
            mono(k, &[T1, T2]),
            mono(w.recip(), &[T2]),
            mono(r / w, &[]),
        ]
    }
}

/// Left side of `t·f̄2 ≤ f̄1` after moving the `-σ_v²` part across.
pub fn ratio_numerator<R: Real>(p: &SystemParams<R>) -> Posynomial<R> {
    let h = p.var_hd / p.var_g;
    let mut terms = bracket(p, h, &[T4, T], false);
    terms.extend(bracket(p, R::one(), &[T], true));
    Posynomial::new(terms)
}

/// Right side of `t·f̄2 ≤ f̄1`: `(σ_v²σ_Hd²/σ_G²)·P''·t + P·t3`.
pub fn ratio_denominator<R: Real>(p: &SystemParams<R>) -> Posynomial<R> {
    let q = p.var_v * p.var_hd / p.var_g;
    let mut terms = bracket(p, q, &[T], false);
    terms.extend(bracket(p, R::one(), &[T3], true));
    Posynomial::new(terms)
}

/// Log-exponents `(θ_t, θ0, θ1, θ2, θ3)` of the local monomial fit of the
/// ratio denominator at `expansion`; each is the share of denominator terms
/// containing that variable.
pub fn theta_exponents<R: Real>(p: &SystemParams<R>, expansion: &GpState<R>) -> [R; 5] {
    let m = ratio_denominator(p).monomial_approx(&expansion.to_vec());
    [m.exps[T], m.exps[T0], m.exps[T1], m.exps[T2], m.exps[T3]]
}

/// Monomial `g(x̄)·Π (x_i/x̄_i)^θ_i` built from caller-supplied exponents.
pub fn monomial_from_theta<R: Real>(
    p: &SystemParams<R>,
    expansion: &GpState<R>,
    theta: &[R; 5],
) -> Monomial<R> {
    let x = expansion.to_vec();
    let g = ratio_denominator(p).eval(&x);
    let mut exps = vec![R::zero(); N];
    for (slot, &th) in [T, T0, T1, T2, T3].iter().zip(theta) {
        exps[*slot] = th;
    }
    let denom = exps
        .iter()
        .zip(&x)
        .fold(R::one(), |acc, (&a, &xi)| acc * xi.powf(a));
    Monomial::new(g / denom, exps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangencyReport<R> {
    /// Relative mismatch between the fit and the denominator at the expansion.
    pub value_error: R,
    /// Relative mismatch of each log-derivative `(t, t0, t1, t2, t3)` against
    /// central differences.
    pub gradient_errors: [R; 5],
}

impl<R: Real> TangencyReport<R> {
    pub fn worst(&self) -> R {
        self.gradient_errors
            .iter()
            .fold(self.value_error, |m, &e| m.max(e))
    }
}

/// Checks a candidate set of exponents against the ratio denominator's
/// log-derivatives at `expansion` (central differences in `log x`, `step`).
pub fn tangency_check<R: Real>(
    p: &SystemParams<R>,
    expansion: &GpState<R>,
    theta: &[R; 5],
    step: R,
) -> TangencyReport<R> {
    let den = ratio_denominator(p);
    let x = expansion.to_vec();
    let fit = monomial_from_theta(p, expansion, theta);
    let g = den.eval(&x);
    let value_error = (fit.eval(&x) - g).abs() / g;
    let two = lit::<R>(2.0);
    let gradient_errors = std::array::from_fn(|k| {
        let i = [T, T0, T1, T2, T3][k];
        let (mut up, mut dn) = (x.clone(), x.clone());
        up[i] = up[i] * step.exp();
        dn[i] = dn[i] * (-step).exp();
        let fd = (den.eval(&up).ln() - den.eval(&dn).ln()) / (two * step);
        (fd - theta[k]).abs() / fd.abs().max(lit(1e-3))
    });
    TangencyReport {
        value_error,
        gradient_errors,
    }
}

/// The posynomial constraints other than the ratio constraint.
pub fn budget_constraints<R: Real>(problem: &NonRecProblem<R>) -> Vec<Posynomial<R>> {
    let p = &problem.params;
    let c = problem.consts();
    let n_t = count::<R>(p.n_t);
    let n_l = count::<R>(p.n_l);
    let e0 = |k: R| Monomial::product(k * n_t / p.var_hd, N, &[T0]);
    let e1 = |k: R| Monomial::product(k * n_t * n_l, N, &[T0, T1]);
    let e2 = |k: R| Monomial::product(k * n_l, N, &[T2]);
    let e3 = |k: R| Monomial::product(k * n_t, N, &[T3]);
    let an = |k: R| Monomial::product(k * count::<R>(p.tau_3) / p.var_g, N, &[T4]);
    let mut lower_t0 = Monomial::product(p.var_w, N, &[]);
    lower_t0.exps[T0] = -R::one();
    let mut lower_t4 = Monomial::product(p.var_v, N, &[]);
    lower_t4.exps[T4] = -R::one();
    let mut floor = Monomial::product(c.c1, N, &[T3]);
    floor.exps[T4] = -R::one();
    vec![
        Posynomial::new(vec![lower_t0]),
        Posynomial::new(vec![lower_t4]),
        Posynomial::new(vec![floor]),
        Posynomial::new(vec![e0(c.c2), e1(c.c2), e2(c.c2), e3(c.c2), an(c.c2)]),
        Posynomial::new(vec![e0(c.c3), e3(c.c3), an(c.c3)]),
        Posynomial::new(vec![e1(c.c4), e2(c.c4)]),
    ]
}

/// GP obtained by fitting the ratio denominator at `expansion`.
pub fn inner_program<R: Real>(
    problem: &NonRecProblem<R>,
    expansion: &GpState<R>,
) -> GeometricProgram<R> {
    let p = &problem.params;
    let fit = ratio_denominator(p).monomial_approx(&expansion.to_vec());
    let mut constraints = vec![ratio_numerator(p).div_monomial(&fit)];
    constraints.extend(budget_constraints(problem));
    GeometricProgram {
        objective: Monomial::product(R::one(), N, &[]).with_exp(T, -R::one()),
        constraints,
    }
}

impl<R: Real> Monomial<R> {
    fn with_exp(mut self, i: usize, a: R) -> Self {
        self.exps[i] = a;
        self
    }
}

/// Forward map; `t` is set to its largest admissible value.
pub fn to_gp_variables<R: Real>(p: &SystemParams<R>, a: &NonReciprocalAllocation<R>) -> GpState<R> {
    let alpha = echo_gain(p, a.e_0, a.e_1);
    let mut s = GpState {
        t: R::zero(),
        t0: p.var_hd * a.e_0 / count(p.n_t) + p.var_w,
        t1: alpha * alpha,
        t2: a.e_2 / count(p.n_l),
        t3: a.e_3 / count(p.n_t),
        t4: count::<R>(p.an_dims()) * a.var_a * p.var_g + p.var_v,
    };
    s.t = snr_ratio(p, &s);
    s
}

/// Inverse map; `E_1` follows from the echo gain.
pub fn from_gp_variables<R: Real>(
    p: &SystemParams<R>,
    s: &GpState<R>,
) -> NonReciprocalAllocation<R> {
    let n_l = count::<R>(p.n_l);
    let e_0 = count::<R>(p.n_t) * (s.t0 - p.var_w) / p.var_hd;
    let e_1 = s.t1 * (e_0 * n_l * p.var_hd + count::<R>(p.tau_0) * n_l * p.var_w);
    NonReciprocalAllocation {
        e_0,
        e_1,
        e_2: n_l * s.t2,
        e_3: count::<R>(p.n_t) * s.t3,
        var_a: (s.t4 - p.var_v) / (p.var_g * count(p.an_dims())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<R> {
    pub expansion: GpState<R>,
    pub theta: [R; 5],
    pub optimum: GpState<R>,
    /// `t` at the optimum after snapping the ratio constraint to equality.
    pub objective: R,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CondensationTrace<R> {
    pub iterations: Vec<IterationRecord<R>>,
}

impl<R: Real> CondensationTrace<R> {
    pub fn objectives(&self) -> Vec<R> {
        self.iterations.iter().map(|r| r.objective).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.objectives().windows(2).all(|w| w[1] >= w[0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondenseResult<R> {
    pub alloc: NonReciprocalAllocation<R>,
    pub state: GpState<R>,
    pub trace: CondensationTrace<R>,
    /// LR NMSE (eigenvalue-mean surrogate, which the GP encodes exactly).
    pub nmse_l: R,
    pub nmse_u: R,
}

/// Deterministic interior starting point: the average budget split evenly
/// over the four energies, AN just above what the UR floor needs, then a
/// uniform 0.9 shrink until every constraint holds strictly.
pub fn initial_point<R: Real>(problem: &NonRecProblem<R>) -> Result<GpState<R>> {
    problem.check()?;
    let p = &problem.params;
    let share = problem.budgets.average / lit(4.0);
    let needed = |e_3: R| {
        let t4 = problem.consts().c1 * e_3 / count(p.n_t);
        ((t4 - p.var_v) / (p.var_g * count(p.an_dims()))).max(R::zero())
    };
    let cons = budget_constraints(problem);
    let mut scale = R::one();
    for _ in 0..2000 {
        let e = share * scale;
        let a = NonReciprocalAllocation {
            e_0: e,
            e_1: e,
            e_2: e,
            e_3: e,
            var_a: needed(e) * lit(1.01) + lit(1e-6),
        };
        let s = to_gp_variables(p, &a);
        let x = s.to_vec();
        if cons.iter().all(|c| c.eval(&x) < R::one()) {
            return Ok(s);
        }
        scale = scale * lit(0.9);
    }
    Err(Error::Infeasible { margin: f64::NAN })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondenseOptions<R> {
    /// Stop once the relative gain in `t` over one pass drops below this.
    pub tol: R,
    pub max_iter: usize,
    pub gp: GpOptions<R>,
}

impl<R: Real> Default for CondenseOptions<R> {
    fn default() -> Self {
        Self {
            tol: lit(1e-6),
            max_iter: 50,
            gp: GpOptions::default(),
        }
    }
}

pub fn condense<R: Real>(
    problem: &NonRecProblem<R>,
    start: &GpState<R>,
    opts: &CondenseOptions<R>,
) -> Result<CondenseResult<R>> {
    problem.check()?;
    let p = &problem.params;
    let mut current = *start;
    current.t = snr_ratio(p, &current);
    let mut trace = CondensationTrace::default();
    // a solve may land a hair below the incumbent; treat that as convergence
    let slack = lit::<R>(1e-6);
    for _ in 0..opts.max_iter {
        let theta = theta_exponents(p, &current);
        let gp = inner_program(problem, &current);
        let sol = gp.solve(&current.to_vec(), &opts.gp)?;
        let mut next = GpState::from_slice(&sol.x);
        next.t = snr_ratio(p, &next);
        if next.t < current.t * (R::one() - slack) {
            return Err(Error::Stalled {
                previous: current.t.to_f64().unwrap_or(f64::NAN),
                current: next.t.to_f64().unwrap_or(f64::NAN),
            });
        }
        if next.t < current.t {
            next = current;
        }
        trace.iterations.push(IterationRecord {
            expansion: current,
            theta,
            optimum: next,
            objective: next.t,
        });
        let gain = (next.t - current.t) / current.t;
        current = next;
        if gain < opts.tol {
            break;
        }
    }
    let alloc = from_gp_variables(p, &current);
    Ok(CondenseResult {
        nmse_l: nmse_l_nonreciprocal_approx(p, &alloc, JensenVariant::SigmaSquared),
        nmse_u: nmse_u_nonreciprocal(p, alloc.e_3, alloc.var_a),
        alloc,
        state: current,
        trace,
    })
}

/// Condensation from [`initial_point`] with default options.
pub fn solve_nonreciprocal<R: Real>(problem: &NonRecProblem<R>) -> Result<CondenseResult<R>> {
    let start = initial_point(problem)?;
    condense(problem, &start, &CondenseOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SystemParams<f64> {
        SystemParams::reference(20.0)
    }

    #[test]
    fn boundary_maps() {
        let p = params();
        let s = to_gp_variables(
            &p,
            &NonReciprocalAllocation {
                e_0: 0.0,
                e_1: 1.0,
                e_2: 1.0,
                e_3: 1.0,
                var_a: 0.0,
            },
        );
        assert_eq!(s.t0, 1.0);
        assert_eq!(s.t4, 1.0);
    }

    #[test]
    fn reference_substitution() {
        // E_0 = E_1 = E_2 = E_3 = 10, σ_a² = 0.5, unit variances, N_t = 4, N_L = 2
        let p = params();
        let a = NonReciprocalAllocation {
            e_0: 10.0,
            e_1: 10.0,
            e_2: 10.0,
            e_3: 10.0,
            var_a: 0.5,
        };
        let s = to_gp_variables(&p, &a);
        assert!((s.t0 - 3.5).abs() < 1e-15);
        assert!((s.t1 - 10.0 / 28.0).abs() < 1e-15);
        assert!((s.t2 - 5.0).abs() < 1e-15);
        assert!((s.t3 - 2.5).abs() < 1e-15);
        assert!((s.t4 - 2.0).abs() < 1e-15);
        // P = 2.5 + 25 + 5 + 1; P'' = 2.5 + 4·(10/28)·5 + 5 + 1
        let big_p = 33.5;
        let p2 = 2.5 + 50.0 / 7.0 + 6.0;
        let expected = 2.5 * big_p / (p2 + big_p);
        assert!((s.t - expected).abs() < 1e-13);
        let back = from_gp_variables(&p, &s);
        for (x, y) in [
            (back.e_0, 10.0),
            (back.e_1, 10.0),
            (back.e_2, 10.0),
            (back.e_3, 10.0),
            (back.var_a, 0.5),
        ] {
            assert!((x - y).abs() <= 1e-12 * y);
        }
    }

    #[test]
    fn ratio_matches_eigen_mean_nmse() {
        let p = params();
        let a = NonReciprocalAllocation {
            e_0: 13.0,
            e_1: 7.0,
            e_2: 21.0,
            e_3: 40.0,
            var_a: 2.5,
        };
        let s = to_gp_variables(&p, &a);
        let via_t = (1.0 / p.var_hd + s.t / p.var_w).recip();
        let direct = nmse_l_nonreciprocal_approx(&p, &a, JensenVariant::SigmaSquared);
        assert!((via_t - direct).abs() < 1e-14);
        // ratio constraint is tight at t = f̄1/f̄2
        let x = s.to_vec();
        let r = ratio_numerator(&p).eval(&x) / ratio_denominator(&p).eval(&x);
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn theta_at_unit_point() {
        // all-ones expansion, unit variances: terms of den are
        // 2, 4, 1, 1 (σ_v² group) and 2, 4, 1, 1 (t3 group); g = 16
        let p = params();
        let one = GpState {
            t: 1.0,
            t0: 1.0,
            t1: 1.0,
            t2: 1.0,
            t3: 1.0,
            t4: 1.0,
        };
        let th = theta_exponents(&p, &one);
        let expected = [0.5, 0.5, 12.0 / 16.0, 10.0 / 16.0, 0.5];
        for (a, b) in th.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{th:?}");
        }
    }

    #[test]
    fn fitted_exponents_pass_tangency_and_swapped_ones_fail() {
        let p = params();
        let s = to_gp_variables(
            &p,
            &NonReciprocalAllocation {
                e_0: 13.0,
                e_1: 7.0,
                e_2: 21.0,
                e_3: 40.0,
                var_a: 2.5,
            },
        );
        let th = theta_exponents(&p, &s);
        assert!(tangency_check(&p, &s, &th, 1e-6).worst() <= 1e-4);
        let wrong = [th[0], th[2], th[1], th[3], th[4]];
        assert!(tangency_check(&p, &s, &wrong, 1e-6).worst() > 1e-2);
    }

    #[test]
    fn initial_point_is_interior() {
        for db in [10.0, 15.0, 20.0, 25.0, 30.0] {
            let pr = NonRecProblem::new(SystemParams::<f64>::reference(db), 0.1);
            let s = initial_point(&pr).unwrap();
            let a = from_gp_variables(&pr.params, &s);
            assert!(pr.is_feasible(&a, 0.0), "{db}");
        }
    }

    #[test]
    fn condense_reference() {
        let pr = NonRecProblem::new(SystemParams::<f64>::reference(20.0), 0.1);
        let r = solve_nonreciprocal(&pr).unwrap();
        assert!(r.trace.is_monotone());
        assert!(r.trace.iterations.len() <= 50);
        assert!(pr.is_feasible(&r.alloc, 1e-6));
        assert!(r.nmse_u >= 0.1 * (1.0 - 1e-6));
        let restart = condense(&pr, &r.state, &CondenseOptions::default()).unwrap();
        assert!(restart.trace.iterations.len() <= 2);
        assert!((restart.state.t - r.state.t).abs() <= 1e-6 * r.state.t);
    }

    #[test]
    fn requires_square_round_trip() {
        let mut p = params();
        p.tau_0 = 6;
        let pr = NonRecProblem::new(p, 0.1);
        assert!(matches!(
            solve_nonreciprocal(&pr),
            Err(Error::UnsupportedGeometry(_))
        ));
    }
}
