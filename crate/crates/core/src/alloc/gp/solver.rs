//! Log-barrier interior-point method for geometric programs.
//!
//! With `y = log x` a GP becomes: minimize a linear function subject to
//! log-sum-exp constraints `F_i(y) ≤ 0`, which is convex. A box `|y_j| ≤ B`
//! keeps iterates finite when a variable wants to vanish.

use super::posynomial::{Monomial, Posynomial};
use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real};

/// Minimize `objective(x)` subject to `constraint_i(x) ≤ 1`, `x > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricProgram<T> {
    pub objective: Monomial<T>,
    pub constraints: Vec<Posynomial<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpOptions<T> {
    /// Target on the larger of the stationarity residual and the duality-gap bound.
    pub kkt_tol: T,
    /// Half-width of the log-space box.
    pub log_box: T,
    pub barrier_growth: T,
    pub max_newton: usize,
    pub max_outer: usize,
}

impl<T: Real> Default for GpOptions<T> {
    fn default() -> Self {
        Self {
            kkt_tol: lit(1e-8),
            log_box: lit(60.0),
            barrier_growth: lit(20.0),
            max_newton: 200,
            max_outer: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    pub kkt_residual: T,
    pub newton_steps: usize,
}

/// Linear objective `c·y` over `F_i(y) ≤ 0` and `l_j·y ≤ b_j`.
struct Barrier<'a, T> {
    c: Vec<T>,
    posys: &'a [Posynomial<T>],
    linear: Vec<(Vec<T>, T)>,
}

impl<T: Real> Barrier<'_, T> {
    fn n(&self) -> usize {
        self.c.len()
    }

    fn m(&self) -> usize {
        self.posys.len() + self.linear.len()
    }

    fn slacks(&self, y: &[T]) -> Option<(Vec<T>, Vec<T>)> {
        let f: Vec<T> = self.posys.iter().map(|p| -p.log_eval(y)).collect();
        let l: Vec<T> = self.linear.iter().map(|(a, b)| *b - dot(a, y)).collect();
        let ok = f.iter().chain(&l).all(|&s| s > T::zero() && s.is_finite());
        ok.then_some((f, l))
    }

    fn phi(&self, y: &[T], tb: T) -> Option<T> {
        let (f, l) = self.slacks(y)?;
        let logs = f.iter().chain(&l).fold(T::zero(), |acc, &s| acc + s.ln());
        Some(tb * dot(&self.c, y) - logs)
    }

    /// Gradient and Hessian of the barrier function.
    fn derivatives(&self, y: &[T], tb: T) -> (Vec<T>, Vec<T>) {
        let n = self.n();
        let mut g: Vec<T> = self.c.iter().map(|&ci| tb * ci).collect();
        let mut h = vec![T::zero(); n * n];
        for p in self.posys {
            let (v, gi, hi) = p.log_derivatives(y);
            let s = -v;
            for i in 0..n {
                g[i] = g[i] + gi[i] / s;
                for j in 0..n {
                    h[i * n + j] = h[i * n + j] + hi[i * n + j] / s + gi[i] * gi[j] / (s * s);
                }
            }
        }
        for (a, b) in &self.linear {
            let s = *b - dot(a, y);
            for i in 0..n {
                g[i] = g[i] + a[i] / s;
                for j in 0..n {
                    h[i * n + j] = h[i * n + j] + a[i] * a[j] / (s * s);
                }
            }
        }
        (g, h)
    }

    /// Damped Newton minimization of the barrier function at weight `tb`.
    /// Returns the step count and the final Newton decrement `λ²`. Near the
    /// minimizer the full step is taken without the sufficient-decrease test,
    /// which roundoff in the barrier value would otherwise defeat.
    fn center(&self, y: &mut [T], tb: T, max_iter: usize) -> (usize, T) {
        let n = self.n();
        let mut dec = T::infinity();
        for it in 0..max_iter {
            let (g, h) = self.derivatives(y, tb);
            let Some(step) = cholesky_solve(&h, &g, n) else {
                return (it, dec);
            };
            let d: Vec<T> = step.iter().map(|&v| -v).collect();
            dec = -dot(&g, &d);
            if !(dec > lit(2e-12)) {
                return (it, dec.max(T::zero()));
            }
            let f0 = self.phi(y, tb).expect("centering starts strictly feasible");
            let mut s = T::one();
            loop {
                let cand: Vec<T> = y.iter().zip(&d).map(|(&a, &b)| a + s * b).collect();
                if let Some(f1) = self.phi(&cand, tb) {
                    if dec < lit(1e-6) || f1 <= f0 - lit::<T>(0.25) * s * dec {
                        y.copy_from_slice(&cand);
                        break;
                    }
                }
                s = s * lit(0.5);
                if s < lit(1e-20) {
                    return (it, dec);
                }
            }
        }
        (max_iter, dec)
    }

    /// Barrier path from a strictly feasible `y`. The residual is
    /// `(m + λ²/2)/tb`, a bound on the suboptimality of the log objective.
    /// `stop` may end the path early (phase one uses it once a feasible
    /// point is in hand).
    fn solve(
        &self,
        y: &mut [T],
        opts: &GpOptions<T>,
        stop: impl Fn(&[T]) -> bool,
    ) -> Result<(T, usize)> {
        let m: T = count(self.m());
        let mut tb = T::one();
        let mut steps = 0;
        let mut residual = T::infinity();
        for _ in 0..opts.max_outer {
            let (k, dec) = self.center(y, tb, opts.max_newton);
            steps += k;
            residual = (m + dec * lit(0.5)) / tb;
            if residual <= opts.kkt_tol || stop(y) {
                return Ok((residual, steps));
            }
            tb = tb * opts.barrier_growth;
        }
        Err(Error::NotConverged {
            iterations: steps,
            residual: residual.to_f64().unwrap_or(f64::NAN),
        })
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Solves `H x = g` for symmetric positive-definite row-major `H`; retries
/// once with a small diagonal shift.
fn cholesky_solve<T: Real>(h: &[T], g: &[T], n: usize) -> Option<Vec<T>> {
    let trace = (0..n).fold(T::zero(), |a, i| a + h[i * n + i].abs());
    for shift in [T::zero(), lit::<T>(1e-12) * trace / count(n)] {
        let mut l = vec![T::zero(); n * n];
        let mut ok = true;
        'outer: for i in 0..n {
            for j in 0..=i {
                let mut s = h[i * n + j] + if i == j { shift } else { T::zero() };
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(s > T::zero()) {
                        ok = false;
                        break 'outer;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        if !ok {
            continue;
        }
        let mut z = vec![T::zero(); n];
        for i in 0..n {
            let mut s = g[i];
            for k in 0..i {
                s = s - l[i * n + k] * z[k];
            }
            z[i] = s / l[i * n + i];
        }
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in i + 1..n {
                s = s - l[k * n + i] * x[k];
            }
            x[i] = s / l[i * n + i];
        }
        return Some(x);
    }
    None
}

fn box_rows<T: Real>(n: usize, total: usize, bound: T) -> Vec<(Vec<T>, T)> {
    let mut rows = Vec::with_capacity(2 * n);
    for j in 0..n {
        let mut up = vec![T::zero(); total];
        up[j] = T::one();
        let mut down = vec![T::zero(); total];
        down[j] = -T::one();
        rows.push((up, bound));
        rows.push((down, bound));
    }
    rows
}

impl<T: Real> GeometricProgram<T> {
    pub fn dim(&self) -> usize {
        self.objective.exps.len()
    }

    /// Largest `log constraint_i(x)`; negative means strictly feasible.
    pub fn max_log_constraint(&self, x: &[T]) -> T {
        let y: Vec<T> = x.iter().map(|v| v.ln()).collect();
        self.constraints
            .iter()
            .map(|p| p.log_eval(&y))
            .fold(T::neg_infinity(), T::max)
    }

    /// Finds a strictly feasible log-point by minimizing the largest
    /// constraint violation `s` over `F_i(y) ≤ s`.
    pub fn phase_one(&self, start: &[T], opts: &GpOptions<T>) -> Result<Vec<T>> {
        let n = self.dim();
        let clamp = opts.log_box * lit(0.99);
        let mut y: Vec<T> = start
            .iter()
            .map(|v| v.ln().max(-clamp).min(clamp))
            .collect();
        let worst = self
            .constraints
            .iter()
            .map(|p| p.log_eval(&y))
            .fold(T::neg_infinity(), T::max);
        let margin = lit::<T>(1e-3);
        if worst < -margin {
            return Ok(y);
        }
        let lifted: Vec<Posynomial<T>> = self
            .constraints
            .iter()
            .map(|p| {
                p.extend(n + 1)
                    .div_monomial(&Monomial::product(T::one(), n + 1, &[n]))
            })
            .collect();
        let mut c = vec![T::zero(); n + 1];
        c[n] = T::one();
        let mut linear = box_rows(n, n + 1, opts.log_box);
        let mut floor = vec![T::zero(); n + 1];
        floor[n] = -T::one();
        linear.push((floor, T::one()));
        let barrier = Barrier {
            c,
            posys: &lifted,
            linear,
        };
        y.push(worst + T::one());
        let found = |y: &[T]| y[n] < -margin;
        let _ = barrier.solve(&mut y, opts, found);
        let s = y[n];
        if s < -margin || (s < T::zero() && self.max_log_constraint_y(&y[..n]) < T::zero()) {
            y.truncate(n);
            Ok(y)
        } else {
            Err(Error::Infeasible {
                margin: s.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    fn max_log_constraint_y(&self, y: &[T]) -> T {
        self.constraints
            .iter()
            .map(|p| p.log_eval(y))
            .fold(T::neg_infinity(), T::max)
    }

    /// Solves from `start` (any positive point; phase one runs when it is not
    /// strictly feasible).
    pub fn solve(&self, start: &[T], opts: &GpOptions<T>) -> Result<GpSolution<T>> {
        let n = self.dim();
        let mut y = self.phase_one(start, opts)?;
        let c = self.objective.exps.clone();
        let barrier = Barrier {
            c,
            posys: &self.constraints,
            linear: box_rows(n, n, opts.log_box),
        };
        let (kkt_residual, newton_steps) = barrier.solve(&mut y, opts, |_| false)?;
        let x: Vec<T> = y.iter().map(|v| v.exp()).collect();
        Ok(GpSolution {
            objective: self.objective.eval(&x),
            x,
            kkt_residual,
            newton_steps,
        })
    }
}

impl<T: Real> Monomial<T> {
    /// Same monomial in a space with extra trailing variables (exponent 0).
    pub fn extend(&self, n: usize) -> Monomial<T> {
        let mut exps = self.exps.clone();
        exps.resize(n, T::zero());
        Monomial {
            coeff: self.coeff,
            exps,
        }
    }
}

impl<T: Real> Posynomial<T> {
    pub fn extend(&self, n: usize) -> Posynomial<T> {
        Posynomial {
            terms: self.terms.iter().map(|m| m.extend(n)).collect(),
        }
    }
}
