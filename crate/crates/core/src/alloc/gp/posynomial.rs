//! Monomials and posynomials over positive variables, with log-space
//! evaluation for the convex form.

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Monomial<T> {
    pub coeff: T,
    pub exps: Vec<T>,
}

impl<T: Real> Monomial<T> {
    pub fn new(coeff: T, exps: Vec<T>) -> Self {
        Self { coeff, exps }
    }

    /// Monomial with exponent 1 on each listed variable.
    pub fn product(coeff: T, n: usize, vars: &[usize]) -> Self {
        let mut exps = vec![T::zero(); n];
        for &v in vars {
            exps[v] = exps[v] + T::one();
        }
        Self { coeff, exps }
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.exps.iter().zip(x).fold(self.coeff, |acc, (&a, &xi)| {
            if a == T::zero() {
                acc
            } else {
                acc * xi.powf(a)
            }
        })
    }

    /// `log c + a·y` with `y = log x`.
    pub fn log_eval(&self, y: &[T]) -> T {
        self.exps
            .iter()
            .zip(y)
            .fold(self.coeff.ln(), |acc, (&a, &yi)| acc + a * yi)
    }

    pub fn div(&self, other: &Monomial<T>) -> Monomial<T> {
        Monomial {
            coeff: self.coeff / other.coeff,
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Posynomial<T> {
    pub terms: Vec<Monomial<T>>,
}

impl<T: Real> Posynomial<T> {
    pub fn new(terms: Vec<Monomial<T>>) -> Self {
        Self { terms }
    }

    pub fn dim(&self) -> usize {
        self.terms.first().map_or(0, |m| m.exps.len())
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.terms.iter().fold(T::zero(), |acc, m| acc + m.eval(x))
    }

    pub fn scale(&self, k: T) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial::new(m.coeff * k, m.exps.clone()))
                .collect(),
        }
    }

    /// Every term multiplied by `m`.
    pub fn mul_monomial(&self, m: &Monomial<T>) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Monomial {
                    coeff: t.coeff * m.coeff,
                    exps: t.exps.iter().zip(&m.exps).map(|(&a, &b)| a + b).collect(),
                })
                .collect(),
        }
    }

    pub fn div_monomial(&self, m: &Monomial<T>) -> Self {
        Self {
            terms: self.terms.iter().map(|t| t.div(m)).collect(),
        }
    }

    /// `log Σ exp(log c_k + a_k·y)`.
    pub fn log_eval(&self, y: &[T]) -> T {
        let z: Vec<T> = self.terms.iter().map(|m| m.log_eval(y)).collect();
        let top = z.iter().cloned().fold(T::neg_infinity(), T::max);
        top + z
            .iter()
            .fold(T::zero(), |acc, &v| acc + (v - top).exp())
            .ln()
    }

    /// Value, gradient and row-major Hessian of the log-space form.
    pub fn log_derivatives(&self, y: &[T]) -> (T, Vec<T>, Vec<T>) {
        let n = y.len();
        let z: Vec<T> = self.terms.iter().map(|m| m.log_eval(y)).collect();
        let top = z.iter().cloned().fold(T::neg_infinity(), T::max);
        let w: Vec<T> = z.iter().map(|&v| (v - top).exp()).collect();
        let total = w.iter().fold(T::zero(), |a, &b| a + b);
        let value = top + total.ln();
        let mut grad = vec![T::zero(); n];
        let mut hess = vec![T::zero(); n * n];
        for (m, &wk) in self.terms.iter().zip(&w) {
            let p = wk / total;
            for i in 0..n {
                let ai = m.exps[i];
                if ai == T::zero() {
                    continue;
                }
                grad[i] = grad[i] + p * ai;
                for j in 0..n {
                    hess[i * n + j] = hess[i * n + j] + p * ai * m.exps[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = hess[i * n + j] - grad[i] * grad[j];
            }
        }
        (value, grad, hess)
    }

    /// Local monomial fit at `x`: equal value and equal log-gradient. By the
    /// AM-GM inequality it never exceeds the posynomial.
    pub fn monomial_approx(&self, x: &[T]) -> Monomial<T> {
        let n = x.len();
        let vals: Vec<T> = self.terms.iter().map(|m| m.eval(x)).collect();
        let g = vals.iter().fold(T::zero(), |a, &b| a + b);
        let mut theta = vec![T::zero(); n];
        for (m, &v) in self.terms.iter().zip(&vals) {
            for (th, &e) in theta.iter_mut().zip(&m.exps) {
                *th = *th + e * v / g;
            }
        }
        let denom = theta
            .iter()
            .zip(x)
            .fold(T::one(), |acc, (&a, &xi)| acc * xi.powf(a));
        Monomial {
            coeff: g / denom,
            exps: theta,
        }
    }
}
