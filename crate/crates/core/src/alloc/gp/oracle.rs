//! Brute-force lattice search for the non-reciprocal problem.

use rayon::prelude::*;

use super::condense::NonRecProblem;
use crate::analytic::{nmse_l_nonreciprocal_approx, JensenVariant};
use crate::error::{Error, Result};
use crate::params::NonReciprocalAllocation;
use crate::scalar::{count, Real};

/// Lattice `k·max/resolution` over `(E_0, E_1, E_2, σ_a²)`. For each lattice
/// point `E_3` is pushed to the largest value the budgets and the UR floor
/// allow, since the LR NMSE never increases in `E_3`. Resolutions that are
/// multiples of each other give nested lattices, so the optimum is monotone
/// in refinement.
pub fn grid_oracle_nonreciprocal<R: Real>(
    problem: &NonRecProblem<R>,
    resolution: usize,
    variant: JensenVariant,
) -> Result<(NonReciprocalAllocation<R>, R)> {
    problem.check()?;
    let p = &problem.params;
    let b = &problem.budgets;
    let res = resolution.max(1);
    let an_unit = count::<R>(p.an_dims()) * count::<R>(p.tau_3);
    let max_e0 = b.average.min(b.tx);
    let max_lr = b.average.min(b.lr);
    let max_var_a = max_e0 / an_unit;
    let node = |max: R, k: usize| max * count(k) / count(res);
    let ur_slope = count::<R>(p.n_t) * (problem.gamma.recip() - p.var_g.recip());

    let best = (0..=res)
        .into_par_iter()
        .map(|i0| {
            let mut best: Option<(R, NonReciprocalAllocation<R>)> = None;
            let e_0 = node(max_e0, i0);
            for ia in 0..=res {
                let var_a = node(max_var_a, ia);
                let an = an_unit * var_a;
                let tx_left = b.tx - e_0 - an;
                if tx_left < R::zero() || e_0 + an > b.average {
                    break;
                }
                let t4 = count::<R>(p.an_dims()) * var_a * p.var_g + p.var_v;
                let ur_cap = ur_slope * t4;
                for i1 in 0..=res {
                    let e_1 = node(max_lr, i1);
                    for i2 in 0..=res - i1 {
                        let e_2 = node(max_lr, i2);
                        if e_1 + e_2 > b.lr {
                            break;
                        }
                        let avg_left = b.average - e_0 - an - e_1 - e_2;
                        if avg_left < R::zero() {
                            break;
                        }
                        let e_3 = avg_left.min(tx_left).min(ur_cap);
                        let a = NonReciprocalAllocation {
                            e_0,
                            e_1,
                            e_2,
                            e_3,
                            var_a,
                        };
                        let f = nmse_l_nonreciprocal_approx(p, &a, variant);
                        if f.is_nan() {
                            continue;
                        }
                        if best.as_ref().is_none_or(|(v, _)| f < *v) {
                            best = Some((f, a));
                        }
                    }
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(
            None,
            |acc: Option<(R, NonReciprocalAllocation<R>)>, cand| match acc {
                Some(a) if a.0 <= cand.0 => Some(a),
                _ => Some(cand),
            },
        );
    best.map(|(f, a)| (a, f)).ok_or(Error::NoFeasiblePoint)
}
