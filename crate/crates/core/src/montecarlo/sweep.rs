//! Solved allocations over grids of average power and UR floor.

use rayon::prelude::*;

use crate::alloc::gp::{solve_nonreciprocal, NonRecProblem};
use crate::alloc::{solve_reciprocal, AllocProblem, Branch, Budgets};
use crate::analytic::{JensenVariant, NmseFormulas};
use crate::error::Result;
use crate::params::{PowerAllocation, Scheme, SystemParams};

type Params = SystemParams<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveDetail {
    Branch(Branch),
    /// Condensation passes.
    Iterations(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocRow {
    pub p_ave_db: f64,
    pub gamma: f64,
    pub tau_f: usize,
    pub alloc: PowerAllocation<f64>,
    pub nmse_l: f64,
    pub nmse_u: f64,
    pub detail: SolveDetail,
}

fn solve_point(
    p: &Params,
    scheme: Scheme,
    gamma: f64,
    budgets: Option<Budgets<f64>>,
) -> Result<(PowerAllocation<f64>, SolveDetail)> {
    p.validate()?;
    Ok(match scheme {
        Scheme::Reciprocal => {
            let mut problem = AllocProblem::new(*p, gamma);
            if let Some(b) = budgets {
                problem = problem.with_budgets(b);
            }
            let s = solve_reciprocal(&problem)?;
            (
                PowerAllocation::Reciprocal(s.alloc),
                SolveDetail::Branch(s.branch),
            )
        }
        Scheme::NonReciprocal => {
            let s = solve_nonreciprocal(&NonRecProblem::new(*p, gamma))?;
            (
                PowerAllocation::NonReciprocal(s.alloc),
                SolveDetail::Iterations(s.trace.iterations.len()),
            )
        }
    })
}

fn row(
    p: &Params,
    scheme: Scheme,
    p_ave_db: f64,
    gamma: f64,
    budgets: Option<Budgets<f64>>,
    variant: JensenVariant,
) -> Result<AllocRow> {
    let (alloc, detail) = solve_point(p, scheme, gamma, budgets)?;
    let f = NmseFormulas::new(scheme, *p).with_jensen(variant);
    Ok(AllocRow {
        p_ave_db,
        gamma,
        tau_f: p.tau_f,
        nmse_l: f.nmse_l(&alloc).unwrap_or(f64::NAN),
        nmse_u: f.nmse_u(&alloc).unwrap_or(f64::NAN),
        alloc,
        detail,
    })
}

/// One solve per `(γ, P_ave)` pair, γ-major in the given order.
pub fn sweep_power_allocation(
    params: &Params,
    scheme: Scheme,
    gammas: &[f64],
    paves_db: &[f64],
    variant: JensenVariant,
) -> Result<Vec<AllocRow>> {
    let points: Vec<(f64, f64)> = gammas
        .iter()
        .flat_map(|&g| paves_db.iter().map(move |&d| (g, d)))
        .collect();
    points
        .par_iter()
        .map(|&(g, db)| row(&params.with_p_ave_db(db), scheme, db, g, None, variant))
        .collect()
}

/// Reciprocal solves over forward-training lengths with the energy budgets
/// held at their values for the minimum lengths, so only the per-slot cost
/// of AN changes along the sweep.
pub fn sweep_forward_length(
    params: &Params,
    gamma: f64,
    taus: &[usize],
    p_ave_db: f64,
) -> Result<Vec<AllocRow>> {
    let base = params.with_p_ave_db(p_ave_db);
    let budgets = Budgets::at_minimum_lengths(&base);
    taus.par_iter()
        .map(|&tau| {
            let p = SystemParams { tau_f: tau, ..base };
            row(
                &p,
                Scheme::Reciprocal,
                p_ave_db,
                gamma,
                Some(budgets),
                JensenVariant::default(),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_power_tight_floor_spends_nothing_on_reverse_or_an() {
        let p = SystemParams::reference(10.0);
        let rows = sweep_power_allocation(
            &p,
            Scheme::Reciprocal,
            &[0.03],
            &[10.0],
            JensenVariant::Printed,
        )
        .unwrap();
        match rows[0].alloc {
            PowerAllocation::Reciprocal(a) => {
                assert_eq!(a.e_r, 0.0);
                assert_eq!(a.var_a, 0.0);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn rows_meet_the_floor() {
        let p = SystemParams::reference(20.0);
        for scheme in [Scheme::Reciprocal, Scheme::NonReciprocal] {
            let rows = sweep_power_allocation(
                &p,
                scheme,
                &[0.1, 0.03],
                &[15.0, 25.0],
                JensenVariant::Printed,
            )
            .unwrap();
            assert_eq!(rows.len(), 4);
            assert_eq!((rows[0].gamma, rows[0].p_ave_db), (0.1, 15.0));
            for r in rows {
                assert!(r.nmse_u >= r.gamma - 1e-9, "{scheme} {r:?}");
            }
        }
    }
}
