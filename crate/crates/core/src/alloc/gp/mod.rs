//! Non-reciprocal allocation as a sequence of geometric programs.

pub mod condense;
pub mod oracle;
pub mod posynomial;
pub mod solver;

pub use condense::{
    condense, from_gp_variables, initial_point, solve_nonreciprocal, tangency_check,
    theta_exponents, to_gp_variables, CondensationTrace, CondenseOptions, CondenseResult,
    GpConstants, GpState, NonRecBudgets, NonRecProblem, TangencyReport,
};
pub use oracle::grid_oracle_nonreciprocal;
pub use posynomial::{Monomial, Posynomial};
pub use solver::{GeometricProgram, GpOptions, GpSolution};
