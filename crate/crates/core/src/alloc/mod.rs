//! Training-energy and AN-power allocation for both channel models.

pub mod gp;
pub mod reciprocal;

pub use reciprocal::{
    grid_oracle_reciprocal, solve_reciprocal, AllocProblem, Branch, Budgets, ReciprocalSolution,
};
