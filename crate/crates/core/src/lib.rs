//! Discriminatory channel estimation via two-way training in MIMO links.
//!
//! The closed-form evaluators and both power allocators are generic over the
//! real scalar ([`scalar::Real`], `f32` or `f64`); the matrix simulator runs in
//! `f64`. The aliases below fix the common `f64` instantiations.

// `!(x > 0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alloc;
pub mod analytic;
pub mod error;
pub mod estimation;
pub mod model;
pub mod montecarlo;
pub mod params;
pub mod scalar;

pub use analytic::{DerivedConstants, JensenVariant, NmseFormulas};
pub use error::{Error, Result};
pub use params::{
    NonReciprocalAllocation, PowerAllocation, ReciprocalAllocation, Scheme, SystemParams,
};
pub use scalar::Real;

pub type Params = SystemParams<f64>;
pub type RecAlloc = ReciprocalAllocation<f64>;
pub type NonRecAlloc = NonReciprocalAllocation<f64>;
pub type Allocation = PowerAllocation<f64>;
