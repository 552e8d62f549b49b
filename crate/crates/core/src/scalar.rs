use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Real scalar used by the closed-form and optimization layers: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts a count into `T`.
#[inline]
pub fn count<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// `10^(db/10)`.
pub fn db_to_linear<T: Real>(db: T) -> T {
    lit::<T>(10.0).powf(db / lit(10.0))
}

/// `10·log10(x)`; zero maps to negative infinity.
pub fn linear_to_db<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::neg_infinity()
    } else {
        lit::<T>(10.0) * x.log10()
    }
}

/// Relative difference `|a-b| / max(|a|,|b|,tiny)`.
pub fn rel_diff<T: Real>(a: T, b: T) -> T {
    let scale = a.abs().max(b.abs()).max(T::min_positive_value());
    (a - b).abs() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_round_trip() {
        assert!((db_to_linear(20.0_f64) - 100.0).abs() < 1e-12);
        assert!((db_to_linear(30.0_f32) - 1000.0).abs() < 1e-2);
        assert!((linear_to_db(db_to_linear(13.7_f64)) - 13.7).abs() < 1e-12);
        assert_eq!(linear_to_db(0.0_f64), f64::NEG_INFINITY);
    }
}
