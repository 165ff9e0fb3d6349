//! Scalar abstraction for the numeric core.
//!
//! Everything numeric in this crate is generic over [`Real`], a thin bundle of
//! `num_traits` bounds satisfied by `f32` and `f64`. The crate root re-exports
//! `f64` aliases for the common types, which is what the CLI and file layers
//! use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the estimators are generic over.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + 'static
{
    /// Convert an `f64` constant into the scalar type.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant not representable")
    }

    /// Lossy view as `f64`, mainly for diagnostics and file output.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blanket_impl_covers_both_float_widths() {
        assert_eq!(f64::of(0.5), 0.5);
        assert_eq!(f32::of(0.5), 0.5f32);
        assert_eq!(1.25f64.to_f64_lossy(), 1.25);
    }
}
