//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the solvers and diagnostics are generic over.
///
/// Implemented for `f32` and `f64`. Everything that touches files or the
/// command line works on `f64` through the aliases at the crate root.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Maximum absolute value of a slice, zero for an empty slice.
pub fn sup_norm<F: Real>(values: &[F]) -> F {
    values.iter().fold(F::zero(), |m, v| m.max(v.abs()))
}

/// Maximum absolute pointwise difference of two equally long slices.
pub fn sup_distance<F: Real>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(F::zero(), |m, (x, y)| m.max((*x - *y).abs()))
}

/// Composite trapezoidal rule on a uniform grid.
pub fn trapezoid<F: Real>(values: &[F], h: F) -> F {
    match values.len() {
        0 | 1 => F::zero(),
        n => {
            let inner: F = values[1..n - 1].iter().copied().sum();
            h * (inner + (values[0] + values[n - 1]) * F::lit(0.5))
        }
    }
}

/// Median of the given values (average of the two middle ones for even length).
///
/// NaNs sort last. Returns zero for an empty input.
pub fn median<F: Real>(mut values: Vec<F>) -> F {
    if values.is_empty() {
        return F::zero();
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Greater));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) * F::lit(0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_is_exact_for_linear_data() {
        let xs: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x + 1.0).collect();
        assert!((trapezoid(&ys, 0.1) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(vec![3.0f64, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0f32, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(Vec::<f64>::new()), 0.0);
    }
}
