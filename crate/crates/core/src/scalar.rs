use num_complex::Complex;
use num_rational::{BigRational, Ratio};
use num_traits::Num;
use std::fmt::Debug;

/// Field-like scalar used by the polynomial layer.
///
/// Only ring/field operations and small integer constants are needed, which
/// is what lets the terminating hypergeometric series and Jacobi polynomials
/// run on exact rationals as well as on floats.
pub trait Scalar: Num + Clone + Debug {
    fn from_i64(n: i64) -> Self;

    /// `n / d` as a scalar.
    fn ratio(n: i64, d: i64) -> Self {
        Self::from_i64(n) / Self::from_i64(d)
    }
}

macro_rules! float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn from_i64(n: i64) -> Self {
                n as $t
            }
        }
        impl Scalar for Complex<$t> {
            fn from_i64(n: i64) -> Self {
                Complex::new(n as $t, 0.0)
            }
        }
    )*};
}
float_scalar!(f32, f64);

impl Scalar for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
}

impl Scalar for Ratio<i64> {
    fn from_i64(n: i64) -> Self {
        Ratio::from_integer(n)
    }
}

impl Scalar for Ratio<i128> {
    fn from_i64(n: i64) -> Self {
        Ratio::from_integer(n as i128)
    }
}
