//! Field abstraction shared by the exact and floating evaluation paths.
//!
//! Polynomial families, terminating hypergeometric sums and the small dense
//! solvers are written once against [`Scalar`] and instantiated with `f64`,
//! `f32`, or [`BigRational`] for exact arithmetic.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// A field element usable by the generic evaluators.
pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync {
    fn from_i64(v: i64) -> Self;

    /// Conversion from `f64`. Exact for binary rationals in the exact field.
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Magnitude used for pivoting and convergence tests.
    fn magnitude(&self) -> f64;

    /// True when the value equals an integer `k <= 0`.
    fn is_nonpositive_integer(&self) -> bool;

    fn from_usize(v: usize) -> Self {
        Self::from_i64(v as i64)
    }
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn from_f64(v: f64) -> Self {
                v as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn magnitude(&self) -> f64 {
                self.abs() as f64
            }
            fn is_nonpositive_integer(&self) -> bool {
                *self <= 0.0 && self.fract() == 0.0
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).expect("finite f64")
    }
    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
    fn magnitude(&self) -> f64 {
        ratio_to_f64(&self.abs())
    }
    fn is_nonpositive_integer(&self) -> bool {
        self.is_integer() && !self.is_positive()
    }
}

impl Scalar for Complex<f64> {
    fn from_i64(v: i64) -> Self {
        Complex::new(v as f64, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        Complex::new(v, 0.0)
    }
    fn to_f64(&self) -> f64 {
        self.re
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_nonpositive_integer(&self) -> bool {
        self.im == 0.0 && self.re <= 0.0 && self.re.fract() == 0.0
    }
}

/// Correctly scaled conversion of a big rational to `f64`.
///
/// `Ratio::to_f64` overflows for large numerators and denominators even when
/// the quotient is moderate, so both sides are shifted to ~64 significant
/// bits first.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let num = r.numer();
    let den = r.denom();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let shift_n = (nb - 64).max(0);
    let shift_d = (db - 64).max(0);
    let n = (num >> shift_n as usize).to_f64().unwrap_or(f64::NAN);
    let d = (den >> shift_d as usize).to_f64().unwrap_or(f64::NAN);
    (n / d) * 2f64.powi((shift_n - shift_d) as i32)
}

/// Exact rational from a ratio of integers.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_ratio_conversion_keeps_scale() {
        let big = BigInt::from(10).pow(400);
        let r = BigRational::new(big.clone() * 3, big * 7);
        assert!((ratio_to_f64(&r) - 3.0 / 7.0).abs() < 1e-16);
        assert_eq!(ratio_to_f64(&rational(-5, 4)), -1.25);
    }

    #[test]
    fn nonpositive_integer_detection() {
        assert!(0.0f64.is_nonpositive_integer());
        assert!((-3.0f64).is_nonpositive_integer());
        assert!(!(-2.5f64).is_nonpositive_integer());
        assert!(rational(-4, 2).is_nonpositive_integer());
        assert!(!rational(1, 2).is_nonpositive_integer());
        assert_eq!(<BigRational as Scalar>::from_f64(0.375), rational(3, 8));
    }
}
