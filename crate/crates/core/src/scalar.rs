//! Coefficient scalars for the symbolic layer.
//!
//! The expression and form types are generic over the coefficient ring.
//! Exact equality of normal forms is only meaningful for an exact ring, so
//! the crate-root aliases pin everything to [`crate::Rat`]; `f32`/`f64` satisfy the
//! same bound for numeric experiments.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};
use std::fmt::{Debug, Display};
use std::ops::Neg;

/// Ring of coefficients for symbolic expressions.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialEq + PartialOrd + Debug + Display + 'static
{
    fn from_i64(v: i64) -> Self;

    /// Exact fraction, used by the lexer for rational literals.
    fn from_fraction(num: i64, den: i64) -> Self;

    /// Lossy view for the numeric lane.
    fn to_f64(&self) -> f64;

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_fraction(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

macro_rules! impl_scalar_float {
    ($f:ty) => {
        impl Scalar for $f {
            fn from_i64(v: i64) -> Self {
                v as $f
            }

            fn from_fraction(num: i64, den: i64) -> Self {
                (num as $f) / (den as $f)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

impl_scalar_float!(f32);
impl_scalar_float!(f64);

/// Shorthand for 1 in the ring.
pub fn one<C: Scalar>() -> C {
    C::one()
}

/// Sign as a ring element: +1 or -1.
pub fn sign<C: Scalar>(positive: bool) -> C {
    if positive {
        C::one()
    } else {
        -C::one()
    }
}
