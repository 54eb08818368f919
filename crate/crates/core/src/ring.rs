//! Value rings for arithmetic functions.

use std::fmt::Debug;
use std::ops::{Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A commutative ring that arithmetic functions may take values in.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Multiplicative inverse when `self` is a unit.
    fn unit_inverse(&self) -> Option<Self>;

    fn from_i64(n: i64) -> Self;

    fn from_bigint(n: &BigInt) -> Self;
}

impl Ring for i64 {
    fn unit_inverse(&self) -> Option<Self> {
        (self.abs() == 1).then_some(*self)
    }

    fn from_i64(n: i64) -> Self {
        n
    }

    fn from_bigint(n: &BigInt) -> Self {
        n.to_i64().expect("integer does not fit in i64")
    }
}

impl Ring for i128 {
    fn unit_inverse(&self) -> Option<Self> {
        (self.abs() == 1).then_some(*self)
    }

    fn from_i64(n: i64) -> Self {
        n as i128
    }

    fn from_bigint(n: &BigInt) -> Self {
        n.to_i128().expect("integer does not fit in i128")
    }
}

impl Ring for BigInt {
    fn unit_inverse(&self) -> Option<Self> {
        self.abs().is_one().then(|| self.clone())
    }

    fn from_i64(n: i64) -> Self {
        BigInt::from(n)
    }

    fn from_bigint(n: &BigInt) -> Self {
        n.clone()
    }
}

impl Ring for BigRational {
    fn unit_inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
}

impl Ring for f64 {
    fn unit_inverse(&self) -> Option<Self> {
        (*self != 0.0).then(|| self.recip())
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Ring for Complex64 {
    fn unit_inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.inv())
    }

    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn from_bigint(n: &BigInt) -> Self {
        Complex64::new(n.to_f64().unwrap_or(f64::INFINITY), 0.0)
    }
}
