//! Exact rational helpers shared by the partition, zonal and bound code.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

/// Arbitrary-precision fraction, always in lowest terms with a positive
/// denominator.
pub type ExactRational = BigRational;

pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `n!` rounded once to the nearest `f64`.
pub fn factorial_f64(n: u32) -> f64 {
    factorial(n).to_f64().unwrap_or(f64::INFINITY)
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)` in exact arithmetic.
pub fn rising(a: &ExactRational, k: u32) -> ExactRational {
    (0..k).fold(ExactRational::one(), |acc, i| {
        acc * (a + ExactRational::from_integer(BigInt::from(i)))
    })
}

/// `1/2` as an exact rational.
pub fn half() -> ExactRational {
    ExactRational::new(BigInt::from(1), BigInt::from(2))
}

pub fn ratio(num: i64, den: i64) -> ExactRational {
    ExactRational::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(q: &ExactRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
