//! Exact values of the form `q * n^(e/2)` with rational `q`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Ring operations needed by the trace and enumeration sums, so the same code
/// runs in exact integers and in floating point.
pub trait TraceScalar:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
}

impl TraceScalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl TraceScalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
}

impl TraceScalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

/// `coeff * n^(half_exponent / 2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtScaled {
    pub coeff: BigRational,
    pub half_exponent: i32,
    pub n: u64,
}

impl SqrtScaled {
    pub fn new(coeff: BigRational, half_exponent: i32, n: u64) -> Self {
        Self {
            coeff,
            half_exponent,
            n,
        }
    }

    pub fn from_integer(v: BigInt, half_exponent: i32, n: u64) -> Self {
        Self::new(BigRational::from_integer(v), half_exponent, n)
    }

    pub fn to_f64(&self) -> f64 {
        let c = self.coeff.to_f64().unwrap_or(f64::NAN);
        c * (self.n as f64).powf(self.half_exponent as f64 / 2.0)
    }

    /// Rewrites the value with a rational coefficient and half-exponent 0 or 1.
    fn reduced(&self) -> (BigRational, bool) {
        let n = BigInt::from(self.n);
        let whole = self.half_exponent.div_euclid(2);
        let odd = self.half_exponent.rem_euclid(2) == 1;
        let scale = if whole >= 0 {
            BigRational::from_integer(num_traits::pow(n, whole as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(n, (-whole) as usize))
        };
        let mut coeff = &self.coeff * scale;
        let root = self.n.isqrt();
        if odd && root * root == self.n {
            coeff *= BigRational::from_integer(BigInt::from(root));
            return (coeff, false);
        }
        (coeff, odd)
    }

    /// Exact equality of the represented real numbers.
    pub fn exact_eq(&self, other: &SqrtScaled) -> bool {
        assert_eq!(self.n, other.n, "comparing values with different n");
        let (a, ra) = self.reduced();
        let (b, rb) = other.reduced();
        if ra == rb {
            a == b
        } else {
            // q1 = q2 sqrt(n) with sqrt(n) irrational forces both to vanish
            a.is_zero() && b.is_zero()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn abs_diff_f64(&self, other: &SqrtScaled) -> f64 {
        if self.exact_eq(other) {
            0.0
        } else {
            (self.to_f64() - other.to_f64()).abs()
        }
    }

    pub fn abs(&self) -> SqrtScaled {
        Self::new(self.coeff.abs(), self.half_exponent, self.n)
    }
}

impl fmt::Display for SqrtScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * {}^({}/2)", self.coeff, self.n, self.half_exponent)
    }
}
