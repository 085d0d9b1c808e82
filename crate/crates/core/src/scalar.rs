//! Scalar abstraction for the moment/cumulant machinery: a commutative
//! *-ring interface implemented by `f64`, complex doubles, and an exact
//! complex-rational type. Prediction code runs over the exact type; empirical
//! estimates live in floats; the transform algorithms are generic over both.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use std::fmt;

/// Commutative *-ring operations used by the free-probability transforms.
///
/// Call these through a generic parameter (`T: Scalar`); at concrete float
/// types prefer the native operators so the names cannot clash with the
/// standard arithmetic traits.
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Complex conjugate (identity on real types).
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Lossy view as `(re, im)` doubles, for reports.
    fn to_f64_pair(&self) -> (f64, f64);
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64_pair(&self) -> (f64, f64) {
        (*self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_int(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn to_f64_pair(&self) -> (f64, f64) {
        (self.re, self.im)
    }
}

/// Exact complex number with rational real and imaginary parts. The carrier
/// for every symbolic prediction that must later be compared against floats.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CRat {
    re: BigRational,
    im: BigRational,
}

impl CRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRat { re, im }
    }

    pub fn from_rat(re: BigRational) -> Self {
        CRat {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_int_ratio(num: i64, den: i64) -> Self {
        CRat::from_rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact conversion of a pair of finite doubles (every finite double is a
    /// rational number). Errors on NaN or infinity.
    pub fn from_f64_exact(re: f64, im: f64) -> Result<Self> {
        let conv = |x: f64| {
            BigRational::from_f64(x)
                .ok_or_else(|| Error::invalid(format!("non-finite value {x} in exact context")))
        };
        Ok(CRat {
            re: conv(re)?,
            im: conv(im)?,
        })
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn add(&self, rhs: &Self) -> Self {
        CRat {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        CRat {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        CRat {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }

    pub fn neg(&self) -> Self {
        CRat {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn conj(&self) -> Self {
        CRat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Scalar for CRat {
    fn zero() -> Self {
        CRat::from_rat(BigRational::zero())
    }
    fn one() -> Self {
        CRat::from_int(1)
    }
    fn from_int(v: i64) -> Self {
        CRat::from_rat(BigRational::from_integer(BigInt::from(v)))
    }
    fn add(&self, rhs: &Self) -> Self {
        CRat::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        CRat::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        CRat::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        CRat::neg(self)
    }
    fn conj(&self) -> Self {
        CRat::conj(self)
    }
    fn is_zero(&self) -> bool {
        CRat::is_zero(self)
    }
    fn to_f64_pair(&self) -> (f64, f64) {
        CRat::to_f64_pair(self)
    }
}

impl fmt::Debug for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{} - {}i", self.re, -self.im.clone())
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}
