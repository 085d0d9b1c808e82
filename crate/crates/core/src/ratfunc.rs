//! Exact univariate polynomial and rational-function arithmetic over the
//! integers/rationals, plus a generic Gauss–Jordan solver for any exact
//! field. The indeterminate is conventionally the dimension and prints as
//! `M`.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Polynomial with integer coefficients, ascending by degree, with no trailing
/// zero coefficient (the zero polynomial has an empty coefficient vector).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyZ {
    coeffs: Vec<BigInt>,
}

impl PolyZ {
    /// Builds from ascending coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PolyZ { coeffs }
    }

    /// Convenience constructor from machine integers (ascending by degree).
    pub fn from_i64s(coeffs: &[i64]) -> Self {
        PolyZ::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        PolyZ { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        PolyZ::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        PolyZ::from_coeffs(vec![c])
    }

    /// `c * M^k`.
    pub fn monomial(k: usize, c: BigInt) -> Self {
        if c.is_zero() {
            return PolyZ::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        PolyZ { coeffs }
    }

    /// The indeterminate `M`.
    pub fn var() -> Self {
        PolyZ::monomial(1, BigInt::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Leading coefficient, `None` for zero.
    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Ascending coefficients (no trailing zeros).
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Horner evaluation at a rational point.
    pub fn eval_rat(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Horner evaluation at an integer point.
    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Greatest common divisor of the coefficients (non-negative; 0 for the
    /// zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }
}

impl std::ops::Add for &PolyZ {
    type Output = PolyZ;
    fn add(self, rhs: &PolyZ) -> PolyZ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i] += c;
        }
        PolyZ::from_coeffs(out)
    }
}

impl std::ops::Sub for &PolyZ {
    type Output = PolyZ;
    fn sub(self, rhs: &PolyZ) -> PolyZ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i] -= c;
        }
        PolyZ::from_coeffs(out)
    }
}

impl std::ops::Mul for &PolyZ {
    type Output = PolyZ;
    fn mul(self, rhs: &PolyZ) -> PolyZ {
        if self.is_zero() || rhs.is_zero() {
            return PolyZ::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyZ::from_coeffs(out)
    }
}

impl std::ops::Neg for &PolyZ {
    type Output = PolyZ;
    fn neg(self) -> PolyZ {
        PolyZ {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for PolyZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = mag.is_one();
            match (k, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "M")?,
                (1, false) => write!(f, "{mag}*M")?,
                (_, true) => write!(f, "M^{k}")?,
                (_, false) => write!(f, "{mag}*M^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PolyZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---------- rational-coefficient scratch representation ----------
// Used only inside gcd/normalization; ascending, trimmed.

type QPoly = Vec<BigRational>;

fn q_trim(p: &mut QPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn q_from_z(p: &PolyZ) -> QPoly {
    p.coeffs()
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect()
}

/// Remainder of `a` modulo `b` (`b` non-zero), both ascending.
fn q_rem(mut a: QPoly, b: &QPoly) -> QPoly {
    let db = b.len() - 1;
    let lead = b.last().expect("q_rem by zero").clone();
    while a.len() >= b.len() && !a.is_empty() {
        let da = a.len() - 1;
        let factor = a.last().unwrap() / &lead;
        let shift = da - db;
        for (i, bc) in b.iter().enumerate() {
            let delta = &factor * bc;
            a[i + shift] -= delta;
        }
        q_trim(&mut a);
        if a.len() <= shift {
            break;
        }
    }
    a
}

/// Exact quotient `a / b`; panics if the division has a remainder (callers
/// only divide by exact divisors produced by the gcd).
fn q_div_exact(mut a: QPoly, b: &QPoly) -> QPoly {
    assert!(!b.is_empty(), "division by zero polynomial");
    if a.is_empty() {
        return a;
    }
    let db = b.len() - 1;
    let lead = b.last().unwrap().clone();
    let mut q = vec![BigRational::zero(); a.len().saturating_sub(db)];
    while a.len() >= b.len() {
        let da = a.len() - 1;
        let factor = a.last().unwrap() / &lead;
        let shift = da - db;
        q[shift] = factor.clone();
        for (i, bc) in b.iter().enumerate() {
            let delta = &factor * bc;
            a[i + shift] -= delta;
        }
        q_trim(&mut a);
    }
    assert!(a.is_empty(), "q_div_exact: non-zero remainder");
    q_trim(&mut q);
    q
}

/// Monic gcd over the rationals (returns `[1]` when either input is a
/// non-zero constant or the polynomials are coprime; returns the other
/// argument's monic form when one input is zero).
fn q_gcd(mut a: QPoly, mut b: QPoly) -> QPoly {
    q_trim(&mut a);
    q_trim(&mut b);
    while !b.is_empty() {
        let r = q_rem(a, &b);
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().cloned() {
        for c in &mut a {
            *c /= &lead;
        }
    }
    a
}

/// Clears denominators: returns the integer polynomial `l * p` where `l` is
/// the least common multiple of the coefficient denominators.
fn q_clear_denominators(p: &QPoly) -> (BigInt, PolyZ) {
    let l = p
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let coeffs = p
        .iter()
        .map(|c| {
            let scaled = c * BigRational::from_integer(l.clone());
            debug_assert!(scaled.is_integer());
            scaled.to_integer()
        })
        .collect();
    (l, PolyZ::from_coeffs(coeffs))
}

/// A reduced ratio of integer polynomials in the dimension variable `M`.
///
/// Canonical form: numerator and denominator share no polynomial factor over
/// the rationals, their integer contents are coprime, and the denominator's
/// leading coefficient is positive. The zero function is `0 / 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFuncM {
    num: PolyZ,
    den: PolyZ,
}

impl RatFuncM {
    /// Builds `num / den` in canonical form; errors when `den` is zero.
    pub fn new(num: PolyZ, den: PolyZ) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::invalid("rational function with zero denominator"));
        }
        if num.is_zero() {
            return Ok(RatFuncM {
                num: PolyZ::zero(),
                den: PolyZ::one(),
            });
        }
        let nq = q_from_z(&num);
        let dq = q_from_z(&den);
        let g = q_gcd(nq.clone(), dq.clone());
        let (nq, dq) = if g.len() > 1 {
            (q_div_exact(nq, &g), q_div_exact(dq, &g))
        } else {
            (nq, dq)
        };
        let (ln, mut n) = q_clear_denominators(&nq);
        let (ld, mut d) = q_clear_denominators(&dq);
        // num/den = (ld * n) / (ln * d) after clearing; fold the scalars in.
        n = &n * &PolyZ::constant(ld);
        d = &d * &PolyZ::constant(ln);
        let c = n.content().gcd(&d.content());
        if !c.is_one() {
            n = exact_div_content(&n, &c);
            d = exact_div_content(&d, &c);
        }
        if d.leading().is_some_and(Signed::is_negative) {
            n = -&n;
            d = -&d;
        }
        Ok(RatFuncM { num: n, den: d })
    }

    pub fn from_poly(p: PolyZ) -> Self {
        RatFuncM {
            num: p,
            den: PolyZ::one(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        RatFuncM::from_poly(PolyZ::from_i64s(&[v]))
    }

    pub fn from_rat(v: &BigRational) -> Self {
        RatFuncM {
            num: PolyZ::constant(v.numer().clone()),
            den: PolyZ::constant(v.denom().clone()),
        }
        .normalized()
    }

    fn normalized(self) -> Self {
        RatFuncM::new(self.num, self.den).expect("denominator non-zero")
    }

    pub fn zero() -> Self {
        RatFuncM {
            num: PolyZ::zero(),
            den: PolyZ::one(),
        }
    }

    pub fn one() -> Self {
        RatFuncM {
            num: PolyZ::one(),
            den: PolyZ::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &PolyZ {
        &self.num
    }

    pub fn denominator(&self) -> &PolyZ {
        &self.den
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RatFuncM::new(num, den).expect("product of non-zero denominators")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        RatFuncM {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        RatFuncM::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("product of non-zero denominators")
    }

    /// Division; errors on a zero divisor.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::invalid("division by zero rational function"));
        }
        RatFuncM::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    /// Exact evaluation at a rational point; errors at a pole.
    pub fn eval(&self, x: &BigRational) -> Result<BigRational> {
        let d = self.den.eval_rat(x);
        if d.is_zero() {
            return Err(Error::invalid(format!("evaluation at pole M = {x}")));
        }
        Ok(self.num.eval_rat(x) / d)
    }

    /// Evaluation at an integer dimension.
    pub fn eval_int(&self, m: i64) -> Result<BigRational> {
        self.eval(&BigRational::from_integer(BigInt::from(m)))
    }
}

/// Divides every coefficient by `c`, which must divide the content.
fn exact_div_content(p: &PolyZ, c: &BigInt) -> PolyZ {
    PolyZ::from_coeffs(p.coeffs().iter().map(|x| x / c).collect())
}

impl fmt::Display for RatFuncM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == PolyZ::one() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl fmt::Debug for RatFuncM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
