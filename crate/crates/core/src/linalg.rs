//! Exact linear algebra over an abstract field: the minimal field interface
//! and a Gauss–Jordan solver. Implementations are provided for rationals and
//! for rational functions of the dimension variable.
//!
//! This lives apart from the arithmetic types on purpose: the trait methods
//! shadow inherent `zero`/`is_zero` names, so keeping the trait out of scope
//! elsewhere avoids method-resolution ambiguity.

use crate::error::{Error, Result};
use crate::ratfunc::RatFuncM;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Minimal exact-field interface for the linear solver; implemented by
/// rationals and by rational functions.
pub trait FieldElem: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    /// `self / rhs`; `None` when `rhs` is zero.
    fn div_ref(&self, rhs: &Self) -> Option<Self>;
}

impl FieldElem for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_ref(&self, rhs: &Self) -> Option<Self> {
        if Zero::is_zero(rhs) {
            None
        } else {
            Some(self / rhs)
        }
    }
}

impl FieldElem for RatFuncM {
    fn zero() -> Self {
        RatFuncM::zero()
    }
    fn one() -> Self {
        RatFuncM::one()
    }
    fn is_zero(&self) -> bool {
        RatFuncM::is_zero(self)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn div_ref(&self, rhs: &Self) -> Option<Self> {
        self.div(rhs).ok()
    }
}

/// Solves the square system `a · x = b` exactly by Gauss–Jordan elimination.
/// Errors when the matrix is singular over the field.
pub fn gauss_solve<T: FieldElem>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) || b.len() != n {
        return Err(Error::invalid("gauss_solve: non-square system"));
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::SingularSystem(format!("no pivot in column {col}")))?;
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        for x in &mut a[col] {
            *x = x.div_ref(&pivot).expect("pivot is non-zero");
        }
        b[col] = b[col].div_ref(&pivot).expect("pivot is non-zero");
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                let delta = factor.mul_ref(&a[col][c]);
                a[r][c] = a[r][c].sub_ref(&delta);
            }
            let delta = factor.mul_ref(&b[col]);
            b[r] = b[r].sub_ref(&delta);
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfunc::PolyZ;
    use num_bigint::BigInt;

    fn rf(num: &[i64], den: &[i64]) -> RatFuncM {
        RatFuncM::new(PolyZ::from_i64s(num), PolyZ::from_i64s(den)).unwrap()
    }

    #[test]
    fn gauss_solves_rational_systems() {
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let a = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]];
        let b = vec![q(5, 1), q(10, 1)];
        let x = gauss_solve(a, b).unwrap();
        assert_eq!(x, vec![q(1, 1), q(3, 1)]);
    }

    #[test]
    fn gauss_solves_rational_function_systems() {
        // [[M, 1], [1, M]] x = [1, 0]  =>  x = (M, -1)/(M^2 - 1).
        let m = RatFuncM::from_poly(PolyZ::var());
        let one = RatFuncM::one();
        let a = vec![vec![m.clone(), one.clone()], vec![one.clone(), m.clone()]];
        let b = vec![one, RatFuncM::zero()];
        let x = gauss_solve(a, b).unwrap();
        assert_eq!(x[0], rf(&[0, 1], &[-1, 0, 1]));
        assert_eq!(x[1], rf(&[-1], &[-1, 0, 1]));
    }

    #[test]
    fn gauss_detects_singular_systems() {
        let q = |n: i64| BigRational::from_integer(BigInt::from(n));
        let a = vec![vec![q(1), q(1)], vec![q(1), q(1)]];
        let b = vec![q(1), q(2)];
        assert!(matches!(gauss_solve(a, b), Err(Error::SingularSystem(_))));
    }
}
