//! A minimal commutative-algebra interface shared by the free graded rings
//! and the projective-bundle towers built on top of them.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Homogeneity of an element with respect to the total grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    /// The zero element is homogeneous of every degree.
    Zero,
    Degree(i64),
    Mixed,
}

impl Homogeneity {
    /// Homogeneity of a sum whose summands have `self` and `other`.
    pub fn join(self, other: Homogeneity) -> Homogeneity {
        match (self, other) {
            (Homogeneity::Zero, x) | (x, Homogeneity::Zero) => x,
            (Homogeneity::Degree(a), Homogeneity::Degree(b)) if a == b => Homogeneity::Degree(a),
            _ => Homogeneity::Mixed,
        }
    }

    pub fn shift(self, by: i64) -> Homogeneity {
        match self {
            Homogeneity::Degree(d) => Homogeneity::Degree(d + by),
            x => x,
        }
    }

    /// True when the element is zero or homogeneous of degree `d`.
    pub fn admits(self, d: i64) -> bool {
        match self {
            Homogeneity::Zero => true,
            Homogeneity::Degree(e) => e == d,
            Homogeneity::Mixed => false,
        }
    }
}

/// A commutative ring with unit over the rationals, graded by total degree.
///
/// Implementors are ring *handles*: cheap to clone, and the elements they
/// produce carry no back-reference that could go stale.
pub trait Algebra: Clone {
    type Elem: Clone + PartialEq + fmt::Debug + fmt::Display;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, q: &Rational) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn homogeneity(&self, a: &Self::Elem) -> Homogeneity;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn integer(&self, n: i64) -> Self::Elem {
        self.scale(&self.one(), &rat(n))
    }

    fn pow(&self, a: &Self::Elem, e: u32) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

/// `(-1)^k` as a rational.
pub fn sign(k: i64) -> Rational {
    if k.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Binomial coefficient, zero outside `0 <= b <= a`.
pub fn binomial(a: i64, b: i64) -> BigInt {
    if b < 0 || a < 0 || b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    for k in 0..b {
        acc = acc * BigInt::from(a - k) / BigInt::from(k + 1);
    }
    acc
}

pub fn binomial_q(a: i64, b: i64) -> Rational {
    BigRational::from_integer(binomial(a, b))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n as i64).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}
