//! Chow rings of projective bundles `P(F) -> S`.
//!
//! `CH(P(F))` is a free module over the base with basis `1, h, ..., h^{n-1}`
//! where `n = rank F` and `h = c_1(O(1))`; products are reduced with the
//! relation `h^n = -Σ_{j=1..n} c_j(F) h^{n-j}`. Since a `ProjBundle` is
//! itself an [`Algebra`], bundles stack into towers (the exceptional divisor
//! of a flop is a bundle over a bundle over `S`).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{binomial, binomial_q, sign, Algebra, Homogeneity, Rational};
use crate::chern::{dual_bundle, segre_classes, tensor_by_line_unchecked, BundleClass, ChernError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjBundleError {
    #[error("projective bundle of a rank-0 bundle")]
    ZeroRank,
    #[error("expected {expected} coefficients, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("tau_{{{i},{j}}} differs between recursion and reduction")]
    TauMismatch { i: usize, j: usize },
    #[error("negative Chern index {0}")]
    NegativeIndex(i64),
    #[error(transparent)]
    Chern(#[from] ChernError),
}

/// `Σ π^*(a_k) h^k`, stored as `a_0..a_{n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PBElement<T> {
    coeffs: Vec<T>,
}

impl<T> PBElement<T> {
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }
}

impl<T: fmt::Display> fmt::Display for PBElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug)]
pub struct ProjBundle<B: Algebra> {
    base: B,
    bundle: BundleClass<B::Elem>,
    class_name: String,
}

/// `τ_{i,j}` with `h^i = Σ_j π^*(τ_{i,j}) h^j`; zero for `j` outside the basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TauTable<E> {
    rows: Vec<Vec<E>>,
    zero: E,
}

impl<E> TauTable<E> {
    pub fn get(&self, i: usize, j: i64) -> &E {
        if j < 0 {
            return &self.zero;
        }
        self.rows[i].get(j as usize).unwrap_or(&self.zero)
    }

    pub fn rows(&self) -> &[Vec<E>] {
        &self.rows
    }

    pub fn max_power(&self) -> usize {
        self.rows.len() - 1
    }

    /// Overwrites a single entry. Only used to plant deliberate faults.
    pub fn set(&mut self, i: usize, j: usize, value: E) {
        self.rows[i][j] = value;
    }
}

impl<B: Algebra> ProjBundle<B> {
    pub fn new(
        base: B,
        bundle: BundleClass<B::Elem>,
        class_name: impl Into<String>,
    ) -> Result<Self, ProjBundleError> {
        if bundle.rank() == 0 {
            return Err(ProjBundleError::ZeroRank);
        }
        Ok(ProjBundle {
            base,
            bundle,
            class_name: class_name.into(),
        })
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn bundle(&self) -> &BundleClass<B::Elem> {
        &self.bundle
    }

    pub fn rank(&self) -> usize {
        self.bundle.rank()
    }

    pub fn class_name(&self) -> &str {
        &self.class_name
    }

    /// `c_j(F)` in the base.
    pub fn c(&self, j: i64) -> B::Elem {
        self.bundle.c(&self.base, j)
    }

    pub fn element(&self, coeffs: Vec<B::Elem>) -> Result<PBElement<B::Elem>, ProjBundleError> {
        if coeffs.len() != self.rank() {
            return Err(ProjBundleError::WrongLength {
                expected: self.rank(),
                got: coeffs.len(),
            });
        }
        Ok(PBElement { coeffs })
    }

    pub fn pullback(&self, a: &B::Elem) -> PBElement<B::Elem> {
        let mut coeffs = vec![self.base.zero(); self.rank()];
        coeffs[0] = a.clone();
        PBElement { coeffs }
    }

    /// Reduces `Σ_k p_k h^k` (any length) to the basis by the bundle
    /// relation, highest power first.
    pub fn reduce(&self, mut poly: Vec<B::Elem>) -> PBElement<B::Elem> {
        let n = self.rank();
        let chern: Vec<B::Elem> = (1..=n as i64).map(|j| self.c(j)).collect();
        for k in (n..poly.len()).rev() {
            let top = std::mem::replace(&mut poly[k], self.base.zero());
            if self.base.is_zero(&top) {
                continue;
            }
            for (j, cj) in chern.iter().enumerate() {
                let idx = k - (j + 1);
                poly[idx] = self.base.sub(&poly[idx], &self.base.mul(cj, &top));
            }
        }
        poly.resize(n, self.base.zero());
        PBElement { coeffs: poly }
    }

    pub fn h(&self) -> PBElement<B::Elem> {
        self.h_power(1)
    }

    pub fn h_power(&self, k: usize) -> PBElement<B::Elem> {
        let mut poly = vec![self.base.zero(); (k + 1).max(self.rank())];
        poly[k] = self.base.one();
        self.reduce(poly)
    }

    /// `Σ_k π^*(a_k) h^k` from an arbitrary-length coefficient list.
    pub fn from_polynomial(&self, poly: Vec<B::Elem>) -> PBElement<B::Elem> {
        self.reduce(poly)
    }

    pub fn checked_mul(
        &self,
        a: &PBElement<B::Elem>,
        b: &PBElement<B::Elem>,
    ) -> Result<PBElement<B::Elem>, ProjBundleError> {
        let n = self.rank();
        for x in [a, b] {
            if x.coeffs.len() != n {
                return Err(ProjBundleError::WrongLength {
                    expected: n,
                    got: x.coeffs.len(),
                });
            }
        }
        let mut poly = vec![self.base.zero(); 2 * n - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if self.base.is_zero(y) {
                    continue;
                }
                poly[i + j] = self.base.add(&poly[i + j], &self.base.mul(x, y));
            }
        }
        Ok(self.reduce(poly))
    }

    /// `π_*`: the coefficient of `h^{n-1}`.
    pub fn pushforward(&self, a: &PBElement<B::Elem>) -> B::Elem {
        a.coeffs[self.rank() - 1].clone()
    }

    /// `π_*(h^k) = s_{k-n+1}(F)`, zero for `k < n-1`.
    pub fn push_power(&self, k: usize) -> B::Elem {
        let n = self.rank();
        if k + 1 < n {
            return self.base.zero();
        }
        let idx = k + 1 - n;
        segre_classes(&self.base, &self.bundle, idx).pop().expect("s_0 exists")
    }

    /// `π_*(Σ a_k h^k)` for an unreduced coefficient list, via Segre classes.
    pub fn pushforward_polynomial(&self, poly: &[B::Elem]) -> B::Elem {
        let n = self.rank();
        if poly.len() < n {
            return self.base.zero();
        }
        let s = segre_classes(&self.base, &self.bundle, poly.len() - n);
        let mut acc = self.base.zero();
        for (k, a) in poly.iter().enumerate().skip(n - 1) {
            acc = self.base.add(&acc, &self.base.mul(a, &s[k + 1 - n]));
        }
        acc
    }

    /// `τ` by `τ_{i+1,j} = τ_{i,j-1} - c_{n-j}(F) τ_{i,n-1}`.
    pub fn tau_by_recursion(&self, i_max: usize) -> TauTable<B::Elem> {
        let n = self.rank();
        let zero = self.base.zero();
        let mut rows: Vec<Vec<B::Elem>> = Vec::with_capacity(i_max + 1);
        let mut first = vec![zero.clone(); n];
        first[0] = self.base.one();
        rows.push(first);
        for i in 0..i_max {
            let prev = &rows[i];
            let top = prev[n - 1].clone();
            let next = (0..n)
                .map(|j| {
                    let shifted = if j == 0 { zero.clone() } else { prev[j - 1].clone() };
                    let c = self.c((n - j) as i64);
                    self.base.sub(&shifted, &self.base.mul(&c, &top))
                })
                .collect();
            rows.push(next);
        }
        TauTable { rows, zero }
    }

    /// `τ` by reducing each monomial `h^i` from scratch.
    pub fn tau_by_reduction(&self, i_max: usize) -> TauTable<B::Elem> {
        let rows = (0..=i_max).map(|i| self.h_power(i).coeffs).collect();
        TauTable {
            rows,
            zero: self.base.zero(),
        }
    }

    /// The τ table, computed both ways; disagreement is an error.
    pub fn tau_table(&self, i_max: usize) -> Result<TauTable<B::Elem>, ProjBundleError> {
        let rec = self.tau_by_recursion(i_max);
        let red = self.tau_by_reduction(i_max);
        for (i, (a, b)) in rec.rows.iter().zip(&red.rows).enumerate() {
            if let Some(j) = a.iter().zip(b).position(|(x, y)| x != y) {
                return Err(ProjBundleError::TauMismatch { i, j });
            }
        }
        Ok(rec)
    }

    /// `c_i(Ω_{P(F)|S}) = (-1)^i Σ_j C(n-j, i-j) π^*c_j(F) h^{i-j}`.
    pub fn cotangent_chern(&self, i: i64) -> Result<PBElement<B::Elem>, ProjBundleError> {
        if i < 0 {
            return Err(ProjBundleError::NegativeIndex(i));
        }
        let n = self.rank() as i64;
        let mut poly = vec![self.base.zero(); (i as usize + 1).max(self.rank())];
        for j in 0..=i {
            let b = binomial_q(n - j, i - j);
            if b.is_zero() {
                continue;
            }
            let k = (i - j) as usize;
            poly[k] = self.base.add(&poly[k], &self.base.scale(&self.c(j), &(b * sign(i))));
        }
        Ok(self.reduce(poly))
    }

    /// Euler-sequence oracle: `c(Ω) = c(π^*F^dual ⊗ O(-1))`.
    pub fn cotangent_chern_euler(&self, i: i64) -> Result<PBElement<B::Elem>, ProjBundleError> {
        if i < 0 {
            return Err(ProjBundleError::NegativeIndex(i));
        }
        let pulled = dual_bundle(&self.base, &self.bundle).map(|c| self.pullback(c));
        let twisted = tensor_by_line_unchecked(self, &pulled, &self.neg(&self.h()));
        Ok(twisted.c(self, i))
    }

    /// `Ω_{P(F)|S}` as a formal bundle of rank `n-1`.
    pub fn cotangent_bundle(&self) -> BundleClass<PBElement<B::Elem>> {
        let chern = (1..self.rank() as i64)
            .map(|i| self.cotangent_chern(i).expect("non-negative index"))
            .collect();
        BundleClass::new_unchecked(self.rank() - 1, chern)
    }

    /// `c_i(Ω ⊗ O(1)) = Σ_m (-1)^m h^m π^*c_{i-m}(F^dual)`.
    pub fn cotangent_twist_chern(&self, i: i64) -> Result<PBElement<B::Elem>, ProjBundleError> {
        if i < 0 {
            return Err(ProjBundleError::NegativeIndex(i));
        }
        let dual = dual_bundle(&self.base, &self.bundle);
        let mut poly = vec![self.base.zero(); (i as usize + 1).max(self.rank())];
        for m in 0..=i {
            let c = self.base.scale(&dual.c(&self.base, i - m), &sign(m));
            poly[m as usize] = self.base.add(&poly[m as usize], &c);
        }
        Ok(self.reduce(poly))
    }

    /// Oracle: twist the cotangent bundle by `O(1)` with the line-bundle formula.
    pub fn cotangent_twist_chern_oracle(&self, i: i64) -> Result<PBElement<B::Elem>, ProjBundleError> {
        if i < 0 {
            return Err(ProjBundleError::NegativeIndex(i));
        }
        let twisted = tensor_by_line_unchecked(self, &self.cotangent_bundle(), &self.h());
        Ok(twisted.c(self, i))
    }
}

impl<B: Algebra> Algebra for ProjBundle<B> {
    type Elem = PBElement<B::Elem>;

    fn zero(&self) -> Self::Elem {
        PBElement {
            coeffs: vec![self.base.zero(); self.rank()],
        }
    }

    fn one(&self) -> Self::Elem {
        self.pullback(&self.base.one())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        PBElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| self.base.add(x, y))
                .collect(),
        }
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        PBElement {
            coeffs: a.coeffs.iter().map(|x| self.base.neg(x)).collect(),
        }
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.checked_mul(a, b).expect("elements of the same projective bundle")
    }

    fn scale(&self, a: &Self::Elem, q: &Rational) -> Self::Elem {
        PBElement {
            coeffs: a.coeffs.iter().map(|x| self.base.scale(x, q)).collect(),
        }
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.coeffs.iter().all(|x| self.base.is_zero(x))
    }

    fn homogeneity(&self, a: &Self::Elem) -> Homogeneity {
        a.coeffs
            .iter()
            .enumerate()
            .fold(Homogeneity::Zero, |h, (k, x)| {
                h.join(self.base.homogeneity(x).shift(k as i64))
            })
    }
}

/// Outcome of checking the alternating binomial identity for one `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinomialReport {
    pub r: i64,
    pub pairs_checked: usize,
    /// `(i, k, T^r_{i,k})` for every pair where the identity failed.
    pub failures: Vec<(i64, i64, BigInt)>,
    /// `(i, k)` where `T^r_{i+1,k+1} != T^r_{i,k}`.
    pub step_failures: Vec<(i64, i64)>,
}

impl BinomialReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.step_failures.is_empty()
    }
}

/// `T^r_{i,k} = Σ_{j=k..i} (-1)^{j+k} C(r-j, i-j) C(r+1-k, j-k)`.
pub fn binomial_t(r: i64, i: i64, k: i64) -> BigInt {
    (k..=i)
        .map(|j| {
            let t = binomial(r - j, i - j) * binomial(r + 1 - k, j - k);
            if (j + k) % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .sum()
}

/// Checks `T^r_{i,k} = (-1)^{i+k}` for all `0 <= k <= i <= r`, and the
/// shift relation `T^r_{i+1,k+1} = T^r_{i,k}` for `i < r`.
pub fn binomial_identity_check(r: i64) -> BinomialReport {
    let mut report = BinomialReport {
        r,
        pairs_checked: 0,
        failures: Vec::new(),
        step_failures: Vec::new(),
    };
    for i in 0..=r {
        for k in 0..=i {
            report.pairs_checked += 1;
            let t = binomial_t(r, i, k);
            let expected = if (i + k) % 2 == 0 {
                BigInt::one()
            } else {
                -BigInt::one()
            };
            if t != expected {
                report.failures.push((i, k, t.clone()));
            }
            if i < r && binomial_t(r, i + 1, k + 1) != t {
                report.step_failures.push((i, k));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{GradedElement, GradedRing};

    fn formal(n: usize) -> ProjBundle<GradedRing> {
        let s = GradedRing::new((1..=n).map(|i| (format!("c{i}"), i as i64)), None).unwrap();
        let chern = (0..n).map(|i| s.gen_at(i)).collect();
        let f = BundleClass::new(&s, n, chern).unwrap();
        ProjBundle::new(s, f, "h").unwrap()
    }

    #[test]
    fn top_power_times_h() {
        // rank n = r+1 = 3: h^2 * h reduces to (-c3, -c2, -c1)
        let p = formal(3);
        let s = p.base().clone();
        let prod = p.mul(&p.h_power(2), &p.h());
        let expected: Vec<GradedElement> = (1..=3).rev().map(|i| -s.gen_at(i - 1)).collect();
        assert_eq!(prod.coeffs(), expected.as_slice());
        let a = p.element(vec![s.gen_at(0), s.one(), s.gen_at(1)]).unwrap();
        assert_eq!(p.mul(&p.one(), &a), a);
    }

    #[test]
    fn low_powers_are_basis_vectors() {
        let p = formal(4);
        let tau = p.tau_table(3).unwrap();
        for i in 0..=3usize {
            for j in 0..4i64 {
                let expected = if i as i64 == j { p.base().one() } else { p.base().zero() };
                assert_eq!(*tau.get(i, j), expected);
            }
        }
        assert!(tau.get(2, -1).is_zero());
        assert!(tau.get(2, 9).is_zero());
    }

    #[test]
    fn pushforward_table() {
        let p = formal(3);
        assert!(p.push_power(1).is_zero());
        assert_eq!(p.push_power(2), p.base().one());
        assert_eq!(p.push_power(3), -p.c(1));
        assert_eq!(p.pushforward(&p.h_power(3)), -p.c(1));
    }

    #[test]
    fn projection_formula_sample() {
        let p = formal(3);
        let s = p.base();
        let a = s.parse("c1^2 - 3*c2").unwrap();
        let x = p.pullback(&a);
        let b = p.element(vec![s.gen_at(1), s.gen_at(0), s.int(2)]).unwrap();
        assert_eq!(p.pushforward(&p.mul(&x, &b)), &a * &p.pushforward(&b));
        assert_eq!(p.pushforward(&p.mul(&x, &p.h_power(2))), a);
    }

    #[test]
    fn tau_first_step_past_basis() {
        let p = formal(3); // r = 2
        let tau = p.tau_table(6).unwrap();
        for j in 0..3i64 {
            assert_eq!(*tau.get(3, j), -p.c(3 - j));
        }
        for i in 0..=6 {
            for j in 0..3 {
                assert!(tau.get(i, j).homogeneity().admits(i as i64 - j));
            }
        }
    }

    #[test]
    fn cotangent_first_class() {
        let p = formal(3);
        let expected = p.neg(&p.add(&p.scale(&p.h(), &crate::algebra::rat(3)), &p.pullback(&p.c(1))));
        assert_eq!(p.cotangent_chern(1).unwrap(), expected);
        assert_eq!(p.cotangent_chern_euler(1).unwrap(), expected);
        assert_eq!(p.cotangent_chern(0).unwrap(), p.one());
        assert!(p.cotangent_chern(-1).is_err());

        // P^r over a point
        let pt = GradedRing::rationals();
        let triv = BundleClass::trivial(&pt, 4);
        let pr = ProjBundle::new(pt.clone(), triv, "h").unwrap();
        assert_eq!(pr.cotangent_chern(1).unwrap(), pr.scale(&pr.h(), &crate::algebra::rat(-4)));
    }

    #[test]
    fn cotangent_twist_first_class() {
        let p = formal(3);
        let expected = p.sub(&p.neg(&p.h()), &p.pullback(&p.c(1)));
        assert_eq!(p.cotangent_twist_chern(1).unwrap(), expected);
        assert_eq!(p.cotangent_twist_chern_oracle(1).unwrap(), expected);
        assert_eq!(p.cotangent_twist_chern(0).unwrap(), p.one());
    }

    #[test]
    fn binomial_identity_small() {
        // r=3, i=2, k=1: 2 - 3 = -1
        assert_eq!(binomial_t(3, 2, 1), BigInt::from(-1));
        for k in 0..=5 {
            assert_eq!(binomial_t(5, k, k), BigInt::one());
        }
        assert!(binomial_identity_check(6).passed());
    }

    #[test]
    fn wrong_lengths_rejected() {
        let p = formal(2);
        assert!(p.element(vec![p.base().one()]).is_err());
        let bad = PBElement { coeffs: vec![p.base().one()] };
        assert!(p.checked_mul(&bad, &p.one()).is_err());
        let s = GradedRing::rationals();
        assert_eq!(
            ProjBundle::new(s.clone(), BundleClass::trivial(&s, 0), "h").err(),
            Some(ProjBundleError::ZeroRank)
        );
    }
}
