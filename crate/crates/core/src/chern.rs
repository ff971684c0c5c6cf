//! Formal characteristic-class calculus.
//!
//! Bundles are presented by their Chern classes in any [`Algebra`]; the
//! Segre/dual/twist/Whitney operations work over every ring of the tower.
//! The rational series (Chern character, Todd class, square roots, Mukai
//! vectors) need graded components and live over [`GradedRing`].

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{binomial_q, factorial, rat, sign, Algebra, Rational};
use crate::graded::{GradedElement, GradedRing};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChernError {
    #[error("a bundle of rank {rank} needs {rank} Chern classes, got {got}")]
    WrongLength { rank: usize, got: usize },
    #[error("c_{index} is not homogeneous of degree {index}")]
    NotHomogeneous { index: usize },
    #[error("twisting class is not homogeneous of degree 1")]
    NotLineClass,
    #[error("series has constant term {0}, expected 1")]
    NonUnitConstant(String),
    #[error("no truncation degree given and the ring has no dimension bound")]
    MissingHorizon,
    #[error("operands live in different rings")]
    RingMismatch,
}

/// A formal vector bundle: its rank and Chern classes `c_1..c_rank`.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleClass<E> {
    rank: usize,
    chern: Vec<E>,
}

impl<E: Clone> BundleClass<E> {
    /// Builds a bundle, checking that `c_i` is homogeneous of degree `i`.
    pub fn new<A>(alg: &A, rank: usize, chern: Vec<E>) -> Result<Self, ChernError>
    where
        A: Algebra<Elem = E>,
    {
        if chern.len() != rank {
            return Err(ChernError::WrongLength {
                rank,
                got: chern.len(),
            });
        }
        for (i, c) in chern.iter().enumerate() {
            if !alg.homogeneity(c).admits(i as i64 + 1) {
                return Err(ChernError::NotHomogeneous { index: i + 1 });
            }
        }
        Ok(BundleClass { rank, chern })
    }

    /// Skips the homogeneity check; used for ungraded stress models.
    pub fn new_unchecked(rank: usize, chern: Vec<E>) -> Self {
        assert_eq!(chern.len(), rank);
        BundleClass { rank, chern }
    }

    pub fn trivial<A: Algebra<Elem = E>>(alg: &A, rank: usize) -> Self {
        BundleClass {
            rank,
            chern: vec![alg.zero(); rank],
        }
    }

    pub fn line<A: Algebra<Elem = E>>(alg: &A, c1: E) -> Result<Self, ChernError> {
        Self::new(alg, 1, vec![c1])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `c_1..c_rank`.
    pub fn classes(&self) -> &[E] {
        &self.chern
    }

    /// `c_i`, with `c_0 = 1` and `c_i = 0` outside `0..=rank`.
    pub fn c<A: Algebra<Elem = E>>(&self, alg: &A, i: i64) -> E {
        if i == 0 {
            alg.one()
        } else if i < 0 || i as usize > self.rank {
            alg.zero()
        } else {
            self.chern[i as usize - 1].clone()
        }
    }

    /// Maps every Chern class through a ring homomorphism.
    pub fn map<F, T>(&self, f: F) -> BundleClass<T>
    where
        F: Fn(&E) -> T,
    {
        BundleClass {
            rank: self.rank,
            chern: self.chern.iter().map(f).collect(),
        }
    }
}

/// Segre classes `s_0..s_kmax`, the inverse of the total Chern class.
pub fn segre_classes<A: Algebra>(alg: &A, f: &BundleClass<A::Elem>, k_max: usize) -> Vec<A::Elem> {
    let mut s = Vec::with_capacity(k_max + 1);
    s.push(alg.one());
    for k in 1..=k_max {
        let mut acc = alg.zero();
        for i in 1..=k.min(f.rank) {
            acc = alg.add(&acc, &alg.mul(&f.chern[i - 1], &s[k - i]));
        }
        s.push(alg.neg(&acc));
    }
    s
}

/// `c_j(F^dual) = (-1)^j c_j(F)`.
pub fn dual_bundle<A: Algebra>(alg: &A, f: &BundleClass<A::Elem>) -> BundleClass<A::Elem> {
    BundleClass {
        rank: f.rank,
        chern: f
            .chern
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 0 { alg.neg(c) } else { c.clone() })
            .collect(),
    }
}

/// Chern classes of `F ⊗ L` for a line bundle with first Chern class `l`.
pub fn tensor_by_line<A: Algebra>(
    alg: &A,
    f: &BundleClass<A::Elem>,
    l: &A::Elem,
) -> Result<BundleClass<A::Elem>, ChernError> {
    if !alg.homogeneity(l).admits(1) {
        return Err(ChernError::NotLineClass);
    }
    Ok(tensor_by_line_unchecked(alg, f, l))
}

pub(crate) fn tensor_by_line_unchecked<A: Algebra>(
    alg: &A,
    f: &BundleClass<A::Elem>,
    l: &A::Elem,
) -> BundleClass<A::Elem> {
    let n = f.rank as i64;
    let mut lpow = vec![alg.one()];
    for k in 1..=f.rank {
        lpow.push(alg.mul(&lpow[k - 1], l));
    }
    let chern = (1..=n)
        .map(|i| {
            let mut acc = alg.zero();
            for j in 0..=i {
                let b = binomial_q(n - j, i - j);
                if b.is_zero() {
                    continue;
                }
                let t = alg.mul(&f.c(alg, j), &lpow[(i - j) as usize]);
                acc = alg.add(&acc, &alg.scale(&t, &b));
            }
            acc
        })
        .collect();
    BundleClass { rank: f.rank, chern }
}

/// `c(E ⊕ F) = c(E)·c(F)`.
pub fn whitney_sum<A: Algebra>(
    alg: &A,
    e: &BundleClass<A::Elem>,
    f: &BundleClass<A::Elem>,
) -> BundleClass<A::Elem> {
    let rank = e.rank + f.rank;
    let chern = (1..=rank as i64)
        .map(|k| {
            let mut acc = alg.zero();
            for i in 0..=k {
                acc = alg.add(&acc, &alg.mul(&e.c(alg, i), &f.c(alg, k - i)));
            }
            acc
        })
        .collect();
    BundleClass { rank, chern }
}

/// Total Chern class `1 + c_1 + ... + c_rank` as one element.
pub fn total_chern<A: Algebra>(alg: &A, f: &BundleClass<A::Elem>) -> A::Elem {
    f.chern.iter().fold(alg.one(), |acc, c| alg.add(&acc, c))
}

/// An inhomogeneous class trusted up to `max_deg`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharClass {
    pub value: GradedElement,
    pub max_deg: u32,
}

impl CharClass {
    pub fn new(value: GradedElement, max_deg: u32) -> Self {
        CharClass {
            value: value.truncate_above(max_deg),
            max_deg,
        }
    }

    pub fn component(&self, d: i64) -> GradedElement {
        self.value.grade_component(d)
    }
}

fn horizon(ring: &GradedRing, max_deg: Option<u32>) -> Result<u32, ChernError> {
    max_deg.or(ring.dim_bound()).ok_or(ChernError::MissingHorizon)
}

/// Power sums of the Chern roots via Newton's identities,
/// `p_k = Σ_{i<k} (-1)^{i-1} c_i p_{k-i} + (-1)^{k-1} k c_k`.
pub fn power_sums(ring: &GradedRing, f: &BundleClass<GradedElement>, k_max: u32) -> Vec<GradedElement> {
    let mut p = vec![ring.int(f.rank as i64)];
    for k in 1..=k_max as i64 {
        let mut acc = f.c(ring, k).scale(&(sign(k - 1) * rat(k)));
        for i in 1..k {
            let t = &f.c(ring, i) * &p[(k - i) as usize];
            acc = &acc + &t.scale(&sign(i - 1));
        }
        p.push(acc);
    }
    p
}

/// `ch(F) = rank + Σ p_k / k!`.
pub fn chern_character(
    ring: &GradedRing,
    f: &BundleClass<GradedElement>,
    max_deg: Option<u32>,
) -> Result<CharClass, ChernError> {
    let n = horizon(ring, max_deg)?;
    let p = power_sums(ring, f, n);
    let mut acc = ring.zero();
    for (k, pk) in p.iter().enumerate() {
        let inv = BigRational::new(One::one(), factorial(k as u32));
        acc = &acc + &pk.scale(&inv);
    }
    Ok(CharClass::new(acc, n))
}

/// Coefficients `b_0..b_n` of `t / (1 - e^{-t})`.
pub fn todd_series(n: u32) -> Vec<Rational> {
    // (1 - e^{-t}) / t = Σ (-1)^k t^k / (k+1)!
    let denom: Vec<Rational> = (0..=n)
        .map(|k| sign(k as i64) / BigRational::from_integer(factorial(k + 1)))
        .collect();
    invert_series(&denom)
}

/// Inverse of a power series with unit constant term.
pub(crate) fn invert_series(a: &[Rational]) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(a.len());
    let a0_inv = a[0].recip();
    b.push(a0_inv.clone());
    for k in 1..a.len() {
        let mut acc = Rational::zero();
        for i in 1..=k {
            acc += &a[i] * &b[k - i];
        }
        b.push(-acc * &a0_inv);
    }
    b
}

/// Universal multiplicative-sequence polynomials in `e_1..e_n`.
#[derive(Debug)]
struct UniversalTable {
    ring: GradedRing,
    components: Vec<GradedElement>,
}

fn todd_cache() -> &'static Mutex<HashMap<u32, Arc<UniversalTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<UniversalTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn universal_todd(n: u32) -> Arc<UniversalTable> {
    if let Some(t) = todd_cache().lock().expect("todd cache").get(&n) {
        return t.clone();
    }
    let table = Arc::new(multiplicative_sequence(&todd_series(n), n));
    todd_cache()
        .lock()
        .expect("todd cache")
        .entry(n)
        .or_insert(table)
        .clone()
}

/// Expands `Π_i Q(x_i)` over `n` formal roots and rewrites each graded
/// piece in the elementary symmetric polynomials.
fn multiplicative_sequence(series: &[Rational], n: u32) -> UniversalTable {
    let roots = GradedRing::new((1..=n).map(|i| (format!("x{i}"), 1)), Some(n))
        .expect("root ring");
    let elem = GradedRing::new((1..=n).map(|i| (format!("e{i}"), i as i64)), None)
        .expect("elementary ring");

    let mut product = roots.one();
    let mut e_total = roots.one();
    for i in 0..n as usize {
        let x = roots.gen_at(i);
        let mut q = roots.zero();
        let mut xp = roots.one();
        for b in series.iter().take(n as usize + 1) {
            q = &q + &xp.scale(b);
            xp = &xp * &x;
        }
        product = &product * &q;
        e_total = &e_total * &(&roots.one() + &x);
    }
    let e_in_roots: Vec<GradedElement> = (0..=n as i64).map(|k| e_total.grade_component(k)).collect();

    let components = (0..=n as i64)
        .map(|d| symmetric_to_elementary(&product.grade_component(d), &e_in_roots, &elem))
        .collect();
    UniversalTable {
        ring: elem,
        components,
    }
}

/// Rewrites a homogeneous symmetric polynomial in the roots as a polynomial
/// in the elementary symmetric functions, by peeling leading terms.
fn symmetric_to_elementary(
    f: &GradedElement,
    e_in_roots: &[GradedElement],
    elem: &GradedRing,
) -> GradedElement {
    let mut rest = f.clone();
    let mut out = elem.zero();
    let n = e_in_roots.len() - 1;
    loop {
        let lead = rest.terms().next_back().map(|(m, c)| (m.clone(), c.clone()));
        let Some((m, c)) = lead else { break };
        let a = m.exponents();
        let mut exps = vec![0u32; n];
        let mut expanded = rest.ring().constant(c.clone());
        for i in 0..n {
            let next = if i + 1 < n { a[i + 1] } else { 0 };
            debug_assert!(a[i] >= next, "input is not symmetric");
            let k = a[i] - next;
            exps[i] = k;
            if k > 0 {
                expanded = &expanded * &e_in_roots[i + 1].pow(k);
            }
        }
        out = &out + &elem.monomial(elem.monomial_from_exponents(exps), c);
        rest = &rest - &expanded;
    }
    out
}

fn evaluate_universal(
    table: &UniversalTable,
    ring: &GradedRing,
    f: &BundleClass<GradedElement>,
    n: u32,
) -> GradedElement {
    let images: Vec<Option<GradedElement>> = (1..=table.ring.ngens() as i64)
        .map(|i| Some(f.c(ring, i)))
        .collect();
    let mut acc = ring.zero();
    for comp in table.components.iter().take(n as usize + 1) {
        acc = &acc + &comp.substitute_positional(ring, &images).expect("all images given");
    }
    acc
}

/// Todd class via universal polynomials from the formal-roots expansion.
pub fn todd_class(
    ring: &GradedRing,
    f: &BundleClass<GradedElement>,
    max_deg: Option<u32>,
) -> Result<CharClass, ChernError> {
    let n = horizon(ring, max_deg)?;
    let table = universal_todd(n);
    Ok(CharClass::new(evaluate_universal(&table, ring, f, n), n))
}

/// The universal Todd polynomial of degree `d` in `e_1..e_d`.
pub fn universal_todd_polynomial(d: u32) -> GradedElement {
    universal_todd(d.max(1)).components[d as usize].clone()
}

/// Square root of a series with constant term 1, degree by degree:
/// `b_d = (a_d - Σ_{0<i<d} b_i b_{d-i}) / 2`.
pub fn sqrt_one_series(a: &CharClass, max_deg: Option<u32>) -> Result<CharClass, ChernError> {
    let ring = a.value.ring();
    let n = max_deg.unwrap_or(a.max_deg).min(a.max_deg);
    let c0 = a.value.grade_component(0);
    if c0 != ring.one() {
        return Err(ChernError::NonUnitConstant(c0.to_string()));
    }
    let half = BigRational::new(1.into(), 2.into());
    let mut b = vec![ring.one()];
    for d in 1..=n as usize {
        let mut acc = a.value.grade_component(d as i64);
        for i in 1..d {
            acc = &acc - &(&b[i] * &b[d - i]);
        }
        b.push(acc.scale(&half).grade_component(d as i64));
    }
    let value = b.iter().fold(ring.zero(), |acc, x| &acc + x);
    Ok(CharClass::new(value, n))
}

/// `v(F) = ch(F)·sqrt(td(T))`.
pub fn mukai_vector(
    ring: &GradedRing,
    f: &BundleClass<GradedElement>,
    tangent: &BundleClass<GradedElement>,
    max_deg: Option<u32>,
) -> Result<CharClass, ChernError> {
    let n = horizon(ring, max_deg)?;
    let ch = chern_character(ring, f, Some(n))?;
    let td = todd_class(ring, tangent, Some(n))?;
    let root = sqrt_one_series(&td, Some(n))?;
    Ok(CharClass::new(&ch.value * &root.value, n))
}

/// Multiplies two classes and truncates at the smaller horizon.
pub fn char_mul(a: &CharClass, b: &CharClass) -> Result<CharClass, ChernError> {
    let v = a.value.checked_mul(&b.value).map_err(|_| ChernError::RingMismatch)?;
    Ok(CharClass::new(v, a.max_deg.min(b.max_deg)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;

    fn ring(names: &[(&str, i64)]) -> GradedRing {
        GradedRing::new(names.iter().map(|(n, d)| (n.to_string(), *d)), None).unwrap()
    }

    #[test]
    fn segre_of_line_bundle_is_geometric_series() {
        let r = ring(&[("t", 1)]);
        let t = r.gen("t").unwrap();
        let l = BundleClass::line(&r, t.clone()).unwrap();
        let s = segre_classes(&r, &l, 5);
        // oracle: 1/(1+t) = Σ (-t)^k
        for (k, sk) in s.iter().enumerate() {
            assert_eq!(*sk, t.pow(k as u32).scale(&sign(k as i64)));
        }
    }

    #[test]
    fn segre_of_trivial_and_first_class() {
        let r = ring(&[("a", 1), ("b", 2), ("c", 3)]);
        let triv = BundleClass::trivial(&r, 3);
        let s = segre_classes(&r, &triv, 4);
        assert_eq!(s[0], r.one());
        assert!(s[1..].iter().all(|x| x.is_zero()));
        let f = BundleClass::new(&r, 3, vec![r.gen("a").unwrap(), r.gen("b").unwrap(), r.gen("c").unwrap()]).unwrap();
        assert_eq!(segre_classes(&r, &f, 1)[1], -r.gen("a").unwrap());
    }

    #[test]
    fn dual_signs() {
        let r = ring(&[("a", 1), ("b", 2), ("c", 3)]);
        let f = BundleClass::new(&r, 3, vec![r.gen("a").unwrap(), r.gen("b").unwrap(), r.gen("c").unwrap()]).unwrap();
        let d = dual_bundle(&r, &f);
        assert_eq!(d.classes()[0], -r.gen("a").unwrap());
        assert_eq!(d.classes()[1], r.gen("b").unwrap());
        assert_eq!(d.classes()[2], -r.gen("c").unwrap());
        assert_eq!(dual_bundle(&r, &d), f);
    }

    #[test]
    fn twisting() {
        let r = ring(&[("a", 1), ("l", 1)]);
        let (a, l) = (r.gen("a").unwrap(), r.gen("l").unwrap());
        let line = BundleClass::line(&r, a.clone()).unwrap();
        assert_eq!(tensor_by_line(&r, &line, &l).unwrap().classes()[0], &a + &l);
        assert_eq!(tensor_by_line(&r, &line, &r.zero()).unwrap(), line);
        // formal roots (0,0) -> (l,l): c = (2l, l^2)
        let triv = BundleClass::trivial(&r, 2);
        let tw = tensor_by_line(&r, &triv, &l).unwrap();
        assert_eq!(tw.classes(), &[l.scale(&rat(2)), &l * &l]);
        assert_eq!(
            tensor_by_line(&r, &triv, &(&l * &l)),
            Err(ChernError::NotLineClass)
        );
    }

    #[test]
    fn chern_character_examples() {
        let r = ring(&[("t", 1), ("c1", 1), ("c2", 2)]);
        let t = r.gen("t").unwrap();
        let ch = chern_character(&r, &BundleClass::line(&r, t.clone()).unwrap(), Some(3)).unwrap();
        assert_eq!(ch.value, r.parse("1 + t + 1/2*t^2 + 1/6*t^3").unwrap());
        let triv = chern_character(&r, &BundleClass::trivial(&r, 4), Some(3)).unwrap();
        assert_eq!(triv.value, r.int(4));
        let f = BundleClass::new(&r, 2, vec![r.gen("c1").unwrap(), r.gen("c2").unwrap()]).unwrap();
        let ch = chern_character(&r, &f, Some(2)).unwrap();
        assert_eq!(ch.component(2), r.parse("1/2*(c1^2 - 2*c2)").unwrap());
    }

    #[test]
    fn todd_series_values() {
        let b = todd_series(4);
        assert_eq!(b, vec![rat(1), ratio(1, 2), ratio(1, 12), rat(0), ratio(-1, 720)]);
    }

    #[test]
    fn todd_of_line_and_trivial() {
        let r = ring(&[("t", 1)]);
        let t = r.gen("t").unwrap();
        let td = todd_class(&r, &BundleClass::line(&r, t).unwrap(), Some(4)).unwrap();
        assert_eq!(td.value, r.parse("1 + 1/2*t + 1/12*t^2 - 1/720*t^4").unwrap());
        let td = todd_class(&r, &BundleClass::trivial(&r, 3), Some(4)).unwrap();
        assert_eq!(td.value, r.one());
    }

    #[test]
    fn universal_todd_low_degrees() {
        assert_eq!(universal_todd_polynomial(1).to_string(), "1/2 * e1");
        assert_eq!(universal_todd_polynomial(2).to_string(), "1/12 * e1^2 + 1/12 * e2");
        assert_eq!(universal_todd_polynomial(3).to_string(), "1/24 * e1*e2");
    }

    #[test]
    fn sqrt_examples() {
        let r = ring(&[("x", 1)]);
        let one = CharClass::new(r.one(), 3);
        assert_eq!(sqrt_one_series(&one, None).unwrap().value, r.one());
        let a = CharClass::new(r.parse("1 + 2*x").unwrap(), 2);
        assert_eq!(sqrt_one_series(&a, None).unwrap().value, r.parse("1 + x - 1/2*x^2").unwrap());
        let bad = CharClass::new(r.parse("2 + x").unwrap(), 2);
        assert!(matches!(sqrt_one_series(&bad, None), Err(ChernError::NonUnitConstant(_))));
    }

    #[test]
    fn mukai_vector_examples() {
        let r = ring(&[("t", 1)]);
        let t = r.gen("t").unwrap();
        let o = BundleClass::trivial(&r, 1);
        let v = mukai_vector(&r, &o, &BundleClass::trivial(&r, 2), Some(3)).unwrap();
        assert_eq!(v.value, r.one());
        let v = mukai_vector(&r, &o, &BundleClass::line(&r, t).unwrap(), Some(1)).unwrap();
        assert_eq!(v.value, r.parse("1 + 1/4*t").unwrap());
    }

    #[test]
    fn horizon_required_without_bound() {
        let r = ring(&[("t", 1)]);
        assert_eq!(
            chern_character(&r, &BundleClass::trivial(&r, 1), None),
            Err(ChernError::MissingHorizon)
        );
        let b = GradedRing::new([("t", 1)], Some(2)).unwrap();
        assert_eq!(chern_character(&b, &BundleClass::trivial(&b, 1), None).unwrap().max_deg, 2);
    }

    #[test]
    fn bundle_validation() {
        let r = ring(&[("a", 1), ("b", 2)]);
        assert_eq!(
            BundleClass::new(&r, 2, vec![r.gen("a").unwrap()]),
            Err(ChernError::WrongLength { rank: 2, got: 1 })
        );
        assert_eq!(
            BundleClass::new(&r, 1, vec![r.gen("b").unwrap()]),
            Err(ChernError::NotHomogeneous { index: 1 })
        );
    }
}
