//! Free graded-commutative polynomial rings over the rationals.
//!
//! A [`GradedRing`] is a handle to an immutable [`RingSpec`]: a list of named
//! generators with non-negative degrees and an optional dimension bound. All
//! generators commute. When a bound is set, every homogeneous component of
//! total degree above it is discarded after each operation, which models
//! `CH(X)` of a variety of that dimension.
//!
//! Elements are kept in canonical form: a map from monomials to nonzero
//! rationals, monomials ordered graded-lexicographically along the generator
//! list. Two elements are equal iff their term maps are.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{rat, Algebra, Homogeneity, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("generator `{name}` has negative degree {degree}")]
    NegativeDegree { name: String, degree: i64 },
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("operands belong to different rings")]
    RingMismatch,
    #[error("no image given for generator `{0}`")]
    MissingImage(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("element `{0}` has a non-integral coefficient")]
    NotIntegral(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

#[derive(Debug, PartialEq, Eq)]
pub struct RingSpec {
    generators: Vec<Generator>,
    dim_bound: Option<u32>,
}

impl RingSpec {
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn dim_bound(&self) -> Option<u32> {
        self.dim_bound
    }
}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Shared handle to a ring specification.
#[derive(Clone, Debug)]
pub struct GradedRing(Arc<RingSpec>);

impl PartialEq for GradedRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for GradedRing {}

impl GradedRing {
    pub fn new<S: Into<String>>(
        generators: impl IntoIterator<Item = (S, i64)>,
        dim_bound: Option<u32>,
    ) -> Result<GradedRing, AlgebraError> {
        let mut gens: Vec<Generator> = Vec::new();
        for (name, degree) in generators {
            let name = name.into();
            if !valid_identifier(&name) {
                return Err(AlgebraError::InvalidName(name));
            }
            if degree < 0 {
                return Err(AlgebraError::NegativeDegree { name, degree });
            }
            if gens.iter().any(|g| g.name == name) {
                return Err(AlgebraError::DuplicateGenerator(name));
            }
            gens.push(Generator {
                name,
                degree: degree as u32,
            });
        }
        Ok(GradedRing(Arc::new(RingSpec {
            generators: gens,
            dim_bound,
        })))
    }

    /// The ring of rationals.
    pub fn rationals() -> GradedRing {
        GradedRing::new(Vec::<(String, i64)>::new(), None).expect("empty ring is valid")
    }

    pub fn spec(&self) -> &RingSpec {
        &self.0
    }

    pub fn ngens(&self) -> usize {
        self.0.generators.len()
    }

    pub fn dim_bound(&self) -> Option<u32> {
        self.0.dim_bound
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.0.generators.iter().position(|g| g.name == name)
    }

    pub fn zero(&self) -> GradedElement {
        GradedElement {
            ring: self.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> GradedElement {
        self.constant(Rational::one())
    }

    pub fn constant(&self, q: Rational) -> GradedElement {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Monomial::one(self.ngens()), q);
        }
        GradedElement {
            ring: self.clone(),
            terms,
        }
    }

    pub fn int(&self, n: i64) -> GradedElement {
        self.constant(rat(n))
    }

    pub fn gen(&self, name: &str) -> Result<GradedElement, AlgebraError> {
        let i = self
            .generator_index(name)
            .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))?;
        Ok(self.gen_at(i))
    }

    /// Generator by position in the generator list.
    pub fn gen_at(&self, i: usize) -> GradedElement {
        let mut exps = vec![0u32; self.ngens()];
        exps[i] = 1;
        let m = Monomial::new(&self.0.generators, exps);
        self.monomial(m, Rational::one())
    }

    /// `q * m`, truncated if `m` lies above the bound.
    pub fn monomial(&self, m: Monomial, q: Rational) -> GradedElement {
        let mut terms = BTreeMap::new();
        if !q.is_zero() && self.within_bound(m.degree) {
            terms.insert(m, q);
        }
        GradedElement {
            ring: self.clone(),
            terms,
        }
    }

    pub fn monomial_from_exponents(&self, exps: Vec<u32>) -> Monomial {
        assert_eq!(exps.len(), self.ngens(), "exponent vector length");
        Monomial::new(&self.0.generators, exps)
    }

    fn within_bound(&self, degree: u32) -> bool {
        self.0.dim_bound.is_none_or(|b| degree <= b)
    }

    /// All monomials of weighted degree exactly `d`, in ascending order.
    /// Degree-zero generators make this infinite, so they are not allowed
    /// to appear with positive exponent: such rings only enumerate the
    /// unit monomial in degree zero.
    pub fn monomials_of_degree(&self, d: u32) -> Vec<Monomial> {
        let gens = &self.0.generators;
        let mut out = Vec::new();
        let mut exps = vec![0u32; gens.len()];
        fn rec(
            gens: &[Generator],
            i: usize,
            left: u32,
            exps: &mut Vec<u32>,
            out: &mut Vec<Monomial>,
        ) {
            if i == gens.len() {
                if left == 0 {
                    out.push(Monomial::new(gens, exps.clone()));
                }
                return;
            }
            let w = gens[i].degree;
            if w == 0 {
                exps[i] = 0;
                rec(gens, i + 1, left, exps, out);
                return;
            }
            let mut e = 0;
            while e * w <= left {
                exps[i] = e;
                rec(gens, i + 1, left - e * w, exps, out);
                e += 1;
            }
            exps[i] = 0;
        }
        rec(gens, 0, d, &mut exps, &mut out);
        out.sort();
        out
    }

    /// Monomial basis of all degrees up to `d` (ascending).
    pub fn monomials_up_to(&self, d: u32) -> Vec<Monomial> {
        (0..=d).flat_map(|k| self.monomials_of_degree(k)).collect()
    }

    /// Parses the text form produced by `Display`, plus hand-written
    /// variants (parentheses, powers of sums, omitted coefficients).
    pub fn parse(&self, text: &str) -> Result<GradedElement, AlgebraError> {
        Parser::new(self, text).parse_all()
    }
}

impl fmt::Display for GradedRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[")?;
        for (i, g) in self.0.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", g.name, g.degree)?;
        }
        write!(f, "]")?;
        if let Some(b) = self.0.dim_bound {
            write!(f, "/(deg>{b})")?;
        }
        Ok(())
    }
}

/// An exponent vector together with its weighted degree. The derived order
/// compares degree first, then exponents lexicographically: graded-lex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    degree: u32,
    exps: Box<[u32]>,
}

impl Monomial {
    fn new(gens: &[Generator], exps: Vec<u32>) -> Monomial {
        let degree = exps.iter().zip(gens).map(|(e, g)| e * g.degree).sum();
        Monomial {
            degree,
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn one(n: usize) -> Monomial {
        Monomial {
            degree: 0,
            exps: vec![0; n].into_boxed_slice(),
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            degree: self.degree + other.degree,
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GradedElement {
    ring: GradedRing,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for GradedElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

impl Eq for GradedElement {}

impl GradedElement {
    pub fn ring(&self) -> &GradedRing {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one(self.ring.ngens()))
    }

    fn same_ring(&self, other: &GradedElement) -> Result<(), AlgebraError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(AlgebraError::RingMismatch)
        }
    }

    pub fn checked_add(&self, other: &GradedElement) -> Result<GradedElement, AlgebraError> {
        self.same_ring(other)?;
        let mut terms = self.terms.clone();
        for (m, q) in &other.terms {
            accumulate(&mut terms, m.clone(), q.clone());
        }
        Ok(GradedElement {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn checked_sub(&self, other: &GradedElement) -> Result<GradedElement, AlgebraError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &GradedElement) -> Result<GradedElement, AlgebraError> {
        self.same_ring(other)?;
        let bound = self.ring.dim_bound();
        let mut terms = BTreeMap::new();
        for (ma, qa) in &self.terms {
            for (mb, qb) in &other.terms {
                let deg = ma.degree + mb.degree;
                if bound.is_some_and(|b| deg > b) {
                    continue;
                }
                accumulate(&mut terms, ma.mul(mb), qa * qb);
            }
        }
        Ok(GradedElement {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn scale(&self, q: &Rational) -> GradedElement {
        if q.is_zero() {
            return self.ring.zero();
        }
        GradedElement {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> GradedElement {
        self.ring.pow(self, e)
    }

    /// The homogeneous component of degree `d` (zero for negative `d`).
    pub fn grade_component(&self, d: i64) -> GradedElement {
        GradedElement {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree as i64 == d)
                .map(|(m, q)| (m.clone(), q.clone()))
                .collect(),
        }
    }

    /// Drops every component of degree above `d`.
    pub fn truncate_above(&self, d: u32) -> GradedElement {
        GradedElement {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree <= d)
                .map(|(m, q)| (m.clone(), q.clone()))
                .collect(),
        }
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree).max()
    }

    pub fn homogeneity(&self) -> Homogeneity {
        self.terms
            .keys()
            .fold(Homogeneity::Zero, |h, m| {
                h.join(Homogeneity::Degree(m.degree as i64))
            })
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|q| q.is_integer())
    }

    /// Integrality assertion for Chow computations that must stay integral.
    pub fn assert_integral(&self) -> Result<(), AlgebraError> {
        if self.is_integral() {
            Ok(())
        } else {
            Err(AlgebraError::NotIntegral(self.to_string()))
        }
    }

    /// Evaluates the polynomial at `images` (generator name to element of
    /// `target`). Only generators that actually occur need an image.
    pub fn substitute(
        &self,
        target: &GradedRing,
        images: &BTreeMap<String, GradedElement>,
    ) -> Result<GradedElement, AlgebraError> {
        let gens = self.ring.spec().generators();
        let mut positional = Vec::with_capacity(gens.len());
        for g in gens {
            let img = images.get(&g.name);
            if let Some(img) = img {
                if img.ring != *target {
                    return Err(AlgebraError::RingMismatch);
                }
            }
            positional.push(img.cloned());
        }
        self.substitute_positional(target, &positional)
    }

    /// Like [`substitute`](Self::substitute) with images indexed by generator
    /// position.
    pub fn substitute_positional(
        &self,
        target: &GradedRing,
        images: &[Option<GradedElement>],
    ) -> Result<GradedElement, AlgebraError> {
        let gens = self.ring.spec().generators();
        assert_eq!(images.len(), gens.len(), "one image slot per generator");
        let mut powers: Vec<Vec<GradedElement>> = vec![Vec::new(); gens.len()];
        let mut acc = target.zero();
        for (m, q) in &self.terms {
            let mut term = target.constant(q.clone());
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let img = images[i]
                    .as_ref()
                    .ok_or_else(|| AlgebraError::MissingImage(gens[i].name.clone()))?;
                let cache = &mut powers[i];
                if cache.is_empty() {
                    cache.push(target.one());
                }
                while cache.len() <= e as usize {
                    let next = &cache[cache.len() - 1] * img;
                    cache.push(next);
                }
                term = &term * &cache[e as usize];
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

fn accumulate(terms: &mut BTreeMap<Monomial, Rational>, m: Monomial, q: Rational) {
    use std::collections::btree_map::Entry;
    match terms.entry(m) {
        Entry::Vacant(v) => {
            if !q.is_zero() {
                v.insert(q);
            }
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += q;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl Algebra for GradedRing {
    type Elem = GradedElement;

    fn zero(&self) -> GradedElement {
        GradedRing::zero(self)
    }

    fn one(&self) -> GradedElement {
        GradedRing::one(self)
    }

    fn add(&self, a: &GradedElement, b: &GradedElement) -> GradedElement {
        a + b
    }

    fn neg(&self, a: &GradedElement) -> GradedElement {
        -a
    }

    fn mul(&self, a: &GradedElement, b: &GradedElement) -> GradedElement {
        a * b
    }

    fn scale(&self, a: &GradedElement, q: &Rational) -> GradedElement {
        a.scale(q)
    }

    fn is_zero(&self, a: &GradedElement) -> bool {
        a.is_zero()
    }

    fn homogeneity(&self, a: &GradedElement) -> Homogeneity {
        a.homogeneity()
    }

    fn integer(&self, n: i64) -> GradedElement {
        self.int(n)
    }
}

// Operators panic on ring mismatch; use the `checked_*` methods when the
// operands may come from different rings.

impl Add for &GradedElement {
    type Output = GradedElement;
    fn add(self, rhs: &GradedElement) -> GradedElement {
        self.checked_add(rhs).expect("ring mismatch in addition")
    }
}

impl Sub for &GradedElement {
    type Output = GradedElement;
    fn sub(self, rhs: &GradedElement) -> GradedElement {
        self.checked_sub(rhs).expect("ring mismatch in subtraction")
    }
}

impl Mul for &GradedElement {
    type Output = GradedElement;
    fn mul(self, rhs: &GradedElement) -> GradedElement {
        self.checked_mul(rhs).expect("ring mismatch in multiplication")
    }
}

impl Neg for &GradedElement {
    type Output = GradedElement;
    fn neg(self) -> GradedElement {
        GradedElement {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, q)| (m.clone(), -q)).collect(),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for GradedElement {
            type Output = GradedElement;
            fn $f(self, rhs: GradedElement) -> GradedElement {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&GradedElement> for GradedElement {
            type Output = GradedElement;
            fn $f(self, rhs: &GradedElement) -> GradedElement {
                (&self).$f(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for GradedElement {
    type Output = GradedElement;
    fn neg(self) -> GradedElement {
        -&self
    }
}

fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GradedElement {
    /// `coeff * g1^e1*g2^e2 + ...`, highest monomial first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let gens = self.ring.spec().generators();
        for (k, (m, q)) in self.terms.iter().rev().enumerate() {
            let coeff = if k == 0 {
                fmt_rational(q)
            } else if q.is_negative() {
                write!(f, " - ")?;
                fmt_rational(&-q)
            } else {
                write!(f, " + ")?;
                fmt_rational(q)
            };
            write!(f, "{coeff}")?;
            if m.is_one() {
                continue;
            }
            write!(f, " * ")?;
            let mut first = true;
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}", gens[i].name)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    ring: &'a GradedRing,
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(ring: &'a GradedRing, text: &'a str) -> Self {
        Parser {
            ring,
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, AlgebraError> {
        Err(AlgebraError::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<GradedElement, AlgebraError> {
        let e = self.expr()?;
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<GradedElement, AlgebraError> {
        let mut acc = self.ring.zero();
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<GradedElement, AlgebraError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<GradedElement, AlgebraError> {
        // Unary minus inside a product, e.g. `x * -3`.
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.uint()?;
            let e = e
                .to_u32()
                .ok_or(AlgebraError::Parse {
                    pos: self.pos,
                    msg: "exponent too large".into(),
                })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<BigInt, AlgebraError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn atom(&mut self) -> Result<GradedElement, AlgebraError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let p = self.uint()?;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let q = self.uint()?;
                    if q.is_zero() {
                        return self.err("zero denominator");
                    }
                    Ok(self.ring.constant(Rational::new(p, q)))
                } else {
                    Ok(self.ring.constant(Rational::from_integer(p)))
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                self.ring.gen(name)
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> GradedRing {
        GradedRing::new([("x", 1), ("y", 1)], None).unwrap()
    }

    #[test]
    fn construction_and_validation() {
        let r = GradedRing::new([("x", 1), ("y", 2)], None).unwrap();
        assert_eq!(r.one().to_string(), "1");
        assert_eq!(r.gen("y").unwrap().homogeneity(), Homogeneity::Degree(2));
        let q = GradedRing::rationals();
        assert_eq!(q.ngens(), 0);
        assert_eq!(q.int(3).to_string(), "3");
        assert_eq!(
            GradedRing::new([("x", 1), ("x", 2)], None),
            Err(AlgebraError::DuplicateGenerator("x".into()))
        );
        assert!(matches!(
            GradedRing::new([("x", -1)], None),
            Err(AlgebraError::NegativeDegree { .. })
        ));
        assert!(matches!(
            GradedRing::new([("1x", 1)], None),
            Err(AlgebraError::InvalidName(_))
        ));
    }

    #[test]
    fn difference_of_squares() {
        let r = xy();
        let (x, y) = (r.gen("x").unwrap(), r.gen("y").unwrap());
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p, &(&x * &x) - &(&y * &y));
        assert_eq!(p.to_string(), "1 * x^2 - 1 * y^2");
        assert_eq!(&r.one() * &p, p);
    }

    #[test]
    fn truncation_kills_high_degree() {
        let r = GradedRing::new([("x", 1), ("y", 1)], Some(1)).unwrap();
        let (x, y) = (r.gen("x").unwrap(), r.gen("y").unwrap());
        assert!((&x * &y).is_zero());
        let t = GradedRing::new([("x", 1), ("y", 1)], None).unwrap();
        let a = t.parse("1 + x + x*y + y^3").unwrap();
        assert_eq!(a.truncate_above(1).truncate_above(1), a.truncate_above(1));
    }

    #[test]
    fn mismatched_rings_error() {
        let a = xy().gen("x").unwrap();
        let b = GradedRing::new([("x", 2)], None).unwrap().gen("x").unwrap();
        assert_eq!(a.checked_add(&b), Err(AlgebraError::RingMismatch));
        assert_eq!(a.checked_mul(&b), Err(AlgebraError::RingMismatch));
    }

    #[test]
    fn grade_components() {
        let r = GradedRing::new([("x", 1), ("y", 2)], None).unwrap();
        let a = r.parse("3 + x + y^2").unwrap();
        assert_eq!(a.grade_component(4), r.parse("y^2").unwrap());
        assert!(a.grade_component(5).is_zero());
        assert!(a.grade_component(-1).is_zero());
        assert_eq!(a.grade_component(0), r.int(3));
    }

    #[test]
    fn substitution() {
        let src = GradedRing::new([("x", 1)], None).unwrap();
        let dst = GradedRing::new([("u", 1), ("v", 1)], None).unwrap();
        let a = src.parse("x^2").unwrap();
        let mut images = BTreeMap::new();
        images.insert("x".to_string(), dst.parse("u + v").unwrap());
        let b = a.substitute(&dst, &images).unwrap();
        assert_eq!(b, dst.parse("u^2 + 2*u*v + v^2").unwrap());

        let ident: BTreeMap<_, _> = [("x".to_string(), src.gen("x").unwrap())].into();
        assert_eq!(a.substitute(&src, &ident).unwrap(), a);

        let err = a.substitute(&dst, &BTreeMap::new());
        assert_eq!(err, Err(AlgebraError::MissingImage("x".into())));
        // constants need no images
        assert_eq!(
            src.int(5).substitute(&dst, &BTreeMap::new()).unwrap(),
            dst.int(5)
        );
    }

    #[test]
    fn display_and_parse() {
        let r = GradedRing::new([("x", 1), ("y", 2)], None).unwrap();
        let a = r.parse("-3/2*y + x^2*y + 5 - x").unwrap();
        let s = a.to_string();
        assert_eq!(s, "1 * x^2*y - 3/2 * y - 1 * x + 5");
        assert_eq!(r.parse(&s).unwrap(), a);
        assert_eq!(r.parse("(1+x)^2").unwrap(), r.parse("1 + 2*x + x^2").unwrap());
        assert!(r.parse("1/0").is_err());
        assert!(r.parse("z").is_err());
        assert!(r.parse("x +").is_err());
        assert_eq!(r.parse("0").unwrap(), r.zero());
    }

    #[test]
    fn monomial_enumeration() {
        let r = GradedRing::new([("x", 1), ("y", 2)], None).unwrap();
        // degree 4: x^4, x^2 y, y^2
        assert_eq!(r.monomials_of_degree(4).len(), 3);
        assert_eq!(r.monomials_up_to(2).len(), 1 + 1 + 2);
    }

    #[test]
    fn integrality_flag() {
        let r = xy();
        assert!(r.parse("2*x - y").unwrap().assert_integral().is_ok());
        assert!(r.parse("1/2*x").unwrap().assert_integral().is_err());
    }
}
