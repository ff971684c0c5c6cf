//! The Mukai-flop tower `CH(S) → CH(P), CH(P') → CH(E)` and the symbolic
//! check that the correction term of `[Z]_*` is multiplicative.
//!
//! `F` has rank `r+1` over `S`, `P = P(F)` with class `h`, `P' = P(F^dual)`
//! with class `l`, and `E = P(G)` over `P'` with `G = Ω_{P'|S} ⊗ O(1)` of
//! rank `r` and relative class `H`. A class `α` enters only through its
//! coefficients `i^*α = Σ σ_k h^k`; every quantity that the flop formula
//! pushes forward along `i'` is computed as an element of `CH(P')`.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{rat, sign, Algebra};
use crate::blowup::{cw_top_by_quotient, cw_top_for};
use crate::chern::{dual_bundle, segre_classes, tensor_by_line, BundleClass, ChernError};
use crate::graded::{AlgebraError, GradedElement, GradedRing};
use crate::proj_bundle::{PBElement, ProjBundle, ProjBundleError, TauTable};
use crate::report::{Check, Report};

/// An element of `CH(P')`.
pub type PElem = PBElement<GradedElement>;
/// An element of `CH(E)` over `CH(P')`.
pub type EElem = PBElement<PElem>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlopError {
    #[error("r must be at least 1")]
    ZeroRank,
    #[error("expected {expected} Chern classes of F, got {got}")]
    ChernCount { expected: usize, got: usize },
    #[error("c_{index}(F) is not homogeneous of degree {index}")]
    ChernDegree { index: usize },
    #[error("sigma vector has {got} entries, expected {expected}")]
    SigmaLength { expected: usize, got: usize },
    #[error("sigma vectors are only formal in formal mode")]
    NotFormal,
    #[error("inconsistent tower: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Chern(#[from] ChernError),
    #[error(transparent)]
    ProjBundle(#[from] ProjBundleError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlopMode {
    /// `c_i(F)` and the `σ` coefficients are free generators.
    Formal,
    /// `c_i(F)` are given elements of a user ring.
    Numeric,
}

/// Degrees assigned to the `σ` generators in formal mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaGrading {
    /// `σ_k` has degree `a - k`; needs `a ≥ r`.
    Codim(i64),
    /// Every `σ_k` has degree 0; homogeneity checks are skipped.
    Ungraded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Alpha,
    Beta,
}

/// `σ_0..σ_r` with `i^*(α) = Σ π^*(σ_k) h^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaVector {
    entries: Vec<GradedElement>,
}

impl SigmaVector {
    pub fn new(entries: Vec<GradedElement>) -> Self {
        SigmaVector { entries }
    }

    pub fn entries(&self) -> &[GradedElement] {
        &self.entries
    }

    pub fn get(&self, k: usize) -> &GradedElement {
        &self.entries[k]
    }

    pub fn top(&self) -> &GradedElement {
        self.entries.last().expect("non-empty sigma vector")
    }

    pub fn add(&self, other: &SigmaVector) -> SigmaVector {
        SigmaVector {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

/// An argument of `i'_*`, i.e. an element of `CH(P')`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionClass {
    pub value: PElem,
}

impl fmt::Display for CorrectionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.value.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            write!(f, "l^{i}: {c}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Placeholder for `φ'_*φ^*(α)`, which is not determined by `σ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Opaque(pub &'static str);

/// `[Z]_*(α) = φ'_*φ^*(α) + i'_*π'^*(σ_r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZStarImage {
    pub birational_part: Opaque,
    pub correction: CorrectionClass,
}

/// A deliberate fault for checking that the headline identity detects errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Adds 1 to `τ_{i,j}` and recomputes later rows from the recursion.
    Tau { i: usize, j: usize },
    /// Adds 1 to `s_k(G)` wherever `η'_*` uses it.
    Segre { k: usize },
    /// Flips the sign of `(-1)^j l^j` in the closed form of term B.
    TermBSign,
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mutation::Tau { i, j } => write!(f, "tau[{i},{j}] += 1"),
            Mutation::Segre { k } => write!(f, "s_{k}(G) += 1"),
            Mutation::TermBSign => write!(f, "term B sign flip"),
        }
    }
}

/// τ of `CH(P)`, `η'_*(H^p)` via Segre classes, and the term-B sign.
#[derive(Clone, Debug)]
struct Tables {
    tau: TauTable<GradedElement>,
    eta: Vec<PElem>,
    sign_b: i64,
}

#[derive(Clone, Debug)]
pub struct FlopContext {
    r: usize,
    mode: FlopMode,
    grading: SigmaGrading,
    base: GradedRing,
    sigma_gens: Option<(Vec<usize>, Vec<usize>)>,
    p: ProjBundle<GradedRing>,
    pp: ProjBundle<GradedRing>,
    e: ProjBundle<ProjBundle<GradedRing>>,
    tables: Tables,
}

impl FlopContext {
    /// Fully formal tower: `c_1..c_{r+1}` and `a_0..a_r`, `b_0..b_r` are
    /// generators of `CH(S)`.
    pub fn formal(r: usize, grading: SigmaGrading) -> Result<Self, FlopError> {
        if r == 0 {
            return Err(FlopError::ZeroRank);
        }
        let sdeg = |k: usize| match grading {
            SigmaGrading::Codim(a) => a - k as i64,
            SigmaGrading::Ungraded => 0,
        };
        let mut gens: Vec<(String, i64)> = (1..=r + 1).map(|i| (format!("c{i}"), i as i64)).collect();
        gens.extend((0..=r).map(|k| (format!("a{k}"), sdeg(k))));
        gens.extend((0..=r).map(|k| (format!("b{k}"), sdeg(k))));
        let base = GradedRing::new(gens, None)?;
        let chern = (0..=r).map(|i| base.gen_at(i)).collect();
        let a_idx = (r + 1..2 * r + 2).collect();
        let b_idx = (2 * r + 2..3 * r + 3).collect();
        Self::build(r, FlopMode::Formal, grading, base, chern, Some((a_idx, b_idx)))
    }

    /// `c_1..c_{r+1}` given in `base`; `c_i` must be homogeneous of degree `i`.
    pub fn numeric(r: usize, base: GradedRing, chern: Vec<GradedElement>) -> Result<Self, FlopError> {
        if r == 0 {
            return Err(FlopError::ZeroRank);
        }
        if chern.len() != r + 1 {
            return Err(FlopError::ChernCount {
                expected: r + 1,
                got: chern.len(),
            });
        }
        for (i, c) in chern.iter().enumerate() {
            if *c.ring() != base || !c.homogeneity().admits(i as i64 + 1) {
                return Err(FlopError::ChernDegree { index: i + 1 });
            }
        }
        Self::build(r, FlopMode::Numeric, SigmaGrading::Codim(r as i64), base, chern, None)
    }

    /// Numeric tower over `Q[x, y, z]` (degrees 1, 2, 3) with each `c_i(F)`
    /// a random homogeneous polynomial with coefficients in `[-9, 9]`.
    pub fn random_numeric(r: usize, rng: &mut ChaCha8Rng, dim_bound: Option<u32>) -> Result<Self, FlopError> {
        let base = GradedRing::new([("x", 1), ("y", 2), ("z", 3)], dim_bound)?;
        let chern = (1..=r as i64 + 1)
            .map(|i| random_homogeneous(&base, i, rng))
            .collect();
        Self::numeric(r, base, chern)
    }

    fn build(
        r: usize,
        mode: FlopMode,
        grading: SigmaGrading,
        base: GradedRing,
        chern: Vec<GradedElement>,
        sigma_gens: Option<(Vec<usize>, Vec<usize>)>,
    ) -> Result<Self, FlopError> {
        let f = BundleClass::new(&base, r + 1, chern).map_err(|e| match e {
            ChernError::NotHomogeneous { index } => FlopError::ChernDegree { index },
            other => FlopError::Chern(other),
        })?;
        let p = ProjBundle::new(base.clone(), f.clone(), "h")?;
        let pp = ProjBundle::new(base.clone(), dual_bundle(&base, &f), "l")?;
        let g = (1..=r)
            .map(|i| {
                let poly = (0..=i)
                    .map(|m| f.c(&base, (i - m) as i64).scale(&sign(m as i64)))
                    .collect();
                pp.from_polynomial(poly)
            })
            .collect();
        let g = BundleClass::new(&pp, r, g)?;
        let e = ProjBundle::new(pp.clone(), g, "H")?;

        let direct = e.h_power(r + 1);
        let stepwise = e.mul(&e.h(), &e.h_power(r));
        if direct != stepwise {
            return Err(FlopError::Inconsistent(format!(
                "H^(r+1) reduces to {direct} directly but {stepwise} stepwise"
            )));
        }

        let p_tau_placeholder = p.tau_by_recursion(0);
        let mut ctx = FlopContext {
            r,
            mode,
            grading,
            base,
            sigma_gens,
            p,
            pp,
            e,
            tables: Tables {
                tau: p_tau_placeholder,
                eta: Vec::new(),
                sign_b: 1,
            },
        };
        ctx.tables = ctx.make_tables(None);
        Ok(ctx)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn mode(&self) -> FlopMode {
        self.mode
    }

    pub fn grading(&self) -> SigmaGrading {
        self.grading
    }

    /// `CH(S)`.
    pub fn base(&self) -> &GradedRing {
        &self.base
    }

    /// `CH(P)`.
    pub fn p(&self) -> &ProjBundle<GradedRing> {
        &self.p
    }

    /// `CH(P')`.
    pub fn p_prime(&self) -> &ProjBundle<GradedRing> {
        &self.pp
    }

    /// `CH(E)` over `CH(P')`.
    pub fn e(&self) -> &ProjBundle<ProjBundle<GradedRing>> {
        &self.e
    }

    /// `c_i(F)`, with `c_0 = 1`.
    pub fn c(&self, i: i64) -> GradedElement {
        self.p.c(i)
    }

    /// `c_i(G)` in `CH(P')`, with `c_0 = 1`.
    pub fn c_g(&self, i: i64) -> PElem {
        self.e.c(i)
    }

    pub fn l(&self) -> PElem {
        self.pp.h()
    }

    /// `π'^*(s)`.
    pub fn pull(&self, s: &GradedElement) -> PElem {
        self.pp.pullback(s)
    }

    /// `s · l^i` in `CH(P')`.
    fn l_term(&self, s: GradedElement, i: usize) -> PElem {
        let mut poly = vec![self.base.zero(); (i + 1).max(self.r + 1)];
        poly[i] = s;
        self.pp.from_polynomial(poly)
    }

    /// `π'^*(s) · x`.
    fn times(&self, s: &GradedElement, x: &PElem) -> PElem {
        self.pp
            .element(x.coeffs().iter().map(|c| s * c).collect())
            .expect("same length")
    }

    /// The formal `σ` vector of `α` or `β`.
    pub fn formal_sigma(&self, side: Side) -> Result<SigmaVector, FlopError> {
        let (a, b) = self.sigma_gens.as_ref().ok_or(FlopError::NotFormal)?;
        let idx = match side {
            Side::Alpha => a,
            Side::Beta => b,
        };
        Ok(SigmaVector::new(idx.iter().map(|&i| self.base.gen_at(i)).collect()))
    }

    /// Random `σ` with `σ_k` homogeneous of degree `r - k`.
    pub fn random_sigma(&self, rng: &mut ChaCha8Rng) -> SigmaVector {
        SigmaVector::new(
            (0..=self.r)
                .map(|k| random_homogeneous(&self.base, self.r as i64 - k as i64, rng))
                .collect(),
        )
    }

    fn check_sigma(&self, s: &SigmaVector) -> Result<(), FlopError> {
        if s.entries.len() != self.r + 1 {
            return Err(FlopError::SigmaLength {
                expected: self.r + 1,
                got: s.entries.len(),
            });
        }
        Ok(())
    }

    /// The same construction for `F^dual`, exchanging the roles of `P` and `P'`.
    pub fn swapped(&self) -> Result<FlopContext, FlopError> {
        let chern = (1..=self.r as i64 + 1)
            .map(|i| self.c(i).scale(&sign(i)))
            .collect();
        Self::build(
            self.r,
            self.mode,
            self.grading,
            self.base.clone(),
            chern,
            self.sigma_gens.clone(),
        )
    }

    fn make_tables(&self, mutation: Option<Mutation>) -> Tables {
        let r = self.r;
        let n = r + 1;
        let i_max = 3 * r;
        let mut tau = self.p.tau_by_recursion(i_max);
        if let Some(Mutation::Tau { i, j }) = mutation {
            if i <= i_max && j <= r {
                tau.set(i, j, tau.get(i, j as i64) + &self.base.one());
                for row in i..i_max {
                    let top = tau.get(row, r as i64).clone();
                    for col in 0..n {
                        let v = tau.get(row, col as i64 - 1)
                            - &(&self.c((n - col) as i64) * &top);
                        tau.set(row + 1, col, v);
                    }
                }
            }
        }
        let mut s = segre_classes(&self.pp, self.e.bundle(), r + 2);
        if let Some(Mutation::Segre { k }) = mutation {
            if k < s.len() {
                s[k] = self.pp.add(&s[k], &self.pp.one());
            }
        }
        let eta = (0..=2 * r + 1)
            .map(|p| {
                if p + 1 < r {
                    self.pp.zero()
                } else {
                    s[p + 1 - r].clone()
                }
            })
            .collect();
        let sign_b = if mutation == Some(Mutation::TermBSign) { -1 } else { 1 };
        Tables { tau, eta, sign_b }
    }

    /// `τ_{i,j}` of `CH(P)`, zero for `j ∉ [0, r]`.
    pub fn tau(&self, i: usize, j: i64) -> &GradedElement {
        self.tables.tau.get(i, j)
    }

    /// `E_α = η^*i^*(α) = Σ_k σ_k H^k` in `CH(E)`.
    pub fn e_class(&self, s: &SigmaVector) -> Result<EElem, FlopError> {
        self.check_sigma(s)?;
        let poly = s.entries.iter().map(|x| self.pull(x)).collect();
        Ok(self.e.from_polynomial(poly))
    }

    /// `η'_*`: the coefficient of `H^{r-1}`.
    pub fn eta_prime_push(&self, x: &EElem) -> PElem {
        self.e.pushforward(x)
    }

    /// `η'_*(H^k) = s_{k-r+1}(G)`.
    pub fn eta_prime_push_power(&self, k: usize) -> PElem {
        self.e.push_power(k)
    }

    /// `η'_*(H^k)` by reducing `H^k` in `CH(E)`.
    pub fn eta_prime_push_power_by_reduction(&self, k: usize) -> PElem {
        self.e.pushforward(&self.e.h_power(k))
    }

    /// `η'_*(H^k)` by expanding `H^k = Σ_m τ_{k,m} H^m` (valid because `H`
    /// satisfies the relation of `F`) and using the table for `m ≤ r`.
    pub fn eta_prime_push_power_by_tau(&self, k: usize) -> PElem {
        let mut acc = self.pull(self.tau(k, self.r as i64 - 1));
        let top = self.pp.sub(&self.l(), &self.pull(&self.c(1)));
        acc = self.pp.add(&acc, &self.times(self.tau(k, self.r as i64), &top));
        acc
    }

    fn eta(&self, t: &Tables, p: usize) -> PElem {
        t.eta[p].clone()
    }

    /// `π'^*(Σ_{k,j} σ^α_k σ^β_j τ_{k+j,r})`.
    pub fn sigma_top_product(&self, a: &SigmaVector, b: &SigmaVector) -> Result<CorrectionClass, FlopError> {
        self.check_sigma(a)?;
        self.check_sigma(b)?;
        Ok(self.sigma_top_with(&self.tables, a, b))
    }

    fn sigma_top_with(&self, t: &Tables, a: &SigmaVector, b: &SigmaVector) -> CorrectionClass {
        let r = self.r;
        let mut acc = self.base.zero();
        for k in 0..=r {
            for j in 0..=r {
                acc = &acc + &(&(a.get(k) * b.get(j)) * t.tau.get(k + j, r as i64));
            }
        }
        CorrectionClass { value: self.pull(&acc) }
    }

    /// `π'^*` of the top coefficient of `i^*α · i^*β` multiplied in `CH(P)`.
    pub fn sigma_top_product_direct(&self, a: &SigmaVector, b: &SigmaVector) -> Result<CorrectionClass, FlopError> {
        self.check_sigma(a)?;
        self.check_sigma(b)?;
        let x = self.p.element(a.entries.clone())?;
        let y = self.p.element(b.entries.clone())?;
        let top = self.p.pushforward(&self.p.mul(&x, &y));
        Ok(CorrectionClass { value: self.pull(&top) })
    }

    /// Closed form of terms I+II+III+(*):
    /// `Σ_{k,j} π'^*(σ_k σ_j τ_{k+j,r}) + Σ_j π'^*(σ^α_r σ^β_j)(-1)^{j-1} l^j`.
    pub fn term_a(&self, a: &SigmaVector, b: &SigmaVector) -> Result<CorrectionClass, FlopError> {
        let main = self.sigma_top_product(a, b)?.value;
        let r = self.r;
        let mut acc = main;
        for j in 0..=r {
            let coeff = (a.top() * b.get(j)).scale(&sign(j as i64 - 1));
            acc = self.pp.add(&acc, &self.l_term(coeff, j));
        }
        Ok(CorrectionClass { value: acc })
    }

    /// `Σ_{i<j} (-1)^i l^i η'_*(H^{k+j-i-1})`.
    pub fn help_sum(&self, j: usize, k: usize) -> PElem {
        self.help_sum_with(&self.tables, j, k)
    }

    fn help_sum_with(&self, t: &Tables, j: usize, k: usize) -> PElem {
        let mut acc = self.pp.zero();
        for i in 0..j {
            let term = self.pp.mul(&self.pp.h_power(i), &self.eta(t, k + j - i - 1));
            acc = self.pp.add(&acc, &self.pp.scale(&term, &sign(i as i64)));
        }
        acc
    }

    /// `π'^*(τ_{k+j,r}) + (-1)^{j-1} l^j π'^*(τ_{k,r})`.
    pub fn help_sum_closed(&self, j: usize, k: usize) -> PElem {
        let r = self.r as i64;
        let first = self.pull(self.tau(k + j, r));
        let second = self.l_term(self.tau(k, r).scale(&sign(j as i64 - 1)), j);
        self.pp.add(&first, &second)
    }

    /// Term I+II+III+(*) before the help-sum simplification:
    /// `Σ_{k,j} π'^*(σ^α_k σ^β_j) Σ_{i<j} (-1)^i l^i η'_*(H^{k+j-i-1})`.
    pub fn term_a_raw(&self, a: &SigmaVector, b: &SigmaVector) -> Result<CorrectionClass, FlopError> {
        self.check_sigma(a)?;
        self.check_sigma(b)?;
        Ok(self.term_a_raw_with(&self.tables, a, b))
    }

    fn term_a_raw_with(&self, t: &Tables, a: &SigmaVector, b: &SigmaVector) -> CorrectionClass {
        let r = self.r;
        let mut acc = self.pp.zero();
        for k in 0..=r {
            for j in 1..=r {
                let inner = self.help_sum_with(t, j, k);
                acc = self.pp.add(&acc, &self.times(&(a.get(k) * b.get(j)), &inner));
            }
        }
        CorrectionClass { value: acc }
    }

    /// Term I+II+III+(*) through `E_α`:
    /// `Σ_j π'^*σ^β_j Σ_{i<j} (-1)^i l^i η'_*(E_α H^{j-i-1})`.
    pub fn term_a_via_e_class(&self, a: &SigmaVector, b: &SigmaVector) -> Result<CorrectionClass, FlopError> {
        self.check_sigma(b)?;
        let ea = self.e_class(a)?;
        let mut acc = self.pp.zero();
        for j in 1..=self.r {
            let mut inner = self.pp.zero();
            for i in 0..j {
                let pushed = self.eta_prime_push(&self.e.mul(&ea, &self.e.h_power(j - i - 1)));
                let term = self.pp.mul(&self.pp.h_power(i), &pushed);
                inner = self.pp.add(&inner, &self.pp.scale(&term, &sign(i as i64)));
            }
            acc = self.pp.add(&acc, &self.times(b.get(j), &inner));
        }
        Ok(CorrectionClass { value: acc })
    }

    /// `T_1(j, r-q) = Σ_n c_{r-n}(G) π'^*(τ_{n+j, r-q})`.
    pub fn t1(&self, j: usize, q: usize) -> PElem {
        let r = self.r;
        let mut acc = self.pp.zero();
        for n in 0..=r {
            let tau = self.tau(n + j, r as i64 - q as i64);
            acc = self.pp.add(&acc, &self.times(tau, &self.c_g((r - n) as i64)));
        }
        acc
    }

    /// `(-1)^j l^j Σ_{m≤q} (-1)^m l^m π'^*c_{q-m}(F)`.
    pub fn t1_closed(&self, j: usize, q: usize) -> PElem {
        let mut acc = self.pp.zero();
        for m in 0..=q {
            let coeff = self.c((q - m) as i64).scale(&sign((j + m) as i64));
            acc = self.pp.add(&acc, &self.l_term(coeff, j + m));
        }
        acc
    }

    /// `T_2 = Σ_n (-1)^{n-1} l^n c_{r-n}(G)`.
    pub fn t2(&self) -> PElem {
        let mut acc = self.pp.zero();
        for n in 0..=self.r {
            let term = self.pp.mul(&self.pp.h_power(n), &self.c_g((self.r - n) as i64));
            acc = self.pp.add(&acc, &self.pp.scale(&term, &sign(n as i64 - 1)));
        }
        acc
    }

    /// `Σ_{m'} (-1)^{m'-1} (m'+1) l^{m'} π'^*c_{r-m'}(F)`.
    pub fn t2_closed(&self) -> PElem {
        let mut acc = self.pp.zero();
        for m in 0..=self.r {
            let coeff = self.c((self.r - m) as i64).scale(&(sign(m as i64 - 1) * rat(m as i64 + 1)));
            acc = self.pp.add(&acc, &self.l_term(coeff, m));
        }
        acc
    }

    /// Closed form of term (**):
    /// `Σ_j π'^*(σ^α_r σ^β_j)(-1)^j l^j + π'^*(σ^α_r σ^β_r) T_2`.
    pub fn term_b(&self, a: &SigmaVector, b: &SigmaVector) -> Result<CorrectionClass, FlopError> {
        self.check_sigma(a)?;
        self.check_sigma(b)?;
        Ok(self.term_b_with(&self.tables, a, b))
    }

    fn term_b_with(&self, t: &Tables, a: &SigmaVector, b: &SigmaVector) -> CorrectionClass {
        let mut acc = self.times(&(a.top() * b.top()), &self.t2_closed());
        for j in 0..=self.r {
            let coeff = (a.top() * b.get(j)).scale(&(sign(j as i64) * rat(t.sign_b)));
            acc = self.pp.add(&acc, &self.l_term(coeff, j));
        }
        CorrectionClass { value: acc }
    }

    /// Term (**) as `Σ_j π'^*(σ^α_r σ^β_j) T_1(j) + π'^*(σ^α_r σ^β_r) T_2`
    /// with `T_1`, `T_2` from their defining sums.
    pub fn term_b_via_t(&self, a: &SigmaVector, b: &SigmaVector) -> Result<CorrectionClass, FlopError> {
        self.check_sigma(a)?;
        self.check_sigma(b)?;
        let mut acc = self.times(&(a.top() * b.top()), &self.t2());
        for j in 0..=self.r {
            acc = self.pp.add(&acc, &self.times(&(a.top() * b.get(j)), &self.t1(j, 0)));
        }
        Ok(CorrectionClass { value: acc })
    }

    /// Term (**) before simplification:
    /// `Σ_j π'^*(σ^α_r σ^β_j) Σ_n c_{r-n}(G) Σ_{i<n} (-1)^i l^i η'_*(H^{j+n-i-1})`.
    pub fn term_b_raw(&self, a: &SigmaVector, b: &SigmaVector) -> Result<CorrectionClass, FlopError> {
        self.check_sigma(a)?;
        self.check_sigma(b)?;
        let r = self.r;
        let mut acc = self.pp.zero();
        for j in 0..=r {
            let mut inner = self.pp.zero();
            for n in 1..=r {
                let hs = self.help_sum(n, j);
                inner = self.pp.add(&inner, &self.pp.mul(&self.c_g((r - n) as i64), &hs));
            }
            acc = self.pp.add(&acc, &self.times(&(a.top() * b.get(j)), &inner));
        }
        Ok(CorrectionClass { value: acc })
    }

    /// Term (**) through `E_β`:
    /// `π'^*σ^α_r Σ_n c_{r-n}(G) Σ_{i<n} (-1)^i l^i η'_*(E_β H^{n-i-1})`.
    pub fn term_b_via_e_class(&self, a: &SigmaVector, b: &SigmaVector) -> Result<CorrectionClass, FlopError> {
        self.check_sigma(a)?;
        let eb = self.e_class(b)?;
        let r = self.r;
        let mut acc = self.pp.zero();
        for n in 1..=r {
            let mut inner = self.pp.zero();
            for i in 0..n {
                let pushed = self.eta_prime_push(&self.e.mul(&eb, &self.e.h_power(n - i - 1)));
                let term = self.pp.mul(&self.pp.h_power(i), &pushed);
                inner = self.pp.add(&inner, &self.pp.scale(&term, &sign(i as i64)));
            }
            acc = self.pp.add(&acc, &self.pp.mul(&self.c_g((r - n) as i64), &inner));
        }
        Ok(CorrectionClass {
            value: self.times(a.top(), &acc),
        })
    }

    /// `Σ_{m'} (-1)^{m'} (m'+1) π'^*c_{r-m'}(F) l^{m'}`.
    pub fn omega_top_expansion(&self) -> PElem {
        let mut acc = self.pp.zero();
        for m in 0..=self.r {
            let coeff = self.c((self.r - m) as i64).scale(&(sign(m as i64) * rat(m as i64 + 1)));
            acc = self.pp.add(&acc, &self.l_term(coeff, m));
        }
        acc
    }

    /// Term (***) `= π'^*(σ^α_r σ^β_r) c_r(Ω_{P'|S})` with the expansion above.
    pub fn term_c(&self, a: &SigmaVector, b: &SigmaVector) -> Result<CorrectionClass, FlopError> {
        self.check_sigma(a)?;
        self.check_sigma(b)?;
        Ok(CorrectionClass {
            value: self.times(&(a.top() * b.top()), &self.omega_top_expansion()),
        })
    }

    /// Term (***) with `c_r(Ω_{P'|S})` from the general cotangent formula.
    pub fn term_c_via_cotangent(&self, a: &SigmaVector, b: &SigmaVector) -> Result<CorrectionClass, FlopError> {
        self.check_sigma(a)?;
        self.check_sigma(b)?;
        let omega = self.pp.cotangent_chern(self.r as i64)?;
        Ok(CorrectionClass {
            value: self.times(&(a.top() * b.top()), &omega),
        })
    }

    /// Term (***) by the self-intersection formula
    /// `i'_*x · i'_*y = i'_*(x y c_r(N_{P'|X'}))` with `N_{P'|X'} = Ω_{P'|S}`
    /// read off the Euler sequence.
    pub fn term_c_via_self_intersection(
        &self,
        a: &SigmaVector,
        b: &SigmaVector,
    ) -> Result<CorrectionClass, FlopError> {
        self.check_sigma(a)?;
        self.check_sigma(b)?;
        let x = self.pull(a.top());
        let y = self.pull(b.top());
        let normal = self.pp.cotangent_chern_euler(self.r as i64)?;
        Ok(CorrectionClass {
            value: self.pp.mul(&self.pp.mul(&x, &y), &normal),
        })
    }

    /// Term (***) with `Ω_{P'|S} = G ⊗ O(-1)`.
    pub fn term_c_via_twist(&self, a: &SigmaVector, b: &SigmaVector) -> Result<CorrectionClass, FlopError> {
        self.check_sigma(a)?;
        self.check_sigma(b)?;
        let omega = tensor_by_line(&self.pp, self.e.bundle(), &self.pp.neg(&self.l()))?;
        Ok(CorrectionClass {
            value: self.times(&(a.top() * b.top()), &omega.c(&self.pp, self.r as i64)),
        })
    }

    /// `[Z]_*(α)` as far as `σ` determines it.
    pub fn zstar_correction(&self, s: &SigmaVector) -> Result<ZStarImage, FlopError> {
        self.check_sigma(s)?;
        Ok(ZStarImage {
            birational_part: Opaque("phi'_* phi^*(alpha)"),
            correction: CorrectionClass {
                value: self.pull(s.top()),
            },
        })
    }

    /// `A_raw + B + C - RHS` with optional faults planted in the tables.
    /// Zero exactly when the multiplicativity identity holds.
    pub fn headline_difference(
        &self,
        a: &SigmaVector,
        b: &SigmaVector,
        mutation: Option<Mutation>,
    ) -> Result<CorrectionClass, FlopError> {
        self.check_sigma(a)?;
        self.check_sigma(b)?;
        let owned;
        let t = match mutation {
            None => &self.tables,
            Some(m) => {
                owned = self.make_tables(Some(m));
                &owned
            }
        };
        let lhs = self.pp.add(
            &self.pp.add(&self.term_a_raw_with(t, a, b).value, &self.term_b_with(t, a, b).value),
            &self.term_c(a, b)?.value,
        );
        let rhs = self.sigma_top_with(t, a, b).value;
        Ok(CorrectionClass {
            value: self.pp.sub(&lhs, &rhs),
        })
    }

    fn name(&self, what: &str) -> String {
        let mode = match self.mode {
            FlopMode::Formal => "formal",
            FlopMode::Numeric => "numeric",
        };
        format!("r={}/{mode}/{what}", self.r)
    }

    /// Checks the identities the multiplicativity argument rests on.
    pub fn verify_foundations(&self) -> Report {
        let r = self.r;
        let ri = r as i64;
        let mut rep = Report::new();

        rep.push(Check::run(
            self.name("e-relation-consistency"),
            "H^(r+1) reduced directly equals H * H^r",
            || {
                let direct = self.e.h_power(r + 1);
                let stepwise = self.e.mul(&self.e.h(), &self.e.h_power(r));
                agree(&direct, &stepwise)
            },
        ));
        rep.push(Check::run(
            self.name("e-satisfies-f-relation"),
            "sum_j c_j(F) H^(r+1-j) = 0 in CH(E)",
            || {
                let mut acc = self.e.zero();
                for j in 0..=r + 1 {
                    let c = self.e.pullback(&self.pull(&self.c(j as i64)));
                    acc = self.e.add(&acc, &self.e.mul(&c, &self.e.h_power(r + 1 - j)));
                }
                zero_or(&self.e, &acc)
            },
        ));
        rep.push(Check::run(
            self.name("first-chern-classes"),
            "c_1(O_{P(Omega)}(1)) = H + L, so c_1(N_{E|X^}) = -H - L",
            || {
                let hl = self.e.add(&self.e.h(), &self.e.pullback(&self.l()));
                let mut acc = self.e.zero();
                let mut pow = self.e.one();
                for j in (0..=r).rev() {
                    let cj = if j == 0 {
                        self.pp.one()
                    } else {
                        self.pp.cotangent_chern(j as i64).map_err(|e| e.to_string())?
                    };
                    acc = self.e.add(&acc, &self.e.mul(&self.e.pullback(&cj), &pow));
                    pow = self.e.mul(&pow, &hl);
                }
                zero_or(&self.e, &acc)
            },
        ));
        rep.push(Check::run(
            self.name("g-twist"),
            "c_i(G) = sum_m (-1)^m l^m c_{i-m}(F) = c_i(Omega (x) O(1))",
            || {
                for i in 0..=ri {
                    let g = self.c_g(i);
                    let lemma = self.pp.cotangent_twist_chern(i).map_err(|e| e.to_string())?;
                    let oracle = self.pp.cotangent_twist_chern_oracle(i).map_err(|e| e.to_string())?;
                    agree(&g, &lemma).map_err(|w| format!("i={i}: {w}"))?;
                    agree(&g, &oracle).map_err(|w| format!("i={i} (oracle): {w}"))?;
                }
                Ok(())
            },
        ));
        rep.push(Check::run(
            self.name("eta-push-table"),
            "eta'_*(H^k) = 0 (k<=r-2), 1 (k=r-1), l - c_1(F) (k=r)",
            || {
                let top = self.pp.sub(&self.l(), &self.pull(&self.c(1)));
                for k in 0..=r {
                    let expected = if k + 2 <= r {
                        self.pp.zero()
                    } else if k + 1 == r {
                        self.pp.one()
                    } else {
                        top.clone()
                    };
                    agree(&self.eta_prime_push_power(k), &expected).map_err(|w| format!("k={k}: {w}"))?;
                }
                Ok(())
            },
        ));
        rep.push(Check::run(
            self.name("eta-push-routes"),
            "eta'_*(H^k) via Segre classes, via reduction and via tau agree",
            || {
                for k in 0..=2 * r + 1 {
                    let s = self.eta_prime_push_power(k);
                    agree(&s, &self.eta_prime_push_power_by_reduction(k)).map_err(|w| format!("k={k}: {w}"))?;
                    agree(&s, &self.eta_prime_push_power_by_tau(k)).map_err(|w| format!("k={k} (tau): {w}"))?;
                }
                Ok(())
            },
        ));
        rep.push(Check::run(
            self.name("tau-consistency"),
            "tau by recursion equals tau by reduction of h^i",
            || self.p.tau_table(3 * r).map(|_| ()).map_err(|e| e.to_string()),
        ));
        rep.push(Check::run(
            self.name("fibre-square"),
            "sum_k pi'^*(sigma_k pi_*(h^k)) = pi'^*(sigma_r)",
            || {
                let s = self.sample_sigma(Side::Alpha);
                let mut acc = self.base.zero();
                for k in 0..=r {
                    acc = &acc + &(s.get(k) * &self.p.push_power(k));
                }
                agree(&self.pull(&acc), &self.pull(s.top()))
            },
        ));
        rep.push(Check::run(
            self.name("exceptional-unit"),
            "eta_*(c_{r-1}(W)) = 1 for a formal normal bundle of rank r",
            || exceptional_unit(r),
        ));
        rep.push(Check::run(
            self.name("help-sum"),
            "sum_{i<j} (-1)^i l^i eta'_*(H^{k+j-i-1}) = tau_{k+j,r} + (-1)^{j-1} l^j tau_{k,r}",
            || {
                for j in 0..=2 * r {
                    for k in 0..=2 * r - j {
                        agree(&self.help_sum(j, k), &self.help_sum_closed(j, k))
                            .map_err(|w| format!("j={j}, k={k}: {w}"))?;
                    }
                }
                Ok(())
            },
        ));
        rep.push(Check::run(
            self.name("t1-claim"),
            "T_1(j, r-q) = (-1)^j l^j sum_m (-1)^m l^m c_{q-m}(F); T_1(j) = (-1)^j l^j",
            || {
                for j in 0..=r {
                    for q in 0..=r {
                        agree(&self.t1(j, q), &self.t1_closed(j, q)).map_err(|w| format!("j={j}, q={q}: {w}"))?;
                    }
                    let pure = self.l_term(self.base.int(1).scale(&sign(j as i64)), j);
                    agree(&self.t1(j, 0), &pure).map_err(|w| format!("j={j}, q=0: {w}"))?;
                }
                Ok(())
            },
        ));
        rep.push(Check::run(
            self.name("t1-step"),
            "T_1(j+1, r-q) = T_1(j, r-q-1) - c_{q+1}(F) T_1(j, r)",
            || {
                for j in 0..r {
                    for q in 0..=r {
                        let rhs = self.pp.sub(&self.t1(j, q + 1), &self.times(&self.c(q as i64 + 1), &self.t1(j, 0)));
                        agree(&self.t1(j + 1, q), &rhs).map_err(|w| format!("j={j}, q={q}: {w}"))?;
                    }
                }
                Ok(())
            },
        ));
        rep.push(Check::run(
            self.name("t2-closed-form"),
            "T_2 = sum_{m'} (-1)^{m'-1} (m'+1) l^{m'} c_{r-m'}(F)",
            || agree(&self.t2(), &self.t2_closed()),
        ));
        rep.push(Check::run(
            self.name("omega-top"),
            "c_r(Omega_{P'|S}) = sum_{m'} (-1)^{m'} (m'+1) c_{r-m'}(F) l^{m'}",
            || {
                let exp = self.omega_top_expansion();
                agree(&exp, &self.pp.cotangent_chern(ri).map_err(|e| e.to_string())?)?;
                agree(&exp, &self.pp.cotangent_chern_euler(ri).map_err(|e| e.to_string())?)
            },
        ));
        rep.push(Check::run(
            self.name("symmetry"),
            "with F and F^dual exchanged, eta_*(H^r) = h + c_1(F) and eta_*(H^(r-1)) = 1",
            || {
                let sw = self.swapped().map_err(|e| e.to_string())?;
                let expected = sw.pp.add(&sw.l(), &sw.pull(&self.c(1)));
                agree(&sw.eta_prime_push_power(r), &expected)?;
                agree(&sw.eta_prime_push_power(r - 1), &sw.pp.one())
            },
        ));
        rep
    }

    fn sample_sigma(&self, side: Side) -> SigmaVector {
        match self.formal_sigma(side) {
            Ok(s) => s,
            Err(_) => {
                let seed = match side {
                    Side::Alpha => 1,
                    Side::Beta => 2,
                };
                self.random_sigma(&mut ChaCha8Rng::seed_from_u64(seed))
            }
        }
    }

    /// Checks every route of every term and the headline cancellation
    /// `A + B + C = π'^*(σ^{αβ}_r)` as elements of `CH(P')`.
    pub fn verify_multiplicativity(&self, a: &SigmaVector, b: &SigmaVector) -> Result<Report, FlopError> {
        self.check_sigma(a)?;
        self.check_sigma(b)?;
        let mut rep = Report::new();
        let wrap = |x: Result<CorrectionClass, FlopError>| x.map(|c| c.value).map_err(|e| e.to_string());

        rep.push(Check::run(
            self.name("sigma-top-routes"),
            "sum_{k,j} sigma_k sigma_j tau_{k+j,r} = top coefficient of i^*a * i^*b",
            || agree(&wrap(self.sigma_top_product(a, b))?, &wrap(self.sigma_top_product_direct(a, b))?),
        ));
        rep.push(Check::run(
            self.name("term-a-routes"),
            "I+II+III+(*): closed form = raw eta'_* expansion = expansion through E_alpha",
            || {
                let closed = wrap(self.term_a(a, b))?;
                agree(&closed, &wrap(self.term_a_raw(a, b))?).map_err(|w| format!("raw: {w}"))?;
                agree(&closed, &wrap(self.term_a_via_e_class(a, b))?).map_err(|w| format!("E_alpha: {w}"))
            },
        ));
        rep.push(Check::run(
            self.name("term-b-routes"),
            "(**): closed form = T_1/T_2 sums = raw eta'_* expansion = expansion through E_beta",
            || {
                let closed = wrap(self.term_b(a, b))?;
                agree(&closed, &wrap(self.term_b_via_t(a, b))?).map_err(|w| format!("T: {w}"))?;
                agree(&closed, &wrap(self.term_b_raw(a, b))?).map_err(|w| format!("raw: {w}"))?;
                agree(&closed, &wrap(self.term_b_via_e_class(a, b))?).map_err(|w| format!("E_beta: {w}"))
            },
        ));
        rep.push(Check::run(
            self.name("term-c-routes"),
            "(***): expansion = cotangent formula = self-intersection = twist of G",
            || {
                let exp = wrap(self.term_c(a, b))?;
                agree(&exp, &wrap(self.term_c_via_cotangent(a, b))?).map_err(|w| format!("cotangent: {w}"))?;
                agree(&exp, &wrap(self.term_c_via_self_intersection(a, b))?)
                    .map_err(|w| format!("self-intersection: {w}"))?;
                agree(&exp, &wrap(self.term_c_via_twist(a, b))?).map_err(|w| format!("twist: {w}"))
            },
        ));
        if let SigmaGrading::Codim(deg) = self.grading {
            rep.push(Check::run(
                self.name("homogeneity"),
                "A, B, C and pi'^*(sigma_r^{ab}) are homogeneous of one degree",
                || {
                    let target = 2 * deg - self.r as i64;
                    let parts = [
                        ("A", wrap(self.term_a_raw(a, b))?),
                        ("B", wrap(self.term_b(a, b))?),
                        ("C", wrap(self.term_c(a, b))?),
                        ("RHS", wrap(self.sigma_top_product(a, b))?),
                    ];
                    for (n, x) in parts {
                        let h = self.pp.homogeneity(&x);
                        if !h.admits(target) {
                            return Err(format!("{n} has homogeneity {h:?}, expected degree {target}"));
                        }
                    }
                    Ok(())
                },
            ));
        }
        rep.push(Check::run(
            self.name("closed-form-cancellation"),
            "closed forms: A + B + C = pi'^*(sigma_r^{ab})",
            || {
                let lhs = self.pp.add(
                    &self.pp.add(&wrap(self.term_a(a, b))?, &wrap(self.term_b(a, b))?),
                    &wrap(self.term_c(a, b))?,
                );
                agree(&lhs, &wrap(self.sigma_top_product(a, b))?)
            },
        ));
        rep.push(self.headline_check(a, b, None));
        Ok(rep)
    }

    /// The headline identity as a report entry, optionally with a planted fault.
    pub fn headline_check(&self, a: &SigmaVector, b: &SigmaVector, mutation: Option<Mutation>) -> Check {
        let name = match mutation {
            None => self.name("headline"),
            Some(m) => self.name(&format!("headline[{m}]")),
        };
        Check::run(name, "I+II+III+(*)+(**)+(***) = i'_* pi'^*(sigma_r^{ab})", || {
            let d = self.headline_difference(a, b, mutation).map_err(|e| e.to_string())?;
            if self.pp.is_zero(&d.value) {
                Ok(())
            } else {
                Err(format!("nonzero difference {d}"))
            }
        })
    }
}

/// Random homogeneous element of degree `d` with coefficients in `[-9, 9]`.
pub fn random_homogeneous(ring: &GradedRing, d: i64, rng: &mut ChaCha8Rng) -> GradedElement {
    if d < 0 {
        return ring.zero();
    }
    let mut acc = ring.zero();
    for m in ring.monomials_of_degree(d as u32) {
        let c: i64 = rng.gen_range(-9..=9);
        acc = &acc + &ring.monomial(m, rat(c));
    }
    acc
}

fn agree<T: PartialEq + fmt::Display>(x: &T, y: &T) -> Result<(), String> {
    if x == y {
        Ok(())
    } else {
        Err(format!("{x} != {y}"))
    }
}

fn zero_or<A: Algebra>(alg: &A, x: &A::Elem) -> Result<(), String> {
    if alg.is_zero(x) {
        Ok(())
    } else {
        Err(format!("nonzero: {x}"))
    }
}

/// `η_*(c_{r-1}(W)) = 1`, with `c_{r-1}(W)` also matched against
/// `c(N)/(1 - ξ)`.
pub fn exceptional_unit(r: usize) -> Result<(), String> {
    let gens: Vec<(String, i64)> = (1..=r).map(|i| (format!("n{i}"), i as i64)).collect();
    let base = GradedRing::new(gens, None).map_err(|e| e.to_string())?;
    let chern = (0..r).map(|i| base.gen_at(i)).collect();
    let normal = BundleClass::new(&base, r, chern).map_err(|e| e.to_string())?;
    let (exc, cw) = cw_top_for(base.clone(), normal).map_err(|e| e.to_string())?;
    agree(&cw, &cw_top_by_quotient(&exc)).map_err(|w| format!("quotient oracle: {w}"))?;
    let pushed = exc.pushforward(&cw);
    if pushed == base.one() {
        Ok(())
    } else {
        Err(format!("eta_*(c_(r-1)(W)) = {pushed}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn formal(r: usize) -> FlopContext {
        FlopContext::formal(r, SigmaGrading::Codim(r as i64)).unwrap()
    }

    #[test]
    fn construction() {
        let c1 = formal(1);
        assert_eq!(c1.e().rank(), 1);
        let c2 = formal(2);
        assert_eq!(c2.base().ngens(), 3 + 6);
        assert_eq!(c2.c(3).to_string(), "1 * c3");
        assert_eq!(FlopContext::formal(0, SigmaGrading::Ungraded).err(), Some(FlopError::ZeroRank));
        let base = GradedRing::new([("x", 1)], None).unwrap();
        let x = base.gen_at(0);
        let bad = FlopContext::numeric(1, base.clone(), vec![x.clone(), x.clone()]);
        assert_eq!(bad.err(), Some(FlopError::ChernDegree { index: 2 }));
        assert!(FlopContext::numeric(1, base, vec![x.clone(), x.pow(2)]).is_ok());
    }

    #[test]
    fn e_class_examples() {
        let ctx = formal(2);
        let one = |k: usize| {
            let mut v = vec![ctx.base().zero(); 3];
            v[k] = ctx.base().one();
            SigmaVector::new(v)
        };
        assert_eq!(ctx.e_class(&one(0)).unwrap(), ctx.e().one());
        assert_eq!(ctx.e_class(&one(2)).unwrap(), ctx.e().h_power(2));
        assert!(matches!(
            ctx.e_class(&SigmaVector::new(vec![])),
            Err(FlopError::SigmaLength { expected: 3, got: 0 })
        ));
    }

    #[test]
    fn eta_push_table_r3() {
        let ctx = formal(3);
        assert_eq!(ctx.eta_prime_push_power(1), ctx.p_prime().zero());
        assert_eq!(ctx.eta_prime_push_power(2), ctx.p_prime().one());
        let top = ctx.p_prime().sub(&ctx.l(), &ctx.pull(&ctx.c(1)));
        assert_eq!(ctx.eta_prime_push_power(3), top);
    }

    #[test]
    fn small_examples() {
        let ctx = formal(1);
        let a = ctx.formal_sigma(Side::Alpha).unwrap();
        let b = ctx.formal_sigma(Side::Beta).unwrap();
        // tau_{2,1} = -c_1(F)
        assert_eq!(ctx.tau(2, 1), &-&ctx.c(1));
        // T_2 at r = 1 is 2l - c_1(F)
        let expected = ctx.p_prime().sub(&ctx.p_prime().scale(&ctx.l(), &rat(2)), &ctx.pull(&ctx.c(1)));
        assert_eq!(ctx.t2(), expected);
        // c_1(Omega) = c_1(F) - 2l
        let omega = ctx.p_prime().cotangent_chern(1).unwrap();
        assert_eq!(omega, ctx.p_prime().neg(&expected));
        assert_eq!(ctx.t1(0, 0), ctx.p_prime().one());
        // unit sigma_alpha gives pi'^*(sigma_r^beta)
        let unit = SigmaVector::new(vec![ctx.base().one(), ctx.base().zero()]);
        assert_eq!(ctx.sigma_top_product(&unit, &b).unwrap().value, ctx.pull(b.top()));
        assert!(ctx.verify_multiplicativity(&a, &b).unwrap().passed());
    }

    #[test]
    fn zstar() {
        let ctx = formal(2);
        let z = ctx.base().zero();
        let s = SigmaVector::new(vec![z.clone(), z.clone(), z.clone()]);
        assert_eq!(ctx.zstar_correction(&s).unwrap().correction.value, ctx.p_prime().zero());
        let top = SigmaVector::new(vec![z.clone(), z.clone(), ctx.base().one()]);
        assert_eq!(ctx.zstar_correction(&top).unwrap().correction.value, ctx.p_prime().one());
    }

    #[test]
    fn foundations_small() {
        for r in 1..=3 {
            let rep = formal(r).verify_foundations();
            assert!(rep.passed(), "{rep}");
        }
    }

    #[test]
    fn mutations_detected_r2() {
        let ctx = formal(2);
        let a = ctx.formal_sigma(Side::Alpha).unwrap();
        let b = ctx.formal_sigma(Side::Beta).unwrap();
        assert!(ctx.headline_check(&a, &b, None).passed());
        for m in [Mutation::Tau { i: 3, j: 2 }, Mutation::Segre { k: 1 }, Mutation::TermBSign] {
            let c = ctx.headline_check(&a, &b, Some(m));
            assert!(!c.passed(), "{m}");
            assert!(c.witness.unwrap().contains("nonzero"));
        }
    }

    #[test]
    fn numeric_context() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ctx = FlopContext::random_numeric(2, &mut rng, None).unwrap();
        let a = ctx.random_sigma(&mut rng);
        let b = ctx.random_sigma(&mut rng);
        let rep = ctx.verify_multiplicativity(&a, &b).unwrap();
        assert!(rep.passed(), "{rep}");
        assert!(ctx.verify_foundations().passed());
    }
}
