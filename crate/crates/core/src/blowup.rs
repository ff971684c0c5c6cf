//! Chow groups and products on a blow-up `X̂ = Bl_P X`.
//!
//! Classes are pairs `φ^*(α) + j_*(ε)` with `ε ∈ CH(E)`, `E = P(N_{P|X})`,
//! normalized so that `η_*(ε) = 0`. The normalization uses the key formula
//! `φ^* i_*(γ) = j_*(c_{r-1}(W)·η^*γ)` with `W = η^*N / O(-1)`.
//!
//! Standing assumptions: `N_{E|X̂} = O_{P(N)}(-1)`, so `j^*j_*ε = -ξ·ε`,
//! and `j^*φ^* = η^*i^*`.

use std::collections::BTreeMap;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{binomial_q, rat, sign, Algebra};
use crate::chern::{dual_bundle, segre_classes, BundleClass, ChernError};
use crate::graded::{AlgebraError, GradedElement, GradedRing, Monomial};
use crate::linalg;
use crate::proj_bundle::{PBElement, ProjBundle, ProjBundleError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlowupError {
    #[error("codimension must be positive")]
    ZeroCodim,
    #[error("linear subspace dimension {m} must be below ambient dimension {n}")]
    BadLinearCase { n: usize, m: usize },
    #[error("expected {expected} pullback images, got {got}")]
    PullbackArity { expected: usize, got: usize },
    #[error("normal bundle has rank {got}, codimension is {expected}")]
    NormalRank { expected: usize, got: usize },
    #[error("pushforward of monomial `{0}` is not specified")]
    PushUndefined(String),
    #[error("element lives in the wrong ring")]
    RingMismatch,
    #[error("embedding rejected by {check}: {witness}")]
    Rejected { check: &'static str, witness: String },
    #[error("class does not push forward to zero: {0}")]
    NonzeroPushforward(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Chern(#[from] ChernError),
    #[error(transparent)]
    ProjBundle(#[from] ProjBundleError),
}

/// `P ⊂ X` of codimension `r`: ring models, `i^*`, `i_*` and `N_{P|X}`.
#[derive(Clone, Debug)]
pub struct EmbeddingData {
    ambient: GradedRing,
    center: GradedRing,
    codim: usize,
    pull: Vec<GradedElement>,
    push: BTreeMap<Monomial, GradedElement>,
    normal: BundleClass<GradedElement>,
}

impl EmbeddingData {
    /// `pull[i]` is the image of the `i`-th ambient generator; `push` gives
    /// `i_*` on center monomials.
    pub fn new(
        ambient: GradedRing,
        center: GradedRing,
        codim: usize,
        pull: Vec<GradedElement>,
        push: BTreeMap<Monomial, GradedElement>,
        normal: BundleClass<GradedElement>,
    ) -> Result<Self, BlowupError> {
        if codim == 0 {
            return Err(BlowupError::ZeroCodim);
        }
        if pull.len() != ambient.ngens() {
            return Err(BlowupError::PullbackArity {
                expected: ambient.ngens(),
                got: pull.len(),
            });
        }
        if normal.rank() != codim {
            return Err(BlowupError::NormalRank {
                expected: codim,
                got: normal.rank(),
            });
        }
        let pulls_ok = pull.iter().all(|p| *p.ring() == center);
        let push_ok = push.values().all(|p| *p.ring() == ambient);
        let normal_ok = normal.classes().iter().all(|c| *c.ring() == center);
        if !(pulls_ok && push_ok && normal_ok) {
            return Err(BlowupError::RingMismatch);
        }
        Ok(EmbeddingData {
            ambient,
            center,
            codim,
            pull,
            push,
            normal,
        })
    }

    pub fn ambient(&self) -> &GradedRing {
        &self.ambient
    }

    pub fn center(&self) -> &GradedRing {
        &self.center
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn normal(&self) -> &BundleClass<GradedElement> {
        &self.normal
    }

    /// `i^*`.
    pub fn pull(&self, a: &GradedElement) -> Result<GradedElement, BlowupError> {
        if *a.ring() != self.ambient {
            return Err(BlowupError::RingMismatch);
        }
        let images: Vec<_> = self.pull.iter().cloned().map(Some).collect();
        Ok(a.substitute_positional(&self.center, &images)?)
    }

    /// `i_*`, extended linearly from the monomial table.
    pub fn push(&self, g: &GradedElement) -> Result<GradedElement, BlowupError> {
        if *g.ring() != self.center {
            return Err(BlowupError::RingMismatch);
        }
        let mut acc = self.ambient.zero();
        for (m, q) in g.terms() {
            let img = self.push.get(m).ok_or_else(|| {
                BlowupError::PushUndefined(self.center.monomial(m.clone(), One::one()).to_string())
            })?;
            acc = &acc + &img.scale(q);
        }
        Ok(acc)
    }

    /// Replaces the `i_*` image of one monomial. Used to build corrupted
    /// fixtures for validation tests.
    pub fn with_push(mut self, monomial: Monomial, image: GradedElement) -> Self {
        self.push.insert(monomial, image);
        self
    }

    /// Declarative text form, see [`EmbeddingData::from_text`].
    pub fn to_text(&self) -> String {
        let gens = |r: &GradedRing| {
            r.spec()
                .generators()
                .iter()
                .map(|g| format!("{}:{}", g.name, g.degree))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = String::new();
        out.push_str(&format!("ambient: {}\n", gens(&self.ambient)));
        if let Some(b) = self.ambient.dim_bound() {
            out.push_str(&format!("ambient_bound: {b}\n"));
        }
        out.push_str(&format!("center: {}\n", gens(&self.center)));
        if let Some(b) = self.center.dim_bound() {
            out.push_str(&format!("center_bound: {b}\n"));
        }
        out.push_str(&format!("codim: {}\n", self.codim));
        for (g, img) in self.ambient.spec().generators().iter().zip(&self.pull) {
            out.push_str(&format!("pull {}: {}\n", g.name, img));
        }
        for (m, img) in &self.push {
            let key = self.center.monomial(m.clone(), One::one()).to_string();
            let key = key.strip_prefix("1 * ").unwrap_or(&key).to_string();
            out.push_str(&format!("push {key}: {img}\n"));
        }
        let chern: Vec<String> = self.normal.classes().iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("normal: {}\n", chern.join(", ")));
        out
    }

    /// Parses lines of the form
    ///
    /// ```text
    /// ambient: t:1
    /// ambient_bound: 4
    /// center: u:1
    /// center_bound: 1
    /// codim: 3
    /// pull t: u
    /// push 1: t^3
    /// push u: t^4
    /// normal: 3*u, 0, 0
    /// ```
    ///
    /// `#` starts a comment. `normal` lists `c_1..c_r` of `N_{P|X}`.
    pub fn from_text(text: &str) -> Result<Self, BlowupError> {
        let mut fields: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut pulls: Vec<(usize, String, String)> = Vec::new();
        let mut pushes: Vec<(usize, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once(':').ok_or(BlowupError::Syntax {
                line: line_no,
                msg: "expected `key: value`".into(),
            })?;
            let (key, value) = (key.trim(), value.trim().to_string());
            if let Some(g) = key.strip_prefix("pull ") {
                pulls.push((line_no, g.trim().to_string(), value));
            } else if let Some(m) = key.strip_prefix("push ") {
                pushes.push((line_no, m.trim().to_string(), value));
            } else if key == "ambient" || key == "center" {
                // generator lists contain `:` themselves
                let value = line[key.len()..].trim_start().trim_start_matches(':').trim().to_string();
                fields.insert(key.to_string(), (line_no, value));
            } else if ["ambient_bound", "center_bound", "codim", "normal"].contains(&key) {
                fields.insert(key.to_string(), (line_no, value));
            } else {
                return Err(BlowupError::Syntax {
                    line: line_no,
                    msg: format!("unknown key `{key}`"),
                });
            }
        }
        let get = |k: &str| {
            fields.get(k).cloned().ok_or(BlowupError::Syntax {
                line: 0,
                msg: format!("missing field `{k}`"),
            })
        };
        let bound = |k: &str| -> Result<Option<u32>, BlowupError> {
            match fields.get(k) {
                None => Ok(None),
                Some((line, v)) => v.parse().map(Some).map_err(|_| BlowupError::Syntax {
                    line: *line,
                    msg: format!("bad bound `{v}`"),
                }),
            }
        };
        let ring = |k: &str, b: Option<u32>| -> Result<GradedRing, BlowupError> {
            let (line, v) = get(k)?;
            let mut gens = Vec::new();
            for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (name, deg) = item.split_once(':').ok_or(BlowupError::Syntax {
                    line,
                    msg: format!("bad generator `{item}`"),
                })?;
                let deg: i64 = deg.trim().parse().map_err(|_| BlowupError::Syntax {
                    line,
                    msg: format!("bad degree in `{item}`"),
                })?;
                gens.push((name.trim().to_string(), deg));
            }
            Ok(GradedRing::new(gens, b)?)
        };
        let ambient = ring("ambient", bound("ambient_bound")?)?;
        let center = ring("center", bound("center_bound")?)?;
        let (line, codim) = get("codim")?;
        let codim: usize = codim.parse().map_err(|_| BlowupError::Syntax {
            line,
            msg: "bad codimension".into(),
        })?;

        let mut pull = vec![None; ambient.ngens()];
        for (line, g, v) in pulls {
            let i = ambient.generator_index(&g).ok_or(BlowupError::Syntax {
                line,
                msg: format!("unknown ambient generator `{g}`"),
            })?;
            pull[i] = Some(center.parse(&v)?);
        }
        let pull = pull
            .into_iter()
            .zip(ambient.spec().generators())
            .map(|(p, g)| {
                p.ok_or(BlowupError::Syntax {
                    line: 0,
                    msg: format!("no pullback for `{}`", g.name),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut push = BTreeMap::new();
        for (line, m, v) in pushes {
            let key = center.parse(&m)?;
            let (mono, coeff) = match key.terms().next() {
                Some((mono, c)) if key.len() == 1 => (mono.clone(), c.clone()),
                _ => {
                    return Err(BlowupError::Syntax {
                        line,
                        msg: format!("`{m}` is not a monomial"),
                    })
                }
            };
            if !coeff.is_one() {
                return Err(BlowupError::Syntax {
                    line,
                    msg: format!("`{m}` is not a monic monomial"),
                });
            }
            push.insert(mono, ambient.parse(&v)?);
        }

        let (_, normal) = get("normal")?;
        let chern = normal
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| center.parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        let normal = BundleClass::new(&center, chern.len(), chern)?;
        EmbeddingData::new(ambient, center, codim, pull, push, normal)
    }
}

fn random_element(ring: &GradedRing, rng: &mut ChaCha8Rng, max_deg: u32) -> GradedElement {
    let d = ring.dim_bound().unwrap_or(max_deg).min(max_deg);
    let mut acc = ring.zero();
    for m in ring.monomials_up_to(d) {
        let c: i64 = rng.gen_range(-9..=9);
        acc = &acc + &ring.monomial(m, rat(c));
    }
    acc
}

/// Checks that `i^*` is multiplicative and that the projection and
/// self-intersection formulas hold on `samples` seeded random pairs.
/// Returns the number of pairs checked.
pub fn embedding_validate(data: &EmbeddingData, samples: usize, seed: u64) -> Result<usize, BlowupError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = 4;
    let c_top = data.normal.c(&data.center, data.codim as i64);
    for _ in 0..samples {
        let a = random_element(&data.ambient, &mut rng, horizon);
        let b = random_element(&data.ambient, &mut rng, horizon);
        let g = random_element(&data.center, &mut rng, horizon);
        let g2 = random_element(&data.center, &mut rng, horizon);

        let lhs = data.pull(&(&a * &b))?;
        let rhs = &data.pull(&a)? * &data.pull(&b)?;
        if lhs != rhs {
            return Err(BlowupError::Rejected {
                check: "pullback homomorphism",
                witness: format!("a = {a}, b = {b}: {lhs} != {rhs}"),
            });
        }

        let lhs = data.push(&(&data.pull(&a)? * &g))?;
        let rhs = &a * &data.push(&g)?;
        if lhs != rhs {
            return Err(BlowupError::Rejected {
                check: "projection formula",
                witness: format!("alpha = {a}, gamma = {g}: {lhs} != {rhs}"),
            });
        }

        let lhs = &data.push(&g)? * &data.push(&g2)?;
        let rhs = data.push(&(&(&g * &g2) * &c_top))?;
        if lhs != rhs {
            return Err(BlowupError::Rejected {
                check: "self-intersection formula",
                witness: format!("gamma = {g}, gamma' = {g2}: {lhs} != {rhs}"),
            });
        }
    }
    Ok(samples)
}

/// `P^m ⊂ P^n` as a linear subspace.
pub fn linear_blowup(n: usize, m: usize) -> Result<EmbeddingData, BlowupError> {
    if m >= n {
        return Err(BlowupError::BadLinearCase { n, m });
    }
    let r = n - m;
    let ambient = GradedRing::new([("t", 1)], Some(n as u32))?;
    let center = GradedRing::new([("u", 1)], Some(m as u32))?;
    let t = ambient.gen_at(0);
    let u = center.gen_at(0);
    let push = (0..=m)
        .map(|k| {
            (
                center.monomial_from_exponents(vec![k as u32]),
                t.pow((k + r) as u32),
            )
        })
        .collect();
    let chern = (1..=r as i64)
        .map(|i| u.pow(i as u32).scale(&binomial_q(r as i64, i)))
        .collect();
    let normal = BundleClass::new(&center, r, chern)?;
    EmbeddingData::new(ambient, center.clone(), r, vec![u], push, normal)
}

/// `φ^*(α) + j_*(ε)` with `η_*(ε) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlowupClass {
    pub ambient: GradedElement,
    pub exceptional: PBElement<GradedElement>,
}

#[derive(Clone, Debug)]
pub struct Blowup {
    data: EmbeddingData,
    exc: ProjBundle<GradedRing>,
    cw_top: PBElement<GradedElement>,
}

impl Blowup {
    pub fn new(data: EmbeddingData) -> Result<Self, BlowupError> {
        let exc = ProjBundle::new(data.center.clone(), data.normal.clone(), "xi")?;
        let cw_top = cw_top_formula(&exc);
        Ok(Blowup { data, exc, cw_top })
    }

    pub fn data(&self) -> &EmbeddingData {
        &self.data
    }

    /// `CH(E)` as a projective bundle over the center.
    pub fn exceptional_ring(&self) -> &ProjBundle<GradedRing> {
        &self.exc
    }

    pub fn xi(&self) -> PBElement<GradedElement> {
        self.exc.h()
    }

    /// `c_{r-1}(W)`.
    pub fn cw_top(&self) -> &PBElement<GradedElement> {
        &self.cw_top
    }

    pub fn zero(&self) -> BlowupClass {
        BlowupClass {
            ambient: self.data.ambient.zero(),
            exceptional: self.exc.zero(),
        }
    }

    pub fn one(&self) -> BlowupClass {
        self.pull(&self.data.ambient.one())
    }

    /// `φ^*`.
    pub fn pull(&self, a: &GradedElement) -> BlowupClass {
        BlowupClass {
            ambient: a.clone(),
            exceptional: self.exc.zero(),
        }
    }

    /// `φ_*`. Under the normalization this is the ambient part.
    pub fn push(&self, a: &BlowupClass) -> Result<GradedElement, BlowupError> {
        let correction = self.data.push(&self.exc.pushforward(&a.exceptional))?;
        Ok(&a.ambient + &correction)
    }

    /// Splits `ε'` as `c_{r-1}(W)·η^*η_*ε' + ε` with `η_*ε = 0`.
    pub fn normalize(&self, eps: &PBElement<GradedElement>) -> PBElement<GradedElement> {
        let down = self.exc.pushforward(eps);
        self.exc
            .sub(eps, &self.exc.mul(&self.cw_top, &self.exc.pullback(&down)))
    }

    /// `j_*`.
    pub fn exc_push(&self, eps: &PBElement<GradedElement>) -> Result<BlowupClass, BlowupError> {
        let down = self.exc.pushforward(eps);
        Ok(BlowupClass {
            ambient: self.data.push(&down)?,
            exceptional: self.normalize(eps),
        })
    }

    pub fn add(&self, a: &BlowupClass, b: &BlowupClass) -> BlowupClass {
        BlowupClass {
            ambient: &a.ambient + &b.ambient,
            exceptional: self.exc.add(&a.exceptional, &b.exceptional),
        }
    }

    pub fn neg(&self, a: &BlowupClass) -> BlowupClass {
        BlowupClass {
            ambient: -&a.ambient,
            exceptional: self.exc.neg(&a.exceptional),
        }
    }

    pub fn sub(&self, a: &BlowupClass, b: &BlowupClass) -> BlowupClass {
        self.add(a, &self.neg(b))
    }

    /// `j^*j_*ε = c_1(N_{E|X̂})·ε = -ξ·ε`.
    pub fn restrict_exc_push(&self, eps: &PBElement<GradedElement>) -> PBElement<GradedElement> {
        self.exc.neg(&self.exc.mul(&self.xi(), eps))
    }

    /// `η^*i^*(α)`.
    fn restrict_ambient(&self, a: &GradedElement) -> Result<PBElement<GradedElement>, BlowupError> {
        Ok(self.exc.pullback(&self.data.pull(a)?))
    }

    pub fn mul(&self, a: &BlowupClass, b: &BlowupClass) -> Result<BlowupClass, BlowupError> {
        let ambient = &a.ambient * &b.ambient;
        let mixed_a = self.exc.mul(&self.restrict_ambient(&a.ambient)?, &b.exceptional);
        let mixed_b = self.exc.mul(&self.restrict_ambient(&b.ambient)?, &a.exceptional);
        let both = self.restrict_exc_push(&self.exc.mul(&a.exceptional, &b.exceptional));
        let eps = self.exc.add(&self.exc.add(&mixed_a, &mixed_b), &both);
        let pushed = self.exc_push(&eps)?;
        Ok(BlowupClass {
            ambient: &ambient + &pushed.ambient,
            exceptional: pushed.exceptional,
        })
    }

    pub fn pow(&self, a: &BlowupClass, e: u32) -> Result<BlowupClass, BlowupError> {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }

    /// The unique `ε` with `η_*ε = 0` and `j_*ε = a`, for `φ_*(a) = 0`.
    pub fn delta_decompose(&self, a: &BlowupClass) -> Result<PBElement<GradedElement>, BlowupError> {
        let down = self.push(a)?;
        if !down.is_zero() {
            return Err(BlowupError::NonzeroPushforward(down.to_string()));
        }
        Ok(self.normalize(&a.exceptional))
    }

    /// Monomial basis of `CH(E)` in degree `d` as `(center monomial, ξ power)`.
    fn exceptional_basis(&self, d: i64) -> Vec<PBElement<GradedElement>> {
        let mut out = Vec::new();
        for k in 0..self.exc.rank() as i64 {
            if d - k < 0 {
                continue;
            }
            for m in self.data.center.monomials_of_degree((d - k) as u32) {
                let g = self.data.center.monomial(m, One::one());
                if g.is_zero() {
                    continue;
                }
                let mut coeffs = vec![self.data.center.zero(); self.exc.rank()];
                coeffs[k as usize] = g;
                out.push(self.exc.element(coeffs).expect("basis length"));
            }
        }
        out
    }

    fn coordinates(&self, a: &BlowupClass, deg: i64) -> Vec<crate::algebra::Rational> {
        let amb_basis = if deg >= 0 {
            self.data.ambient.monomials_of_degree(deg as u32)
        } else {
            Vec::new()
        };
        let mut v = linalg::coordinates(&a.ambient, &amb_basis);
        for k in 0..self.exc.rank() as i64 {
            let d = deg - 1 - k;
            if d < 0 {
                continue;
            }
            let basis = self.data.center.monomials_of_degree(d as u32);
            v.extend(linalg::coordinates(&a.exceptional.coeffs()[k as usize], &basis));
        }
        v
    }

    /// Dimension of the span of `classes`, all homogeneous of degree `deg`.
    pub fn span_dimension(&self, classes: &[BlowupClass], deg: i64) -> usize {
        let rows: Vec<_> = classes.iter().map(|c| self.coordinates(c, deg)).collect();
        linalg::rank(&rows)
    }

    /// Checks injectivity of `ε ↦ (η_*ε, j^*j_*ε)` on `CH(E)` up to degree
    /// `max_deg`: if both vanish then `ε = 0`.
    pub fn exceptional_detection_holds(&self, max_deg: i64) -> bool {
        (0..=max_deg).all(|d| {
            let basis = self.exceptional_basis(d);
            if basis.is_empty() {
                return true;
            }
            let down_basis = self.data.center.monomials_of_degree((d - self.exc.rank() as i64 + 1).max(0) as u32);
            let rows: Vec<Vec<crate::algebra::Rational>> = basis
                .iter()
                .map(|e| {
                    let mut v = Vec::new();
                    if d + 1 >= self.exc.rank() as i64 {
                        v.extend(linalg::coordinates(&self.exc.pushforward(e), &down_basis));
                    }
                    let r = self.restrict_exc_push(e);
                    for (k, c) in r.coeffs().iter().enumerate() {
                        let dd = d + 1 - k as i64;
                        if dd >= 0 {
                            v.extend(linalg::coordinates(c, &self.data.center.monomials_of_degree(dd as u32)));
                        }
                    }
                    v
                })
                .collect();
            linalg::rank(&rows) == basis.len()
        })
    }
}

/// `c_{r-1}(W) = (-1)^{r-1} Σ_m (-1)^m ξ^m η^*c_{r-1-m}(N^dual)`.
fn cw_top_formula(exc: &ProjBundle<GradedRing>) -> PBElement<GradedElement> {
    let r = exc.rank() as i64;
    let base = exc.base();
    let dual = dual_bundle(base, exc.bundle());
    let mut poly = vec![base.zero(); exc.rank()];
    for m in 0..r {
        let c = dual.c(base, r - 1 - m).scale(&(sign(r - 1) * sign(m)));
        poly[m as usize] = &poly[m as usize] + &c;
    }
    exc.reduce(poly)
}

/// Oracle for `c_{r-1}(W)`: the degree `r-1` part of `c(η^*N)/c(O(-1))`.
pub fn cw_top_by_quotient(exc: &ProjBundle<GradedRing>) -> PBElement<GradedElement> {
    let r = exc.rank();
    let taut = BundleClass::new_unchecked(1, vec![exc.neg(&exc.h())]);
    let inv = segre_classes(exc, &taut, r);
    let pulled = exc.bundle().map(|c| exc.pullback(c));
    let mut acc = exc.zero();
    for (k, s) in inv.iter().enumerate().take(r) {
        acc = exc.add(&acc, &exc.mul(&pulled.c(exc, (r - 1 - k) as i64), s));
    }
    acc
}

/// `c_{r-1}(W)` for a formal normal bundle of rank `r` over `base`.
pub fn cw_top_for(base: GradedRing, normal: BundleClass<GradedElement>) -> Result<(ProjBundle<GradedRing>, PBElement<GradedElement>), BlowupError> {
    let exc = ProjBundle::new(base, normal, "xi")?;
    let cw = cw_top_formula(&exc);
    Ok((exc, cw))
}
