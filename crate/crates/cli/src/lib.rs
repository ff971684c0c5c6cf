//! Verification suites behind the `chowflop` binary.
//!
//! A [`SuiteConfig`] selects the checks; [`run_suite`] runs them (in
//! parallel across `r` where that helps) and returns a [`Report`] sorted by
//! check name, so the same config and seed always give the same report up
//! to timings.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use chowflop_core::algebra::{rat, Algebra};
use chowflop_core::blowup::{embedding_validate, linear_blowup, Blowup, BlowupClass, EmbeddingData};
use chowflop_core::chern::{
    chern_character, segre_classes, sqrt_one_series, todd_class, whitney_sum, BundleClass, CharClass,
};
use chowflop_core::flop::{random_homogeneous, FlopContext, Side, SigmaGrading};
use chowflop_core::proj_bundle::{binomial_identity_check, ProjBundle};
use chowflop_core::report::{Check, Report};
use chowflop_core::{GradedElement, GradedRing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Binomial,
    ProjBundle,
    Blowup,
    CharClass,
    Flop,
    All,
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "binomial" => Suite::Binomial,
            "projbundle" => Suite::ProjBundle,
            "blowup" => Suite::Blowup,
            "charclass" => Suite::CharClass,
            "flop" => Suite::Flop,
            "all" => Suite::All,
            _ => {
                return Err(usage(format!(
                    "unknown suite `{s}` (expected binomial, projbundle, blowup, charclass, flop or all)"
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Binomial => "binomial",
            Suite::ProjBundle => "projbundle",
            Suite::Blowup => "blowup",
            Suite::CharClass => "charclass",
            Suite::Flop => "flop",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Formal,
    Numeric,
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "formal" => Ok(Mode::Formal),
            "numeric" => Ok(Mode::Numeric),
            _ => Err(usage(format!("unknown mode `{s}` (expected formal or numeric)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(usage(format!("unknown format `{s}` (expected text or json)"))),
        }
    }
}

/// The embedding used by the blow-up suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Case {
    /// `P^m ⊂ P^n`.
    Linear { n: usize, m: usize },
    /// A declarative embedding file.
    File(PathBuf),
}

impl FromStr for Case {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if let Some(rest) = s.strip_prefix("linear:") {
            let (n, m) = rest
                .split_once(',')
                .ok_or_else(|| usage(format!("bad case `{s}` (expected linear:n,m)")))?;
            let parse = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| usage(format!("bad case `{s}` (expected linear:n,m)")))
            };
            let (n, m) = (parse(n)?, parse(m)?);
            if m >= n {
                return Err(usage(format!("bad case `{s}`: need m < n")));
            }
            Ok(Case::Linear { n, m })
        } else {
            Ok(Case::File(PathBuf::from(s)))
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::Linear { n, m } => write!(f, "linear:{n},{m}"),
            Case::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub suite: Suite,
    /// A single `r`; takes precedence over `r_max`.
    pub r: Option<usize>,
    pub r_max: Option<usize>,
    pub mode: Mode,
    pub trials: usize,
    pub seed: u64,
    pub dim_bound: Option<u32>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub case: Case,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: Suite::All,
            r: None,
            r_max: None,
            mode: Mode::Formal,
            trials: 3,
            seed: 0,
            dim_bound: None,
            format: Format::Text,
            output: None,
            case: Case::Linear { n: 4, m: 1 },
        }
    }
}

/// Settings as strings, keyed like the long flags (`r-max` and `r_max` are
/// both accepted). Later sources override earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings(BTreeMap<String, String>);

const KEYS: [&str; 10] = [
    "suite", "r", "r-max", "mode", "trials", "seed", "dim-bound", "format", "out", "case",
];

impl Settings {
    pub fn new() -> Self {
        Settings::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), CliError> {
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(usage(format!("unknown setting `{key}`")));
        }
        self.0.insert(key, value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// Flat `key=value` lines; `#` starts a comment.
    pub fn parse_file(text: &str) -> Result<Settings, CliError> {
        let mut s = Settings::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key=value", i + 1)))?;
            s.set(k, v.trim())
                .map_err(|e| usage(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(s)
    }

    pub fn overlay(&mut self, other: &Settings) {
        for (k, v) in &other.0 {
            self.0.insert(k.clone(), v.clone());
        }
    }

    pub fn into_config(self) -> Result<SuiteConfig, CliError> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
            v.parse()
                .map_err(|_| usage(format!("invalid value `{v}` for --{key}")))
        }
        let mut cfg = SuiteConfig::default();
        for (k, v) in &self.0 {
            match k.as_str() {
                "suite" => cfg.suite = v.parse()?,
                "r" => cfg.r = Some(num(k, v)?),
                "r-max" => cfg.r_max = Some(num(k, v)?),
                "mode" => cfg.mode = v.parse()?,
                "trials" => cfg.trials = num(k, v)?,
                "seed" => cfg.seed = num(k, v)?,
                "dim-bound" => cfg.dim_bound = Some(num(k, v)?),
                "format" => cfg.format = v.parse()?,
                "out" => cfg.output = Some(PathBuf::from(v)),
                "case" => cfg.case = v.parse()?,
                _ => unreachable!("keys are checked in `set`"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.r == Some(0) || self.r_max == Some(0) {
            return Err(usage("r must be at least 1"));
        }
        if self.mode == Mode::Numeric && self.trials == 0 {
            return Err(usage("numeric mode needs at least one trial"));
        }
        Ok(())
    }

    /// The `r` values to run, given the suite's default range.
    fn r_values(&self, default_max: usize) -> Vec<usize> {
        match self.r {
            Some(r) => vec![r],
            None => (1..=self.r_max.unwrap_or(default_max)).collect(),
        }
    }

    /// Independent random stream for one (suite, r, trial) cell.
    fn rng(&self, suite: Suite, r: usize, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((suite as u64) << 48) | ((r as u64) << 32) | trial as u64);
        rng
    }
}

/// Runs the selected suite(s).
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let mut report = match cfg.suite {
        Suite::Binomial => binomial_suite(cfg),
        Suite::ProjBundle => projbundle_suite(cfg),
        Suite::Blowup => blowup_suite(cfg)?,
        Suite::CharClass => charclass_suite(cfg),
        Suite::Flop => flop_suite(cfg),
        Suite::All => {
            let mut all = binomial_suite(cfg);
            all.merge(projbundle_suite(cfg));
            all.merge(blowup_suite(cfg)?);
            all.merge(charclass_suite(cfg));
            all.merge(flop_suite(cfg));
            all
        }
    };
    report.seed = Some(cfg.seed);
    Ok(report)
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => format!("{report}\n"),
        Format::Json => format!("{}\n", report.to_json()),
    }
}

fn merge_all(parts: Vec<Report>) -> Report {
    let mut out = Report::new();
    for p in parts {
        out.merge(p);
    }
    out
}

fn prefixed(prefix: &str, report: Report) -> Report {
    report
        .checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{prefix}/{}", c.name);
            c
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn binomial_suite(cfg: &SuiteConfig) -> Report {
    let parts = cfg
        .r_values(12)
        .into_par_iter()
        .map(|r| {
            Report::from_iter([Check::run(
                format!("binomial/r={r:02}"),
                "sum_j (-1)^(j+k) C(r-j, i-j) C(r+1-k, j-k) = (-1)^(i+k) for 0 <= k <= i <= r",
                || {
                    let rep = binomial_identity_check(r as i64);
                    ensure(rep.passed(), || {
                        format!("failures {:?}, step failures {:?}", rep.failures, rep.step_failures)
                    })
                },
            )])
        })
        .collect();
    merge_all(parts)
}

fn formal_bundle(n: usize) -> (GradedRing, BundleClass<GradedElement>) {
    let ring = GradedRing::new((1..=n).map(|i| (format!("c{i}"), i as i64)), None).expect("distinct names");
    let chern = (0..n).map(|i| ring.gen_at(i)).collect();
    let f = BundleClass::new(&ring, n, chern).expect("generators have the right degrees");
    (ring, f)
}

fn numeric_bundle(n: usize, dim_bound: Option<u32>, rng: &mut ChaCha8Rng) -> (GradedRing, BundleClass<GradedElement>) {
    let ring = GradedRing::new([("x", 1), ("y", 2), ("z", 3)], dim_bound).expect("distinct names");
    let chern = (1..=n as i64).map(|i| random_homogeneous(&ring, i, rng)).collect();
    let f = BundleClass::new(&ring, n, chern).expect("homogeneous by construction");
    (ring, f)
}

/// Bundles for one `r` cell: one formal bundle, or `trials` numeric ones.
fn bundles(cfg: &SuiteConfig, suite: Suite, n: usize) -> Vec<(String, GradedRing, BundleClass<GradedElement>)> {
    match cfg.mode {
        Mode::Formal => {
            let (s, f) = formal_bundle(n);
            vec![("formal".to_string(), s, f)]
        }
        Mode::Numeric => (0..cfg.trials)
            .map(|t| {
                let (s, f) = numeric_bundle(n, cfg.dim_bound, &mut cfg.rng(suite, n, t));
                (format!("trial={t:03}"), s, f)
            })
            .collect(),
    }
}

fn projbundle_suite(cfg: &SuiteConfig) -> Report {
    let parts = cfg
        .r_values(6)
        .into_par_iter()
        .map(|n| {
            let mut rep = Report::new();
            for (tag, s, f) in bundles(cfg, Suite::ProjBundle, n) {
                let c1 = f.c(&s, 1);
                let p = ProjBundle::new(s.clone(), f, "h").expect("positive rank");
                let name = |what: &str| format!("projbundle/n={n}/{tag}/{what}");
                rep.push(Check::run(
                    name("pi-push-table"),
                    "pi_*(h^k) = 0, 1, -c_1(F) at k = n-2, n-1, n",
                    || {
                        let mut table = vec![(n - 1, s.one()), (n, -&c1)];
                        if n >= 2 {
                            table.push((n - 2, s.zero()));
                        }
                        for (k, expected) in table {
                            let got = p.push_power(k);
                            let reduced = p.pushforward(&p.h_power(k));
                            ensure(got == expected && reduced == expected, || {
                                format!("k={k}: {got} / {reduced}, expected {expected}")
                            })?;
                        }
                        Ok(())
                    },
                ));
                rep.push(Check::run(
                    name("tau-consistency"),
                    "tau by recursion equals tau by reduction of h^i, i <= 3n",
                    || p.tau_table(3 * n).map(|_| ()).map_err(|e| e.to_string()),
                ));
                rep.push(Check::run(
                    name("cotangent"),
                    "c_i(Omega) by the binomial formula equals the Euler-sequence value",
                    || {
                        for i in 0..=n as i64 {
                            let a = p.cotangent_chern(i).map_err(|e| e.to_string())?;
                            let b = p.cotangent_chern_euler(i).map_err(|e| e.to_string())?;
                            ensure(a == b, || format!("i={i}: {a} != {b}"))?;
                        }
                        Ok(())
                    },
                ));
                rep.push(Check::run(
                    name("twisted-cotangent"),
                    "c_i(Omega (x) O(1)) = sum_m (-1)^m h^m c_{i-m}(F^dual)",
                    || {
                        for i in 0..=n as i64 {
                            let a = p.cotangent_twist_chern(i).map_err(|e| e.to_string())?;
                            let b = p.cotangent_twist_chern_oracle(i).map_err(|e| e.to_string())?;
                            ensure(a == b, || format!("i={i}: {a} != {b}"))?;
                        }
                        Ok(())
                    },
                ));
            }
            rep
        })
        .collect();
    merge_all(parts)
}

fn load_case(case: &Case) -> Result<EmbeddingData, CliError> {
    match case {
        Case::Linear { n, m } => linear_blowup(*n, *m).map_err(|e| usage(e.to_string())),
        Case::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            EmbeddingData::from_text(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
        }
    }
}

fn random_blowup_class(b: &Blowup, rng: &mut ChaCha8Rng) -> BlowupClass {
    let amb = b.data().ambient();
    let center = b.data().center();
    let exc = b.exceptional_ring();
    let horizon = |r: &GradedRing| r.dim_bound().unwrap_or(3);
    let mut alpha = amb.zero();
    for m in amb.monomials_up_to(horizon(amb)) {
        alpha = &alpha + &amb.monomial(m, rat(rng.gen_range(-9..=9)));
    }
    let coeffs = (0..exc.rank())
        .map(|_| {
            center
                .monomials_up_to(horizon(center))
                .into_iter()
                .fold(center.zero(), |g, m| &g + &center.monomial(m, rat(rng.gen_range(-9..=9))))
        })
        .collect();
    let eps = exc.element(coeffs).expect("rank-many coefficients");
    let pushed = b.exc_push(&eps).expect("pushforward defined on every center monomial");
    b.add(&b.pull(&alpha), &pushed)
}

fn blowup_suite(cfg: &SuiteConfig) -> Result<Report, CliError> {
    let data = load_case(&cfg.case)?;
    let case = cfg.case.to_string();
    let name = |what: &str| format!("blowup/{case}/{what}");
    let mut rep = Report::new();

    rep.push(Check::run(
        name("embedding"),
        "i^* is a ring map; projection and self-intersection formulas hold",
        || embedding_validate(&data, 20, cfg.seed).map(|_| ()).map_err(|e| e.to_string()),
    ));
    let b = match Blowup::new(data.clone()) {
        Ok(b) => b,
        Err(e) => {
            rep.push(Check::run(name("construction"), "P(N) is a projective bundle", || Err(e.to_string())));
            return Ok(rep);
        }
    };
    let center_basis = |r: &GradedRing| r.monomials_up_to(r.dim_bound().unwrap_or(3));

    rep.push(Check::run(
        name("cw-top-unit"),
        "eta_*(c_{r-1}(W)) = 1",
        || {
            let pushed = b.exceptional_ring().pushforward(b.cw_top());
            ensure(pushed == b.data().center().one(), || format!("got {pushed}"))
        },
    ));
    rep.push(Check::run(
        name("key-formula"),
        "phi^* i_*(g) = j_*(c_{r-1}(W) eta^* g) on every basis class of CH(P)",
        || {
            let exc = b.exceptional_ring();
            for m in center_basis(b.data().center()) {
                let g = b.data().center().monomial(m, rat(1));
                let lhs = b.pull(&b.data().push(&g).map_err(|e| e.to_string())?);
                let rhs = b
                    .exc_push(&exc.mul(b.cw_top(), &exc.pullback(&g)))
                    .map_err(|e| e.to_string())?;
                ensure(lhs == rhs, || format!("g = {g}"))?;
            }
            Ok(())
        },
    ));
    rep.push(Check::run(
        name("push-pull-identity"),
        "phi_* phi^* = id on every basis class of CH(X)",
        || {
            let amb = b.data().ambient();
            for m in center_basis(amb) {
                let a = amb.monomial(m, rat(1));
                let back = b.push(&b.pull(&a)).map_err(|e| e.to_string())?;
                ensure(back == a, || format!("{a} -> {back}"))?;
            }
            Ok(())
        },
    ));
    let triples = match cfg.mode {
        Mode::Formal => 200,
        Mode::Numeric => cfg.trials.max(1),
    };
    rep.push(Check::run(
        name("associativity"),
        "(xy)z = x(yz) and xy = yx on seeded random classes",
        || {
            let mut rng = cfg.rng(Suite::Blowup, 0, 0);
            for t in 0..triples {
                let x = random_blowup_class(&b, &mut rng);
                let y = random_blowup_class(&b, &mut rng);
                let z = random_blowup_class(&b, &mut rng);
                let xy = b.mul(&x, &y).map_err(|e| e.to_string())?;
                let left = b.mul(&xy, &z).map_err(|e| e.to_string())?;
                let yz = b.mul(&y, &z).map_err(|e| e.to_string())?;
                let right = b.mul(&x, &yz).map_err(|e| e.to_string())?;
                ensure(left == right, || format!("triple {t}"))?;
                ensure(xy == b.mul(&y, &x).map_err(|e| e.to_string())?, || format!("pair {t}"))?;
            }
            Ok(())
        },
    ));
    if let Some(top) = b.data().ambient().dim_bound() {
        rep.push(Check::run(
            name("exceptional-detection"),
            "eta_* and j^* j_* together detect classes on E",
            || ensure(b.exceptional_detection_holds(top as i64), || "kernel is nonzero".into()),
        ));
    }
    Ok(rep)
}

fn charclass_suite(cfg: &SuiteConfig) -> Report {
    let horizon = cfg.dim_bound.unwrap_or(6);
    let parts = cfg
        .r_values(3)
        .into_par_iter()
        .map(|n| {
            let mut rep = Report::new();
            let name = |tag: &str, what: &str| format!("charclass/rank={n}/{tag}/{what}");
            let (s, f) = formal_bundle(8.max(n));
            rep.push(Check::run(
                name("formal", "chern-segre"),
                "c(F) s(F) = 1 through degree 8",
                || {
                    let seg = segre_classes(&s, &f, 8);
                    for d in 1..=8i64 {
                        let mut acc = s.zero();
                        for i in 0..=d {
                            acc = &acc + &(&f.c(&s, i) * &seg[(d - i) as usize]);
                        }
                        ensure(acc.is_zero(), || format!("degree {d}: {acc}"))?;
                    }
                    Ok(())
                },
            ));
            let pairs: Vec<(String, GradedRing, BundleClass<GradedElement>, BundleClass<GradedElement>)> =
                match cfg.mode {
                    Mode::Formal => {
                        let mut gens: Vec<(String, i64)> = (1..=n).map(|i| (format!("e{i}"), i as i64)).collect();
                        gens.extend((1..=2).map(|i| (format!("f{i}"), i as i64)));
                        let ring = GradedRing::new(gens, None).expect("distinct names");
                        let e = BundleClass::new(&ring, n, (0..n).map(|i| ring.gen_at(i)).collect())
                            .expect("graded generators");
                        let f = BundleClass::new(&ring, 2, vec![ring.gen_at(n), ring.gen_at(n + 1)])
                            .expect("graded generators");
                        vec![("formal".into(), ring, e, f)]
                    }
                    Mode::Numeric => (0..cfg.trials)
                        .map(|t| {
                            let mut rng = cfg.rng(Suite::CharClass, n, t);
                            let (ring, e) = numeric_bundle(n, None, &mut rng);
                            let chern = (1..=2).map(|i| random_homogeneous(&ring, i, &mut rng)).collect();
                            let f = BundleClass::new(&ring, 2, chern).expect("homogeneous by construction");
                            (format!("trial={t:03}"), ring, e, f)
                        })
                        .collect(),
                };
            for (tag, ring, e, f) in pairs {
                let sum = whitney_sum(&ring, &e, &f);
                rep.push(Check::run(
                    name(&tag, "whitney"),
                    "ch(E+F) = ch(E) + ch(F) and td(E+F) = td(E) td(F)",
                    || {
                        let ch = |b| chern_character(&ring, b, Some(horizon)).map_err(|e| e.to_string());
                        let td = |b| todd_class(&ring, b, Some(horizon)).map_err(|e| e.to_string());
                        let parts = CharClass::new(&ch(&e)?.value + &ch(&f)?.value, horizon);
                        ensure(ch(&sum)? == parts, || "ch is not additive".into())?;
                        let parts = CharClass::new(&td(&e)?.value * &td(&f)?.value, horizon);
                        ensure(td(&sum)? == parts, || "td is not multiplicative".into())
                    },
                ));
                rep.push(Check::run(
                    name(&tag, "sqrt-todd"),
                    "sqrt(td)^2 = td",
                    || {
                        let td = todd_class(&ring, &sum, Some(horizon)).map_err(|e| e.to_string())?;
                        let root = sqrt_one_series(&td, None).map_err(|e| e.to_string())?;
                        ensure(CharClass::new(&root.value * &root.value, horizon) == td, || {
                            "square differs".into()
                        })
                    },
                ));
            }
            rep
        })
        .collect();
    merge_all(parts)
}

fn flop_suite(cfg: &SuiteConfig) -> Report {
    let parts = cfg
        .r_values(4)
        .into_par_iter()
        .map(|r| {
            let mut rep = Report::new();
            match cfg.mode {
                Mode::Formal => rep.merge(prefixed("flop", formal_flop(r))),
                Mode::Numeric => {
                    for t in 0..cfg.trials {
                        let mut rng = cfg.rng(Suite::Flop, r, t);
                        rep.merge(prefixed(&format!("flop/trial={t:03}"), numeric_flop(r, cfg.dim_bound, &mut rng)));
                    }
                }
            }
            rep
        })
        .collect();
    merge_all(parts)
}

fn context_failure(r: usize, e: impl fmt::Display) -> Report {
    Report::from_iter([Check::run(format!("r={r}/context"), "the flop tower can be built", || {
        Err(e.to_string())
    })])
}

fn formal_flop(r: usize) -> Report {
    let ctx = match FlopContext::formal(r, SigmaGrading::Codim(r as i64)) {
        Ok(c) => c,
        Err(e) => return context_failure(r, e),
    };
    let mut rep = ctx.verify_foundations();
    let (a, b) = match (ctx.formal_sigma(Side::Alpha), ctx.formal_sigma(Side::Beta)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return context_failure(r, e),
    };
    match ctx.verify_multiplicativity(&a, &b) {
        Ok(m) => rep.merge(m),
        Err(e) => rep.merge(context_failure(r, e)),
    }
    rep
}

fn numeric_flop(r: usize, dim_bound: Option<u32>, rng: &mut ChaCha8Rng) -> Report {
    let ctx = match FlopContext::random_numeric(r, rng, dim_bound) {
        Ok(c) => c,
        Err(e) => return context_failure(r, e),
    };
    let mut rep = ctx.verify_foundations();
    let a = ctx.random_sigma(rng);
    let b = ctx.random_sigma(rng);
    match ctx.verify_multiplicativity(&a, &b) {
        Ok(m) => rep.merge(m),
        Err(e) => rep.merge(context_failure(r, e)),
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_values() {
        assert_eq!("flop".parse::<Suite>().unwrap(), Suite::Flop);
        assert!("flops".parse::<Suite>().is_err());
        assert_eq!("linear:4,1".parse::<Case>().unwrap(), Case::Linear { n: 4, m: 1 });
        assert!("linear:1,4".parse::<Case>().is_err());
        assert!("linear:4".parse::<Case>().is_err());
        assert_eq!("x.emb".parse::<Case>().unwrap(), Case::File("x.emb".into()));
    }

    #[test]
    fn settings_overlay() {
        let mut file = Settings::parse_file("# defaults\nsuite = flop\nr_max=3\nseed=9\n").unwrap();
        let mut flags = Settings::new();
        flags.set("seed", "11").unwrap();
        file.overlay(&flags);
        let cfg = file.into_config().unwrap();
        assert_eq!(cfg.suite, Suite::Flop);
        assert_eq!(cfg.r_max, Some(3));
        assert_eq!(cfg.seed, 11);
        assert!(Settings::parse_file("colour=red").is_err());
        assert!(Settings::parse_file("r").is_err());
    }

    #[test]
    fn validation() {
        let mut s = Settings::new();
        s.set("r", "0").unwrap();
        assert!(s.into_config().is_err());
        let mut s = Settings::new();
        s.set("mode", "numeric").unwrap();
        s.set("trials", "0").unwrap();
        assert!(s.into_config().is_err());
        let mut s = Settings::new();
        s.set("r", "two").unwrap();
        assert!(matches!(s.into_config(), Err(CliError::Usage(_))));
    }

    #[test]
    fn small_suites_pass() {
        let cfg = SuiteConfig {
            suite: Suite::Flop,
            r: Some(2),
            ..SuiteConfig::default()
        };
        let rep = run_suite(&cfg).unwrap();
        assert!(rep.passed(), "{rep}");
        assert_eq!(rep.seed, Some(0));
        assert!(rep.get("flop/r=2/formal/headline").is_some());
    }
}
