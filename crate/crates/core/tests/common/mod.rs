#![allow(dead_code)]

use chowflop_core::algebra::rat;
use chowflop_core::chern::{power_sums, todd_series, BundleClass};
use chowflop_core::{GradedElement, GradedRing};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Todd class through `log td = Σ_k a_k p_k`, where
/// `Σ a_k t^k = log(t / (1 - e^{-t}))`, followed by `exp`.
pub fn todd_by_logarithm(ring: &GradedRing, f: &BundleClass<GradedElement>, n: u32) -> GradedElement {
    let series = todd_series(n);
    // (log u)' = u'/u for u with constant term 1
    let mut log = vec![rat(0); n as usize + 1];
    for k in 1..=n as usize {
        let mut acc = series[k].clone() * rat(k as i64);
        for i in 1..k {
            acc -= &log[i] * rat(i as i64) * &series[k - i];
        }
        log[k] = acc / rat(k as i64);
    }
    let p = power_sums(ring, f, n);
    let mut exponent = ring.zero();
    for k in 1..=n as usize {
        exponent = &exponent + &p[k].scale(&log[k]);
    }
    exp_truncated(ring, &exponent.truncate_above(n), n)
}

/// `exp(x)` for `x` without constant term, truncated above degree `n`.
pub fn exp_truncated(ring: &GradedRing, x: &GradedElement, n: u32) -> GradedElement {
    let mut acc = ring.one();
    let mut term = ring.one();
    for m in 1..=n {
        term = (&term * x).truncate_above(n).scale(&(rat(1) / rat(m as i64)));
        acc = &acc + &term;
    }
    acc.truncate_above(n)
}

pub fn random_homogeneous(ring: &GradedRing, d: i64, rng: &mut ChaCha8Rng) -> GradedElement {
    chowflop_core::flop::random_homogeneous(ring, d, rng)
}

/// A bundle of rank `n` with random homogeneous Chern classes.
pub fn random_bundle(ring: &GradedRing, n: usize, rng: &mut ChaCha8Rng) -> BundleClass<GradedElement> {
    let chern = (1..=n as i64).map(|i| random_homogeneous(ring, i, rng)).collect();
    BundleClass::new(ring, n, chern).unwrap()
}

pub fn small_coeff(rng: &mut ChaCha8Rng) -> i64 {
    rng.gen_range(-9..=9)
}
