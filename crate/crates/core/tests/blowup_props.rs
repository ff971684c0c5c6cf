use chowflop_core::algebra::{rat, Algebra};
use chowflop_core::blowup::{
    cw_top_by_quotient, cw_top_for, embedding_validate, linear_blowup, Blowup, BlowupClass, BlowupError,
    EmbeddingData,
};
use chowflop_core::chern::BundleClass;
use chowflop_core::GradedRing;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_class(b: &Blowup, rng: &mut ChaCha8Rng) -> BlowupClass {
    let amb = b.data().ambient();
    let center = b.data().center();
    let exc = b.exceptional_ring();
    let n = amb.dim_bound().unwrap();
    let mut alpha = amb.zero();
    for m in amb.monomials_up_to(n) {
        alpha = &alpha + &amb.monomial(m, rat(rng.gen_range(-9..=9)));
    }
    let coeffs = (0..exc.rank())
        .map(|_| {
            center
                .monomials_up_to(center.dim_bound().unwrap())
                .into_iter()
                .fold(center.zero(), |g, m| &g + &center.monomial(m, rat(rng.gen_range(-9..=9))))
        })
        .collect();
    let eps = exc.element(coeffs).unwrap();
    b.add(&b.pull(&alpha), &b.exc_push(&eps).unwrap())
}

fn linear_case() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=5).prop_flat_map(|n| (Just(n), 0..n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn blowup_ring_axioms((n, m) in linear_case(), seed in any::<u64>()) {
        let b = Blowup::new(linear_blowup(n, m).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (random_class(&b, &mut rng), random_class(&b, &mut rng), random_class(&b, &mut rng));
        let mul = |p: &BlowupClass, q: &BlowupClass| b.mul(p, q).unwrap();
        prop_assert_eq!(mul(&mul(&x, &y), &z), mul(&x, &mul(&y, &z)));
        prop_assert_eq!(mul(&x, &y), mul(&y, &x));
        prop_assert_eq!(mul(&x, &b.add(&y, &z)), b.add(&mul(&x, &y), &mul(&x, &z)));
        prop_assert_eq!(mul(&b.one(), &x), x.clone());
        // φ_* is a module map: φ_*(φ^*a · x) = a φ_*(x)
        let a = b.data().ambient().gen_at(0);
        prop_assert_eq!(b.push(&mul(&b.pull(&a), &x)).unwrap(), &a * &b.push(&x).unwrap());
    }

    #[test]
    fn linear_embeddings_validate((n, m) in linear_case(), seed in any::<u64>()) {
        let d = linear_blowup(n, m).unwrap();
        prop_assert_eq!(embedding_validate(&d, 10, seed).unwrap(), 10);
        let back = EmbeddingData::from_text(&d.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), d.to_text());
    }

    #[test]
    fn cw_top_pushes_to_one(r in 1usize..=6, seed in any::<u64>()) {
        // numeric normal bundle over Q[x, y]
        let s = GradedRing::new([("x", 1), ("y", 2)], None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chern = (1..=r as i64).map(|i| chowflop_core::flop::random_homogeneous(&s, i, &mut rng)).collect();
        let normal = BundleClass::new(&s, r, chern).unwrap();
        let (exc, cw) = cw_top_for(s.clone(), normal).unwrap();
        prop_assert_eq!(exc.pushforward(&cw), s.one());
        prop_assert_eq!(cw, cw_top_by_quotient(&exc));
    }
}

#[test]
fn key_formula_and_identity_on_all_linear_cases() {
    for n in 1..=5 {
        for m in 0..n {
            let b = Blowup::new(linear_blowup(n, m).unwrap()).unwrap();
            let exc = b.exceptional_ring();
            let center = b.data().center();
            for k in 0..=m as u32 {
                let g = center.gen_at(0).pow(k);
                let lhs = b.pull(&b.data().push(&g).unwrap());
                let rhs = b.exc_push(&exc.mul(b.cw_top(), &exc.pullback(&g))).unwrap();
                assert_eq!(lhs, rhs, "n={n}, m={m}, k={k}");
            }
            let t = b.data().ambient().gen_at(0);
            for k in 0..=n as u32 {
                assert_eq!(b.push(&b.pull(&t.pow(k))).unwrap(), t.pow(k));
            }
            assert!(b.exceptional_detection_holds(n as i64));
        }
    }
}

#[test]
fn point_blowups_have_expected_self_intersection() {
    // E^n = (-1)^(n-1) [pt] on Bl_pt P^n
    for n in 2..=5usize {
        let b = Blowup::new(linear_blowup(n, 0).unwrap()).unwrap();
        let e = b.exc_push(&b.exceptional_ring().one()).unwrap();
        let top = b.pow(&e, n as u32).unwrap();
        let sign = if n % 2 == 1 { 1 } else { -1 };
        let t = b.data().ambient().gen_at(0);
        assert_eq!(top.ambient, t.pow(n as u32).scale(&rat(sign)), "n={n}");
        assert!(b.push(&top).unwrap() == top.ambient);
    }
}

/// Ranks of `CH^k(Bl_{P^m} P^n)`: `1 + #{1 <= j <= r-1 : 0 <= k-j <= m}`.
fn expected_rank(n: usize, m: usize, k: usize) -> usize {
    let r = n - m;
    1 + (1..r).filter(|&j| k >= j && k - j <= m).count()
}

#[test]
fn monomials_in_h_and_e_span_each_degree() {
    for (n, m) in [(4, 1), (3, 1), (4, 2), (5, 2), (2, 0)] {
        let b = Blowup::new(linear_blowup(n, m).unwrap()).unwrap();
        let h = b.pull(&b.data().ambient().gen_at(0));
        let e = b.exc_push(&b.exceptional_ring().one()).unwrap();
        for k in 0..=n {
            let classes: Vec<_> = (0..=k)
                .map(|a| b.mul(&b.pow(&h, a as u32).unwrap(), &b.pow(&e, (k - a) as u32).unwrap()).unwrap())
                .collect();
            assert_eq!(b.span_dimension(&classes, k as i64), expected_rank(n, m, k), "n={n}, m={m}, k={k}");
        }
    }
    let ranks: Vec<_> = (0..=4).map(|k| expected_rank(4, 1, k)).collect();
    assert_eq!(ranks, [1, 2, 3, 2, 1]);
}

#[test]
fn corrupted_embeddings_are_rejected() {
    let d = linear_blowup(4, 1).unwrap();
    let t = d.ambient().gen_at(0);
    let one = d.center().monomial_from_exponents(vec![0]);
    let bad = d.clone().with_push(one, t.pow(2));
    match embedding_validate(&bad, 10, 3) {
        Err(BlowupError::Rejected { .. }) => {}
        other => panic!("expected rejection, got {other:?}"),
    }
    // P^2 in P^3: i_*(1)^2 = t^2 = i_*(c_1(N)) pins down c_1(N) = u
    let plane = linear_blowup(3, 2).unwrap();
    let text = plane.to_text().replace("normal: 1 * u", "normal: 2 * u");
    assert_ne!(text, plane.to_text());
    let skewed = EmbeddingData::from_text(&text).unwrap();
    match embedding_validate(&skewed, 10, 3) {
        Err(BlowupError::Rejected { check, .. }) => assert_eq!(check, "self-intersection formula"),
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn text_format_errors_have_line_numbers() {
    let err = EmbeddingData::from_text("ambient: t:1\ncenter u:1\n").unwrap_err();
    assert!(matches!(err, BlowupError::Syntax { line: 2, .. }), "{err:?}");
    let err = EmbeddingData::from_text("ambient: t:x\n").unwrap_err();
    assert!(matches!(err, BlowupError::Syntax { line: 1, .. }), "{err:?}");
}
