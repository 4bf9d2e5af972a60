//! Invariants checked on random instances.

use mixmean::hardy::{gamma, hardy_constant_check, knopp_transform};
use mixmean::means::{
    esf, p_next_to_top, power_mean, symmetric_mean, Exponent, NormalizedWeights, PositiveVector, WeightSequence,
};
use mixmean::mixed::{
    holland_condition, nanjundiah_check, nanjundiah_condition, nanjundiah_condition_prefixwise, popoviciu_log_difference, rado_differences,
    reformulation_identity_check,
};
use mixmean::report::{CheckConfig, InequalityReport, Verdict};
use mixmean::search::{evaluate, search_counterexample, InequalityId, InstanceGenerator, SuiteParams};
use mixmean::symmetric::{marcus_lopes_check, open_question_check, symmetric_rado_differences};
use mixmean::Scalar;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;

const PREC: u32 = 128;

fn entry() -> impl Strategy<Value = Rational> {
    (1u64..=1_000_000, 1u64..=1_000).prop_map(|(p, q)| Rational::from((p, q)))
}

fn vector(min: usize, max: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(entry(), min..=max)
}

fn normalized(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(1u32..=50, n).prop_map(|raw| {
        let total: u32 = raw.iter().sum();
        raw.iter().map(|&v| Rational::from((v, total))).collect()
    })
}

fn x_and_q() -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
    (1usize..=10).prop_flat_map(|n| (prop::collection::vec(entry(), n), normalized(n)))
}

fn pv(v: &[Rational]) -> PositiveVector {
    PositiveVector::new(v.to_vec()).unwrap()
}

fn scaled(v: &[Rational], lambda: &Rational) -> Vec<Rational> {
    v.iter().map(|x| Rational::from(x * lambda)).collect()
}

fn is_constant(v: &[Rational]) -> bool {
    v.iter().all(|x| x == &v[0])
}

/// `|a - b|` is within the combined error bounds (plus one part in 2^100
/// of slack for the comparison itself).
fn agree(a: &Scalar, b: &Scalar) -> bool {
    let diff = (a - b).to_f64().abs();
    diff <= a.err_f64() + b.err_f64() + a.to_f64().abs() * 1e-30
}

fn certainly_le(a: &Scalar, b: &Scalar) -> bool {
    a.upper() <= b.lower()
}

fn lambdas() -> [Rational; 3] {
    [Rational::from((1, 3)), Rational::from(2), Rational::from(10)]
}

fn cfg() -> CheckConfig {
    CheckConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_mean_increases_with_exponent((x, q) in x_and_q()) {
        let q = NormalizedWeights::new(q).unwrap();
        let xv = pv(&x);
        let exps: Vec<Exponent> = ["-2", "-1", "geo", "1/2", "1", "2", "3"].iter().map(|e| e.parse().unwrap()).collect();
        let means: Vec<Scalar> = exps.iter().map(|e| power_mean(&q, &xv, e, PREC).unwrap()).collect();
        for pair in means.windows(2) {
            if is_constant(&x) {
                prop_assert!(agree(&pair[0], &pair[1]));
            } else {
                prop_assert!(certainly_le(&pair[0], &pair[1]), "{} vs {}", pair[0], pair[1]);
            }
        }
    }

    #[test]
    fn means_are_homogeneous((x, q) in x_and_q(), r in prop::sample::select(vec!["-1", "geo", "1/3", "2"])) {
        let q = NormalizedWeights::new(q).unwrap();
        let e: Exponent = r.parse().unwrap();
        let base = power_mean(&q, &pv(&x), &e, PREC).unwrap();
        let sym = symmetric_mean(&pv(&x), x.len().min(3), PREC).unwrap();
        for l in lambdas() {
            let xs = pv(&scaled(&x, &l));
            prop_assert!(agree(&power_mean(&q, &xs, &e, PREC).unwrap(), &base.mul_rational(&l)));
            prop_assert!(agree(&symmetric_mean(&xs, x.len().min(3), PREC).unwrap(), &sym.mul_rational(&l)));
        }
    }

    #[test]
    fn permutations_leave_symmetric_quantities_alone((x, q) in x_and_q(), seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..x.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..order.len()).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let xp: Vec<Rational> = order.iter().map(|&i| x[i].clone()).collect();
        let qp: Vec<Rational> = order.iter().map(|&i| q[i].clone()).collect();
        for r in 0..=x.len() {
            prop_assert_eq!(esf(&pv(&x), r).unwrap(), esf(&pv(&xp), r).unwrap());
            prop_assert!(agree(&symmetric_mean(&pv(&x), r, PREC).unwrap(), &symmetric_mean(&pv(&xp), r, PREC).unwrap()));
        }
        let e = Exponent::int(3);
        let a = power_mean(&NormalizedWeights::new(q).unwrap(), &pv(&x), &e, PREC).unwrap();
        let b = power_mean(&NormalizedWeights::new(qp).unwrap(), &pv(&xp), &e, PREC).unwrap();
        prop_assert!(agree(&a, &b));
    }

    #[test]
    fn symmetric_means_decrease_with_order(x in vector(1, 10)) {
        let v = pv(&x);
        let p: Vec<Scalar> = (1..=x.len()).map(|r| symmetric_mean(&v, r, PREC).unwrap()).collect();
        for pair in p.windows(2) {
            prop_assert!(is_constant(&x) && agree(&pair[0], &pair[1]) || certainly_le(&pair[1], &pair[0]));
        }
    }

    #[test]
    fn exact_values_lie_within_error((x, q) in x_and_q()) {
        let m = power_mean(&NormalizedWeights::new(q).unwrap(), &pv(&x), &Exponent::int(1), PREC).unwrap();
        let exact = m.exact().expect("arithmetic mean of rationals is exact");
        let value = Rational::from_f64(m.to_f64()).unwrap();
        let diff = Rational::from(exact - &value).abs().to_f64();
        // to_f64 adds its own rounding on top of err.
        prop_assert!(diff <= m.err_f64() + exact.to_f64().abs() * 2e-16);
    }

    #[test]
    fn mixed_checks_scale_with_x(x in vector(2, 8)) {
        let n = x.len();
        let w = WeightSequence::unit(n);
        let one = Exponent::int(1);
        let geo = Exponent::Geometric;
        let base = nanjundiah_check(&w, &pv(&x), &one, &geo, &cfg()).unwrap();
        let log_base = popoviciu_log_difference(&w, &pv(&x), n, PREC).unwrap();
        let oq = open_question_check(&pv(&x), n, &cfg()).unwrap().verdict;
        let hardy = hardy_constant_check(&pv(&x), &cfg()).unwrap().report.verdict;
        for l in lambdas() {
            let xs = pv(&scaled(&x, &l));
            let r = nanjundiah_check(&w, &xs, &one, &geo, &cfg()).unwrap();
            prop_assert_eq!(r.verdict, base.verdict);
            prop_assert!(agree(&r.margin, &base.margin.mul_rational(&l)));
            prop_assert!(agree(&popoviciu_log_difference(&w, &xs, n, PREC).unwrap(), &log_base));
            prop_assert_eq!(open_question_check(&xs, n, &cfg()).unwrap().verdict, oq);
            prop_assert_eq!(hardy_constant_check(&xs, &cfg()).unwrap().report.verdict, hardy);
        }
    }

    #[test]
    fn nonnegative_rado_chain_gives_the_endpoint(x in vector(2, 10)) {
        let w = WeightSequence::unit(x.len());
        let d = rado_differences(&w, &pv(&x), &Exponent::Geometric, PREC).unwrap();
        prop_assert!(d[0].is_exact());
        if d.iter().all(|v| v.is_certainly_nonnegative()) {
            let r = nanjundiah_check(&w, &pv(&x), &Exponent::int(1), &Exponent::Geometric, &cfg()).unwrap();
            prop_assert!(matches!(r.verdict, Verdict::Holds | Verdict::Equality));
        }
    }

    #[test]
    fn product_identities_hold(x in vector(2, 8), w in prop::collection::vec(1u32..=9, 8)) {
        let w = WeightSequence::new(w[..x.len()].iter().map(|&v| Rational::from(v)).collect()).unwrap();
        let r = reformulation_identity_check(&w, &pv(&x), &cfg()).unwrap();
        prop_assert!(r.both_equal());
    }

    #[test]
    fn marcus_lopes_equality_iff_proportional(x in vector(2, 8), y in vector(8, 8), l in entry(), r in 1usize..=8) {
        let n = x.len();
        let r = r.min(n);
        let proportional = marcus_lopes_check(&pv(&x), &pv(&scaled(&x, &l)), r, &cfg()).unwrap();
        prop_assert_eq!(proportional.verdict, Verdict::Equality);
        let y = pv(&y[..n]);
        let rep = marcus_lopes_check(&pv(&x), &y, r, &cfg()).unwrap();
        let ratio = Rational::from(&y.entries()[0] / &x[0]);
        let is_prop = y.entries().iter().zip(&x).all(|(a, b)| Rational::from(b * &ratio) == *a);
        if r == 1 || is_prop {
            prop_assert_eq!(rep.verdict, Verdict::Equality);
        } else {
            prop_assert_eq!(rep.verdict, Verdict::Holds);
            prop_assert!(rep.margin_beyond_error());
        }
    }

    #[test]
    fn symmetric_rado_sums_never_decrease(x in vector(1, 10)) {
        let d = symmetric_rado_differences(&pv(&x), PREC).unwrap();
        for pair in d.windows(2) {
            prop_assert!(pair[0].lower() <= pair[1].upper());
        }
    }

    #[test]
    fn transform_terms_dominate_scaled_means(x in vector(1, 12)) {
        let a = knopp_transform(&pv(&x));
        let mut three_a = Rational::new();
        let mut total = Scalar::from_rational(&Rational::from(&x[0]), PREC);
        for (i, ai) in a.as_slice().iter().enumerate() {
            three_a += Rational::from(ai * 3u32);
            let i1 = i as u32 + 1;
            if i1 < 2 {
                continue;
            }
            let p = p_next_to_top(&pv(&x[..=i]), PREC).unwrap();
            total = &total + &p;
            let bound = &gamma(i1, PREC).unwrap() * &p;
            prop_assert!(bound.lower() <= Scalar::from_rational(ai, PREC).upper(), "i={i1}");
        }
        prop_assert!(total.lower() <= Scalar::from_rational(&three_a, PREC).upper());
    }
}

#[test]
fn nanjundiah_at_one_index_does_not_imply_holland() {
    // Only w_n is constrained at n; Holland constrains every k < n.
    let w = WeightSequence::new([1, 1, 5, 1].iter().map(|&v| Rational::from(v)).collect()).unwrap();
    assert!(nanjundiah_condition(&w, 4).unwrap());
    assert!(!holland_condition(&w, 4).unwrap());
}

#[test]
fn nanjundiah_chain_implies_holland() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut nanjundiah = 0;
    for _ in 0..10_000 {
        let n = rng.random_range(2..=10);
        let w: Vec<Rational> = (0..n).map(|_| Rational::from(rng.random_range(1..=12u32))).collect();
        let w = WeightSequence::new(w).unwrap();
        if nanjundiah_condition_prefixwise(&w, n).unwrap() {
            nanjundiah += 1;
            assert!(holland_condition(&w, n).unwrap(), "{:?}", w.weights());
        }
    }
    assert!(nanjundiah > 100, "only {nanjundiah} sequences met the condition");
}

#[test]
fn constant_vectors_are_equalities() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.random_range(2..=10);
        let c = Rational::from((rng.random_range(1..=10_000u32), rng.random_range(1..=100u32)));
        let x = pv(&vec![c; n]);
        let w = WeightSequence::unit(n);
        let r = nanjundiah_check(&w, &x, &Exponent::int(1), &Exponent::Geometric, &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::Equality);
        let h = mixmean::mixed::holland_rado_check(&w, &x, n, &cfg()).unwrap();
        assert_eq!(h.verdict, Verdict::Equality);
    }
}

#[test]
fn confirmed_violations_survive_doubled_precision() {
    let gen = InstanceGenerator::new(2, 5, 12).unwrap();
    let rep = search_counterexample(InequalityId::GeneralMixed, &gen, &SuiteParams::default(), 300, &cfg()).unwrap();
    assert!(rep.violated > 0);
    let doubled = CheckConfig::with_precision(2 * PREC).unwrap();
    for inst in &rep.violations {
        let r: InequalityReport = evaluate(InequalityId::GeneralMixed, inst, &doubled).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.margin_beyond_error());
    }
}

#[test]
fn worst_instances_round_trip_through_json() {
    for id in [InequalityId::Nanjundiah, InequalityId::MarcusLopes, InequalityId::GeneralMixed, InequalityId::Tarnavas] {
        let gen = InstanceGenerator::new(id.min_n(), 6, 13).unwrap();
        let rep = search_counterexample(id, &gen, &SuiteParams::default(), 30, &cfg()).unwrap();
        let inst = rep.worst_instance.unwrap();
        let back = serde_json::from_str(&serde_json::to_string(&inst).unwrap()).unwrap();
        assert_eq!(inst, back);
        assert_eq!(evaluate(id, &back, &cfg()).unwrap().verdict, rep.worst_verdict.unwrap());
    }
}
