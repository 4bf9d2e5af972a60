//! Library values against independent reference computations written here
//! in plain `f64` or exact rationals.

use mixmean::hardy::{gamma, gamma_integers, hardy_mixed_sum, knopp_transform};
use mixmean::means::{
    esf, p_next_to_top, power_mean, prefix_means, symmetric_mean, Exponent, NormalizedWeights, PositiveVector,
    WeightSequence,
};
use mixmean::mixed::{mixed_mean, popoviciu_log_difference, rado_difference};
use mixmean::report::{CheckConfig, Verdict};
use mixmean::symmetric::{open_question_sides, tarnavas_check, ConvexFunctionSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

const PREC: u32 = 128;

fn close(got: f64, want: f64) -> bool {
    (got - want).abs() <= 1e-11 * want.abs().max(1e-300)
}

fn random_x(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| Rational::from((rng.random_range(1..=5000u32), rng.random_range(1..=300u32))))
        .collect()
}

fn floats(v: &[Rational]) -> Vec<f64> {
    v.iter().map(Rational::to_f64).collect()
}

fn f64_power_mean(q: &[f64], x: &[f64], r: f64) -> f64 {
    if r == 0.0 {
        q.iter().zip(x).map(|(q, x)| q * x.ln()).sum::<f64>().exp()
    } else {
        q.iter().zip(x).map(|(q, x)| q * x.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

fn f64_prefix_means(w: &[f64], x: &[f64], r: f64) -> Vec<f64> {
    (1..=x.len())
        .map(|i| {
            let big: f64 = w[..i].iter().sum();
            let q: Vec<f64> = w[..i].iter().map(|v| v / big).collect();
            f64_power_mean(&q, &x[..i], r)
        })
        .collect()
}

fn f64_mixed(w: &[f64], x: &[f64], outer: f64, inner: f64) -> f64 {
    let n = x.len();
    let big: f64 = w.iter().sum();
    let q: Vec<f64> = w.iter().map(|v| v / big).collect();
    f64_power_mean(&q, &f64_prefix_means(w, x, inner), outer)
        .min(f64::MAX)
        .max(if n == 0 { 0.0 } else { f64::MIN_POSITIVE })
}

fn subset_esf(x: &[Rational], r: usize) -> Rational {
    let mut total = Rational::new();
    for mask in 0u32..(1 << x.len()) {
        if mask.count_ones() as usize == r {
            let mut prod = Rational::from(1);
            for (k, v) in x.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    prod *= v;
                }
            }
            total += prod;
        }
    }
    total
}

fn binom(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, k| acc * (n - k) as f64 / (k + 1) as f64)
}

#[test]
fn power_means_match_direct_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let n = rng.random_range(1..=9);
        let x = random_x(&mut rng, n);
        let raw: Vec<u32> = (0..n).map(|_| rng.random_range(1..=20)).collect();
        let total: u32 = raw.iter().sum();
        let q: Vec<Rational> = raw.iter().map(|&v| Rational::from((v, total))).collect();
        for r in ["-3", "-1", "geo", "1/3", "1", "2", "5/2"] {
            let e: Exponent = r.parse().unwrap();
            let got = power_mean(&NormalizedWeights::new(q.clone()).unwrap(), &PositiveVector::new(x.clone()).unwrap(), &e, PREC)
                .unwrap();
            let want = f64_power_mean(&floats(&q), &floats(&x), e.as_rational().to_f64());
            assert!(close(got.to_f64(), want), "r={r}: {got} vs {want}");
            assert!(got.err_f64() < 1e-30 * want);
        }
    }
}

#[test]
fn prefix_and_mixed_means_match_direct_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let n = rng.random_range(1..=8);
        let x = random_x(&mut rng, n);
        let w: Vec<Rational> = (0..n).map(|_| Rational::from(rng.random_range(1..=9u32))).collect();
        let (xf, wf) = (floats(&x), floats(&w));
        let xv = PositiveVector::new(x).unwrap();
        let wv = WeightSequence::new(w).unwrap();
        for (outer, inner) in [("geo", "1"), ("1", "geo"), ("-1", "2"), ("3", "1/2")] {
            let (o, i): (Exponent, Exponent) = (outer.parse().unwrap(), inner.parse().unwrap());
            let got = mixed_mean(&wv, &xv, &o, &i, PREC).unwrap().to_f64();
            let want = f64_mixed(&wf, &xf, o.as_rational().to_f64(), i.as_rational().to_f64());
            assert!(close(got, want), "{outer}/{inner}: {got} vs {want}");
        }
        let prefixes = prefix_means(&wv, &xv, &Exponent::int(2), PREC).unwrap();
        for (g, want) in prefixes.as_slice().iter().zip(f64_prefix_means(&wf, &xf, 2.0)) {
            assert!(close(g.to_f64(), want));
        }
    }
}

#[test]
fn rado_and_popoviciu_differences_match_direct_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let n = rng.random_range(2..=8);
        let x = random_x(&mut rng, n);
        let xf = floats(&x);
        let xv = PositiveVector::new(x).unwrap();
        let wv = WeightSequence::unit(n);
        let wf = vec![1.0; n];
        let nf = n as f64;
        // W_n (M_s(A) - A_n(M_s))
        for s in [0.0, 0.5, 2.0] {
            let m = f64_prefix_means(&wf, &xf, s);
            let a: f64 = m.iter().sum::<f64>() / nf;
            let outer = f64_power_mean(&vec![1.0 / nf; n], &f64_prefix_means(&wf, &xf, 1.0), s);
            let want = nf * (outer - a);
            let exp = Exponent::new(Rational::from_f64(s).unwrap());
            let got = rado_difference(&wv, &xv, &exp, n, PREC).unwrap().to_f64();
            assert!((got - want).abs() <= 1e-9 * (nf * a), "s={s}: {got} vs {want}");
        }
        // W_n (ln G_n(A) - ln A_n(G))
        let g = f64_prefix_means(&wf, &xf, 0.0);
        let a = f64_prefix_means(&wf, &xf, 1.0);
        let want = nf * (f64_power_mean(&vec![1.0 / nf; n], &a, 0.0).ln() - (g.iter().sum::<f64>() / nf).ln());
        let got = popoviciu_log_difference(&wv, &xv, n, PREC).unwrap().to_f64();
        assert!((got - want).abs() <= 1e-9 * nf, "{got} vs {want}");
    }
}

#[test]
fn esf_matches_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..60 {
        let n = rng.random_range(1..=10);
        let x = random_x(&mut rng, n);
        let v = PositiveVector::new(x.clone()).unwrap();
        for r in 0..=n {
            assert_eq!(esf(&v, r).unwrap(), subset_esf(&x, r));
        }
        for r in 1..=n {
            let want = (subset_esf(&x, r).to_f64() / binom(n, r)).powf(1.0 / r as f64);
            assert!(close(symmetric_mean(&v, r, PREC).unwrap().to_f64(), want));
        }
    }
}

#[test]
fn next_to_top_mean_matches_geometric_harmonic_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.random_range(2..=9);
        let x = random_x(&mut rng, n);
        let xf = floats(&x);
        let nf = n as f64;
        let g = f64_power_mean(&vec![1.0 / nf; n], &xf, 0.0);
        let h = f64_power_mean(&vec![1.0 / nf; n], &xf, -1.0);
        let want = g.powf(nf / (nf - 1.0)) / h.powf(1.0 / (nf - 1.0));
        let got = p_next_to_top(&PositiveVector::new(x).unwrap(), PREC).unwrap().to_f64();
        assert!(close(got, want), "{got} vs {want}");
    }
}

#[test]
fn hardy_sum_and_transform_match_direct_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..40 {
        let n = rng.random_range(1..=12);
        let x = random_x(&mut rng, n);
        let xf = floats(&x);
        let mut want = xf[0];
        for i in 2..=n {
            let e_top = subset_esf(&x[..i], i - 1).to_f64();
            want += (e_top / i as f64).powf(1.0 / (i - 1) as f64);
        }
        let got = hardy_mixed_sum(&PositiveVector::new(x.clone()).unwrap(), PREC).unwrap().to_f64();
        assert!(close(got, want), "{got} vs {want}");

        let a = knopp_transform(&PositiveVector::new(x.clone()).unwrap());
        for (i, ai) in a.as_slice().iter().enumerate() {
            let i1 = i as u64 + 1;
            let mut s = Rational::new();
            for (k, v) in x[..=i].iter().enumerate() {
                s += Rational::from(v * (k as u64 + 1));
            }
            assert_eq!(*ai, s / (i1 * (i1 + 1)));
        }
    }
}

#[test]
fn gamma_matches_integers_and_log_gamma() {
    for i in [2u32, 3, 4, 10, 57, 400] {
        let (lhs, rhs) = gamma_integers(i);
        let fact = (1..i).fold(Integer::from(1), |acc, j| acc * j);
        let power = |b: u32| (1..i).fold(Integer::from(1), |acc, _| acc * b);
        assert_eq!(lhs, power(3) * &fact);
        assert_eq!(rhs, power(i + 1));
        let k = f64::from(i - 1);
        let ln_fact: f64 = (1..i).map(|j| f64::from(j).ln()).sum();
        let want = ((ln_fact - k * f64::from(i + 1).ln()) / k).exp();
        assert!(close(gamma(i, PREC).unwrap().to_f64(), want));
    }
}

#[test]
fn open_question_sides_match_direct_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..60 {
        let n = rng.random_range(1..=8);
        let x = random_x(&mut rng, n);
        let xf = floats(&x);
        let nf = n as f64;
        let averages = f64_prefix_means(&vec![1.0; n], &xf, 1.0);
        let mut tops = vec![xf[0]];
        for i in 2..=n {
            tops.push((subset_esf(&x[..i], i - 1).to_f64() / i as f64).powf(1.0 / (i - 1) as f64));
        }
        let lhs = tops.iter().sum::<f64>() / nf;
        let rhs = if n == 1 {
            averages[0]
        } else {
            let e: Vec<Rational> = averages.iter().map(|v| Rational::from_f64(*v).unwrap()).collect();
            (subset_esf(&e, n - 1).to_f64() / nf).powf(1.0 / (nf - 1.0))
        };
        let (l, r) = open_question_sides(&PositiveVector::new(x).unwrap(), n, PREC).unwrap();
        assert!(close(l.to_f64(), lhs), "{l} vs {lhs}");
        assert!((r.to_f64() - rhs).abs() <= 1e-9 * rhs, "{r} vs {rhs}");
    }
}

#[test]
fn tarnavas_square_matches_direct_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = CheckConfig::default();
    for _ in 0..60 {
        let n = rng.random_range(2..=8);
        let x = random_x(&mut rng, n);
        let xf = floats(&x);
        let nf = n as f64;
        let a = f64_prefix_means(&vec![1.0; n], &xf, 1.0);
        let lhs: f64 = a[..n - 1].iter().map(|v| ((nf - 1.0) * v).powi(2)).sum::<f64>() / (nf - 1.0);
        let rhs: f64 = a.iter().zip(&xf).map(|(v, xk)| (nf * v - xk).powi(2)).sum::<f64>() / nf;
        let rep = tarnavas_check(&WeightSequence::unit(n), &PositiveVector::new(x).unwrap(), &ConvexFunctionSpec::square(), n, &cfg)
            .unwrap();
        assert!(close(rep.lhs.to_f64(), lhs) && close(rep.rhs.to_f64(), rhs));
        assert_ne!(rep.verdict, Verdict::Violated);
    }
}
