//! Hardy-type sums of next-to-top symmetric means, the Knopp averaging
//! transform and the coefficients `gamma_i` used to bound one by the other.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complete, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::means::{prefix_next_to_top, PositiveVector};
use crate::report::{decide, CheckConfig, InequalityReport, Instance, Relation, Sides};
use crate::scalar::Scalar;

/// `a_i = sum_{k<=i} k x_k / (i (i+1))`, exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnoppSequence(pub Vec<Rational>);

impl KnoppSequence {
    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().fold(Rational::new(), |acc, v| acc + v)
    }
}

pub fn knopp_transform(x: &PositiveVector) -> KnoppSequence {
    let mut weighted = Rational::new();
    KnoppSequence(
        x.entries()
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let i = idx as u64 + 1;
                weighted += Rational::from(v * i);
                Rational::from(&weighted / Integer::from(i * (i + 1)))
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnoppSums {
    pub sum_a: Rational,
    pub sum_x: Rational,
    /// `sum_k (1 - k/(n+1)) x_k`
    pub closed_form: Rational,
}

impl KnoppSums {
    pub fn identity_holds(&self) -> bool {
        self.sum_a == self.closed_form
    }

    pub fn bounded(&self) -> bool {
        self.sum_a <= self.sum_x
    }
}

pub fn knopp_sum_identity(x: &PositiveVector) -> KnoppSums {
    let n1 = x.len() as u64 + 1;
    let sum_a = knopp_transform(x).sum();
    let mut sum_x = Rational::new();
    let mut closed_form = Rational::new();
    for (idx, v) in x.entries().iter().enumerate() {
        sum_x += v;
        let coeff = Rational::from((n1 - idx as u64 - 1, n1));
        closed_form += Rational::from(v * &coeff);
    }
    KnoppSums {
        sum_a,
        sum_x,
        closed_form,
    }
}

/// `3^{i-1} (i-1)!` and `(i+1)^{i-1}`.
pub fn gamma_integers(i: u32) -> (Integer, Integer) {
    let (fact, rhs) = gamma_parts(i);
    (Integer::from(3).pow(i - 1) * fact, rhs)
}

/// `(i-1)!` and `(i+1)^{i-1}`.
fn gamma_parts(i: u32) -> (Integer, Integer) {
    (Integer::factorial(i - 1).complete(), Integer::from(i + 1).pow(i - 1))
}

// Numerator and denominator are converted separately: reducing the
// quotient costs a gcd of numbers with about i log2(i) bits.
fn gamma_from_parts(fact: &Integer, pow: &Integer, i: u32, prec: u32) -> Result<Scalar> {
    let num = Scalar::from_rational(&Rational::from(fact), prec);
    let den = Scalar::from_rational(&Rational::from(pow), prec);
    num.div(&den)?.root(i - 1)
}

/// `gamma_i = ((i-1)! / (i+1)^{i-1})^{1/(i-1)}`.
pub fn gamma(i: u32, prec: u32) -> Result<Scalar> {
    if i < 2 {
        return Err(Error::IndexOutOfRange {
            n: i as usize,
            min: 2,
            max: u32::MAX as usize,
        });
    }
    let (fact, pow) = gamma_parts(i);
    gamma_from_parts(&fact, &pow, i, prec)
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaRow {
    pub i: u32,
    /// Display only; the comparison below is the claim.
    pub gamma: Scalar,
    /// `3^{i-1}(i-1)!` compared with `(i+1)^{i-1}`.
    #[serde(serialize_with = "serialize_ordering")]
    pub comparison: Ordering,
    pub lhs_bits: u32,
    pub rhs_bits: u32,
}

fn serialize_ordering<S: serde::Serializer>(o: &Ordering, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(match o {
        Ordering::Less => "less",
        Ordering::Equal => "equal",
        Ordering::Greater => "greater",
    })
}

impl GammaRow {
    /// `gamma_i >= 1/3`.
    pub fn holds(&self) -> bool {
        self.comparison != Ordering::Less
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaTable {
    pub rows: Vec<GammaRow>,
}

impl GammaTable {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(GammaRow::holds)
    }

    pub fn equality_rows(&self) -> Vec<u32> {
        self.rows
            .iter()
            .filter(|r| r.comparison == Ordering::Equal)
            .map(|r| r.i)
            .collect()
    }

    pub fn failing_rows(&self) -> Vec<u32> {
        self.rows.iter().filter(|r| !r.holds()).map(|r| r.i).collect()
    }
}

/// Rows `i = 2..=m`, computed in parallel. The integers are dropped once
/// compared; [`gamma_integers`] recomputes them for any row.
pub fn gamma_table(m: u32, prec: u32) -> Result<GammaTable> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("gamma table needs m >= 2, got {m}")));
    }
    let rows = (2..=m)
        .into_par_iter()
        .map(|i| {
            let (fact, rhs) = gamma_parts(i);
            let gamma = gamma_from_parts(&fact, &rhs, i, prec)?;
            let lhs = Integer::from(3).pow(i - 1) * fact;
            Ok(GammaRow {
                i,
                gamma,
                comparison: lhs.cmp(&rhs),
                lhs_bits: lhs.significant_bits(),
                rhs_bits: rhs.significant_bits(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GammaTable { rows })
}

/// `S(x) = sum_i P_{i,i-1}(x_1, ..., x_i)`, with the first term `x_1`.
pub fn hardy_mixed_sum(x: &PositiveVector, prec: u32) -> Result<Scalar> {
    let terms = prefix_next_to_top(&x.scalars(prec), prec)?;
    Ok(Scalar::sum(&terms, prec))
}

/// `S(x) / sum x`, or `None` when every entry is zero.
pub fn hardy_ratio(x: &PositiveVector, prec: u32) -> Result<Option<Scalar>> {
    let total = x.entries().iter().fold(Rational::new(), |acc, v| acc + v);
    if total.is_zero() {
        return Ok(None);
    }
    Ok(Some(hardy_mixed_sum(x, prec)?.div_rational(&total)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct HardyReport {
    pub report: InequalityReport,
    pub ratio: Option<Scalar>,
}

/// `S(x) <= 3 sum x`.
pub fn hardy_constant_check(x: &PositiveVector, cfg: &CheckConfig) -> Result<HardyReport> {
    let total = x.entries().iter().fold(Rational::new(), |acc, v| acc + v);
    let bound = Rational::from(&total * 3u32);
    let report = decide(cfg, Relation::Le, Instance::from_x(x.entries()), |p| {
        Ok(Sides::new(hardy_mixed_sum(x, p)?, Scalar::from_rational(&bound, p)))
    })?;
    let ratio = if total.is_zero() {
        None
    } else {
        Some(report.lhs.div_rational(&total)?)
    };
    Ok(HardyReport { report, ratio })
}

/// `a_i >= gamma_i P_{i,i-1}(x_1, ..., x_i)` for `2 <= i <= n`.
pub fn knopp_term_check(x: &PositiveVector, i: usize, cfg: &CheckConfig) -> Result<InequalityReport> {
    if i < 2 || i > x.len() {
        return Err(Error::IndexOutOfRange {
            n: i,
            min: 2,
            max: x.len(),
        });
    }
    let a = knopp_transform(&x.prefix(i)?).0.pop().expect("i >= 2");
    let instance = Instance::from_x(x.entries()).with_n(i);
    decide(cfg, Relation::Ge, instance, |p| {
        let head = x.prefix(i)?.scalars(p);
        let p_top = prefix_next_to_top(&head, p)?.pop().expect("i >= 2");
        let rhs = &gamma(i as u32, p)? * &p_top;
        Ok(Sides::new(Scalar::from_rational(&a, p), rhs))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    fn ints(v: &[i64]) -> PositiveVector {
        PositiveVector::from_ints(v).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn knopp_examples() {
        assert_eq!(knopp_transform(&ints(&[1, 1, 1])).0, vec![q(1, 2); 3]);
        assert_eq!(knopp_transform(&ints(&[1])).0, vec![q(1, 2)]);
        assert_eq!(knopp_transform(&ints(&[1, 2])).0, vec![q(1, 2), q(5, 6)]);
        let s = knopp_sum_identity(&ints(&[1, 1, 1]));
        assert_eq!((s.sum_a.clone(), s.sum_x.clone()), (q(3, 2), q(3, 1)));
        assert!(s.identity_holds() && s.bounded());
        let zeros = PositiveVector::nonnegative(vec![Rational::new(); 4]).unwrap();
        let s = knopp_sum_identity(&zeros);
        assert!(s.sum_a.is_zero() && s.sum_x.is_zero() && s.identity_holds());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_integers(2), (Integer::from(3), Integer::from(3)));
        assert_eq!(gamma_integers(3), (Integer::from(18), Integer::from(16)));
        assert_eq!(gamma(2, 128).unwrap().exact().unwrap(), &q(1, 3));
        assert!((gamma(3, 128).unwrap().to_f64() - (0.125f64).sqrt()).abs() < 1e-15);
        let t = gamma_table(50, 128).unwrap();
        assert!(t.all_hold());
        assert_eq!(t.equality_rows(), vec![2]);
        assert!(t.rows.iter().all(|r| r.gamma.upper() >= Rational::from((1, 3)).to_f64()));
        assert!(gamma_table(1, 128).is_err());
    }

    #[test]
    fn hardy_sum_examples() {
        assert_eq!(hardy_mixed_sum(&ints(&[1, 1, 1, 1]), 128).unwrap().exact().unwrap(), &4);
        assert_eq!(hardy_mixed_sum(&ints(&[1, 2]), 128).unwrap().exact().unwrap(), &q(5, 2));
        let x = PositiveVector::nonnegative(vec![q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(hardy_mixed_sum(&x, 128).unwrap().exact().unwrap(), &q(3, 2));
    }

    #[test]
    fn hardy_constant_examples() {
        let cfg = CheckConfig::default();
        let r = hardy_constant_check(&ints(&[1, 1, 1]), &cfg).unwrap();
        assert_eq!(r.report.verdict, Verdict::Holds);
        assert_eq!(r.ratio.unwrap().exact().unwrap(), &1);
        // (3 + t) / (2 (1 + t)) at t = 1/1000
        let x = PositiveVector::new(vec![q(1, 1), q(1, 1000)]).unwrap();
        let r = hardy_constant_check(&x, &cfg).unwrap();
        assert_eq!(r.ratio.unwrap().exact().unwrap(), &q(3001, 2002));
        let harmonic = PositiveVector::new((1..=100).map(|k| q(1, k)).collect()).unwrap();
        let r = hardy_constant_check(&harmonic, &cfg).unwrap();
        assert_eq!(r.report.verdict, Verdict::Holds);
        let ratio = r.ratio.unwrap().to_f64();
        assert!(ratio > 1.5 && ratio < 3.0, "{ratio}");
    }

    #[test]
    fn knopp_term_examples() {
        let cfg = CheckConfig::default();
        let x = ints(&[3, 1, 4, 1, 5, 9, 2, 6]);
        for i in 2..=8 {
            assert!(knopp_term_check(&x, i, &cfg).unwrap().holds_or_equal());
        }
        assert!(knopp_term_check(&x, 1, &cfg).is_err());
    }
}
