//! Inequalities between symmetric means `P_{n,r}` of prefixes.
//!
//! Everything here is unweighted. `A` denotes the vector of prefix
//! arithmetic means `(A_1, ..., A_n)`, and `P_{1,2} = P_{1,0} = x_1` by
//! convention.

use std::fmt;
use std::str::FromStr;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::means::{esf_table, prefix_next_to_top, symmetric_mean_scalar, PositiveVector, WeightSequence};
use crate::mixed::nanjundiah_condition;
use crate::report::{decide, CheckConfig, InequalityReport, Instance, Relation, Sides};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvexKind {
    Square,
    /// `|t|^p` with `p >= 1`.
    Power(Rational),
    Exp,
    /// `-ln t`, defined for `t > 0`.
    NegLog,
}

/// A convex function, or the negation of one when `concave` is set. The
/// flag flips the orientation of the inequality it is used in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexFunctionSpec {
    kind: ConvexKind,
    concave: bool,
}

impl ConvexFunctionSpec {
    pub fn new(kind: ConvexKind) -> Result<Self> {
        if let ConvexKind::Power(p) = &kind {
            if *p < 1 {
                return Err(Error::InvalidArgument(format!("power {p} is not convex (need p >= 1)")));
            }
        }
        Ok(ConvexFunctionSpec { kind, concave: false })
    }

    pub fn square() -> Self {
        ConvexFunctionSpec {
            kind: ConvexKind::Square,
            concave: false,
        }
    }

    pub fn exp() -> Self {
        ConvexFunctionSpec {
            kind: ConvexKind::Exp,
            concave: false,
        }
    }

    pub fn neg_log() -> Self {
        ConvexFunctionSpec {
            kind: ConvexKind::NegLog,
            concave: false,
        }
    }

    /// `-f`, a concave function.
    pub fn negated(mut self) -> Self {
        self.concave = !self.concave;
        self
    }

    pub fn kind(&self) -> &ConvexKind {
        &self.kind
    }

    pub fn is_concave(&self) -> bool {
        self.concave
    }

    pub fn eval(&self, t: &Scalar) -> Result<Scalar> {
        let v = match &self.kind {
            ConvexKind::Square => t * t,
            ConvexKind::Power(p) => {
                let abs = if t.value().is_sign_negative() { -t } else { t.clone() };
                abs.pow_rational(p)?
            }
            ConvexKind::Exp => t.exp(),
            ConvexKind::NegLog => {
                if !t.is_certainly_positive() {
                    return Err(Error::InvalidEntry {
                        index: 0,
                        value: t.to_string(),
                        reason: "-ln needs a positive argument",
                    });
                }
                -&t.ln()?
            }
        };
        Ok(if self.concave { -&v } else { v })
    }
}

impl fmt::Display for ConvexFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.concave {
            write!(f, "-")?;
        }
        match &self.kind {
            ConvexKind::Square => write!(f, "square"),
            ConvexKind::Power(p) => write!(f, "pow:{p}"),
            ConvexKind::Exp => write!(f, "exp"),
            ConvexKind::NegLog => write!(f, "neglog"),
        }
    }
}

impl FromStr for ConvexFunctionSpec {
    type Err = Error;

    /// `square`, `exp`, `neglog`, `pow:<p>`, each optionally prefixed by `-`.
    fn from_str(s: &str) -> Result<Self> {
        let (negated, body) = match s.trim().strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.trim()),
        };
        let spec = match body.to_ascii_lowercase().as_str() {
            "square" => Self::square(),
            "exp" => Self::exp(),
            "neglog" | "neg-log" => Self::neg_log(),
            other => match other.strip_prefix("pow:") {
                Some(p) => Self::new(ConvexKind::Power(crate::means::parse_rational(p)?))?,
                None => return Err(Error::Parse(format!("unknown function '{s}'"))),
            },
        };
        Ok(if negated { spec.negated() } else { spec })
    }
}

impl Serialize for ConvexFunctionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ConvexFunctionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_index(n: usize, min: usize, max: usize) -> Result<()> {
    if n < min || n > max {
        return Err(Error::IndexOutOfRange { n, min, max });
    }
    Ok(())
}

/// Prefix arithmetic means `A_1, ..., A_n`, exact.
pub(crate) fn prefix_averages(x: &[Rational]) -> Vec<Rational> {
    let mut sum = Rational::new();
    x.iter()
        .enumerate()
        .map(|(i, v)| {
            sum += v;
            Rational::from(&sum / (i as u64 + 1))
        })
        .collect()
}

fn exact_scalars(v: &[Rational], prec: u32) -> Vec<Scalar> {
    v.iter().map(|q| Scalar::from_rational(q, prec)).collect()
}

/// `P_{1,2}, ..., P_{n,2}` over the prefixes of `x`, with `P_{1,2} = x_1`.
fn prefix_p2(x: &[Rational], prec: u32) -> Result<Vec<Scalar>> {
    let mut e1 = Rational::new();
    let mut e2 = Rational::new();
    let mut out = Vec::with_capacity(x.len());
    for (idx, v) in x.iter().enumerate() {
        e2 += Rational::from(v * &e1);
        e1 += v;
        let i = idx as u64 + 1;
        if i == 1 {
            out.push(Scalar::from_rational(v, prec));
        } else {
            let c = Rational::from(i * (i - 1) / 2);
            out.push(Scalar::from_rational(&Rational::from(&e2 / &c), prec).sqrt()?);
        }
    }
    Ok(out)
}

/// `P_{n,r}(x) + P_{n,r}(y) <= P_{n,r}(x + y)`.
pub fn marcus_lopes_check(x: &PositiveVector, y: &PositiveVector, r: usize, cfg: &CheckConfig) -> Result<InequalityReport> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    if r == 0 || r > n {
        return Err(Error::OrderOutOfRange { r: r as i64, n });
    }
    let sum: Vec<Rational> = x
        .entries()
        .iter()
        .zip(y.entries())
        .map(|(a, b)| Rational::from(a + b))
        .collect();
    let instance = Instance::from_x(x.entries())
        .with_y(y.entries())
        .with_param("r", r);
    decide(cfg, Relation::Le, instance, |p| {
        let px = symmetric_mean_scalar(&x.scalars(p), r, p)?;
        let py = symmetric_mean_scalar(&y.scalars(p), r, p)?;
        let pxy = symmetric_mean_scalar(&exact_scalars(&sum, p), r, p)?;
        Ok(Sides::new(&px + &py, pxy))
    })
}

fn tarnavas_sides(w: &WeightSequence, x: &[Scalar], f: &ConvexFunctionSpec, n: usize, prec: u32) -> Result<Sides> {
    let big_w_n = w.big_w(n);
    let big_w_prev = w.big_w(n - 1);
    let wn = w.w(n);
    // W_k A_k, built up as running sums.
    let mut running = Scalar::zero(prec);
    let mut lhs_parts = Vec::with_capacity(n);
    let mut rhs_parts = Vec::with_capacity(n);
    for k in 1..=n {
        let xk = &x[k - 1];
        let wk = w.w(k);
        running = &running + &xk.mul_rational(wk);
        let a_k = running.div_rational(&w.big_w(k))?;
        if k < n {
            let arg = a_k.mul_rational(&big_w_prev);
            lhs_parts.push(f.eval(&arg)?.mul_rational(wk));
        }
        let arg = &a_k.mul_rational(&big_w_n) - &xk.mul_rational(wn);
        rhs_parts.push(f.eval(&arg)?.mul_rational(wk));
    }
    let lhs = Scalar::sum(&lhs_parts, prec).div_rational(&big_w_prev)?;
    let rhs = Scalar::sum(&rhs_parts, prec).div_rational(&big_w_n)?;
    Ok(Sides::new(lhs, rhs))
}

/// `(1/W_{n-1}) sum_{k<n} w_k f(W_{n-1} A_k) >= (1/W_n) sum_{k<=n} w_k f(W_n A_k - w_n x_k)`
/// for convex `f` under the Nanjundiah condition; reversed for concave `f`.
pub fn tarnavas_check(
    w: &WeightSequence,
    x: &PositiveVector,
    f: &ConvexFunctionSpec,
    n: usize,
    cfg: &CheckConfig,
) -> Result<InequalityReport> {
    if w.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), got: x.len() });
    }
    check_index(n, 2, x.len())?;
    if !nanjundiah_condition(w, n)? {
        return Err(Error::Precondition("weights fail the Nanjundiah condition".into()));
    }
    let relation = if f.is_concave() { Relation::Le } else { Relation::Ge };
    let instance = Instance::from_x(x.entries())
        .with_w(w.weights())
        .with_n(n)
        .with_param("f", f);
    decide(cfg, relation, instance, |p| tarnavas_sides(w, &x.scalars(p), f, n, p))
}

/// `P_{n-1,2}((n-1) A_{n-1}) <= P_{n,2}(n A_n - x_n)`.
pub fn lemma83_check(x: &PositiveVector, n: usize, cfg: &CheckConfig) -> Result<InequalityReport> {
    check_index(n, 2, x.len())?;
    let a = prefix_averages(&x.entries()[..n]);
    let nn = n as u64;
    let left: Vec<Rational> = a[..n - 1].iter().map(|v| Rational::from(v * (nn - 1))).collect();
    let right: Vec<Rational> = a
        .iter()
        .zip(x.entries())
        .map(|(v, xk)| Rational::from(v * nn) - xk)
        .collect();
    let instance = Instance::from_x(x.entries()).with_n(n);
    decide(cfg, Relation::Le, instance, |p| {
        let lhs = symmetric_mean_scalar(&exact_scalars(&left, p), 2, p)?;
        let rhs = symmetric_mean_scalar(&exact_scalars(&right, p), 2, p)?;
        Ok(Sides::new(lhs, rhs))
    })
}

/// `(P_{m,2}(A_m), P_{m,1}(P_{m,2}))` for `m = 1..n`.
fn symmetric_rado_terms(x: &[Rational], prec: u32) -> Result<Vec<(Scalar, Scalar)>> {
    let a = exact_scalars(&prefix_averages(x), prec);
    let p2 = prefix_p2(x, prec)?;
    (1..=x.len())
        .map(|m| {
            let outer2 = symmetric_mean_scalar(&a[..m], 2, prec)?;
            let outer1 = Scalar::sum(&p2[..m], prec).div_rational(&Rational::from(m as u64))?;
            Ok((outer2, outer1))
        })
        .collect()
}

/// `m (P_{m,2}(A_m) - P_{m,1}(P_{m,2}))` for every `m = 1..dim(x)`.
pub fn symmetric_rado_differences(x: &PositiveVector, prec: u32) -> Result<Vec<Scalar>> {
    Ok(symmetric_rado_terms(x.entries(), prec)?
        .iter()
        .enumerate()
        .map(|(i, (a, b))| (a - b).mul_rational(&Rational::from(i as u64 + 1)))
        .collect())
}

/// The difference at `n - 1` is at most the one at `n`.
pub fn symmetric_rado_check(x: &PositiveVector, n: usize, cfg: &CheckConfig) -> Result<InequalityReport> {
    check_index(n, 2, x.len())?;
    let instance = Instance::from_x(x.entries()).with_n(n);
    decide(cfg, Relation::Le, instance, |p| {
        let terms = symmetric_rado_terms(&x.entries()[..n], p)?;
        let (a0, b0) = &terms[n - 2];
        let (a1, b1) = &terms[n - 1];
        let lo = (a0 - b0).mul_rational(&Rational::from(n as u64 - 1));
        let hi = (a1 - b1).mul_rational(&Rational::from(n as u64));
        let scale = a1.mul_rational(&Rational::from(n as u64));
        Ok(Sides::new(lo, hi).with_scale(&scale))
    })
}

/// `P_{n,1}(P_{n,2}) <= P_{n,2}(A_n)`.
pub fn symmetric_endpoint_check(x: &PositiveVector, n: usize, cfg: &CheckConfig) -> Result<InequalityReport> {
    check_index(n, 1, x.len())?;
    let instance = Instance::from_x(x.entries()).with_n(n);
    decide(cfg, Relation::Le, instance, |p| {
        let terms = symmetric_rado_terms(&x.entries()[..n], p)?;
        let (outer2, outer1) = terms[n - 1].clone();
        Ok(Sides::new(outer1, outer2))
    })
}

/// Both sides of `P_{n,1}(P_{i,i-1}) <= P_{n,n-1}(A_n)`.
pub fn open_question_sides(x: &PositiveVector, n: usize, prec: u32) -> Result<(Scalar, Scalar)> {
    check_index(n, 1, x.len())?;
    let head = &x.entries()[..n];
    let xs = exact_scalars(head, prec);
    let next_to_top = prefix_next_to_top(&xs, prec)?;
    let lhs = Scalar::sum(&next_to_top, prec).div_rational(&Rational::from(n as u64))?;
    let a = exact_scalars(&prefix_averages(head), prec);
    let rhs = prefix_next_to_top(&a, prec)?.pop().expect("n >= 1");
    Ok((lhs, rhs))
}

/// The unresolved inequality `P_{n,1}(P_{1,0}, P_{2,1}, ..., P_{n,n-1}) <= P_{n,n-1}(A_n)`.
/// Reports only; nothing here assumes it holds.
pub fn open_question_check(x: &PositiveVector, n: usize, cfg: &CheckConfig) -> Result<InequalityReport> {
    check_index(n, 1, x.len())?;
    let instance = Instance::from_x(x.entries()).with_n(n);
    decide(cfg, Relation::Le, instance, |p| {
        let (lhs, rhs) = open_question_sides(x, n, p)?;
        Ok(Sides::new(lhs, rhs))
    })
}

/// `E_{n,r}` of the prefix of length `n`, for every `r`; handy for tests.
pub fn prefix_esf_row(x: &PositiveVector, n: usize) -> Result<Vec<Rational>> {
    check_index(n, 1, x.len())?;
    Ok(esf_table(&x.entries()[..n], n))
}
