//! Power means, elementary symmetric functions and symmetric means.
//!
//! Conventions for the small cases:
//!
//! * `P_{1,2} = x_1` and `P_{1,0} = x_1`, so that the prefix sequences
//!   `(P_{1,2}, ..., P_{n,2})` and `(P_{1,0}, P_{2,1}, ..., P_{n,n-1})` are
//!   defined from their first entry on.
//! * For `n >= 2`, `P_{n,0} = E_{n,0} = 1`. Note that this disagrees with the
//!   `n = 1` convention above; both are kept as stated rather than reconciled.
//! * `P_{n,n-1}` is always evaluated from `E_{n,n-1}`. For strictly positive
//!   input it coincides with `G_n^{n/(n-1)} / H_n^{1/(n-1)}`, but unlike that
//!   form it extends continuously to vectors with zero entries.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parses `3`, `-2/7`, `0.125` or `1e-3` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if s.contains('/') {
        let q = Rational::parse(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        return Ok(Rational::from(q));
    }
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("{s:?}: bad exponent")))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(Error::Parse(format!("{s:?}: no digits")));
    }
    let numer = Integer::from(
        Integer::parse(&digits).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?,
    );
    let scale = exp10 - frac_part.len() as i32;
    let ten = Integer::from(10);
    let q = if scale >= 0 {
        Rational::from(numer * ten.pow(scale as u32))
    } else {
        Rational::from((numer, ten.pow(scale.unsigned_abs())))
    };
    Ok(q)
}

/// Parses a comma-separated list of rationals.
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

/// Whether zero entries are admitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Strict,
    NonNegative,
}

/// The input vector `x`, held as exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveVector {
    entries: Vec<Rational>,
    mode: Mode,
}

impl PositiveVector {
    /// All entries strictly positive.
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        Self::with_mode(entries, Mode::Strict)
    }

    /// Entries may be zero.
    pub fn nonnegative(entries: Vec<Rational>) -> Result<Self> {
        Self::with_mode(entries, Mode::NonNegative)
    }

    pub fn with_mode(entries: Vec<Rational>, mode: Mode) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        for (i, q) in entries.iter().enumerate() {
            let bad = match mode {
                Mode::Strict => q.cmp0() != Ordering::Greater,
                Mode::NonNegative => q.cmp0() == Ordering::Less,
            };
            if bad {
                return Err(Error::InvalidEntry {
                    index: i,
                    value: q.to_string(),
                    reason: match mode {
                        Mode::Strict => "entries must be positive",
                        Mode::NonNegative => "entries must be non-negative",
                    },
                });
            }
        }
        Ok(PositiveVector { entries, mode })
    }

    pub fn from_ints(xs: &[i64]) -> Result<Self> {
        Self::new(xs.iter().map(|&v| Rational::from(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The prefix `x_i = (x_1, ..., x_i)`.
    pub fn prefix(&self, i: usize) -> Result<Self> {
        if i == 0 || i > self.len() {
            return Err(Error::IndexOutOfRange {
                n: i,
                min: 1,
                max: self.len(),
            });
        }
        Ok(PositiveVector {
            entries: self.entries[..i].to_vec(),
            mode: self.mode,
        })
    }

    pub fn scaled(&self, lambda: &Rational) -> Result<Self> {
        Self::with_mode(
            self.entries.iter().map(|q| Rational::from(q * lambda)).collect(),
            self.mode,
        )
    }

    pub fn is_constant(&self) -> bool {
        self.entries.windows(2).all(|p| p[0] == p[1])
    }

    pub fn scalars(&self, prec: u32) -> Vec<Scalar> {
        self.entries
            .iter()
            .map(|q| Scalar::from_rational(q, prec))
            .collect()
    }
}

/// Weights `w_1..w_n` with `w_i >= 0`, `w_1 > 0`, and their prefix sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSequence {
    weights: Vec<Rational>,
    prefix: Vec<Rational>,
}

impl WeightSequence {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        if weights[0].cmp0() != Ordering::Greater
            || weights.iter().any(|w| w.cmp0() == Ordering::Less)
        {
            return Err(Error::InvalidWeights);
        }
        let mut prefix = Vec::with_capacity(weights.len());
        let mut acc = Rational::new();
        for w in &weights {
            acc += w;
            prefix.push(acc.clone());
        }
        Ok(WeightSequence { weights, prefix })
    }

    pub fn unit(n: usize) -> Self {
        Self::new(vec![Rational::from(1); n.max(1)]).expect("unit weights are valid")
    }

    pub fn from_ints(ws: &[i64]) -> Result<Self> {
        Self::new(ws.iter().map(|&v| Rational::from(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// `w_k`, 1-based.
    pub fn w(&self, k: usize) -> &Rational {
        &self.weights[k - 1]
    }

    /// `W_k = w_1 + ... + w_k`, 1-based, with `W_0 = 0`.
    pub fn big_w(&self, k: usize) -> Rational {
        if k == 0 {
            Rational::new()
        } else {
            self.prefix[k - 1].clone()
        }
    }

    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::IndexOutOfRange {
                n,
                min: 1,
                max: self.len(),
            });
        }
        Self::new(self.weights[..n].to_vec())
    }

    /// `w_1/W_i, ..., w_i/W_i`; entries may be zero.
    pub fn normalized_prefix(&self, i: usize) -> Vec<Rational> {
        let total = &self.prefix[i - 1];
        self.weights[..i]
            .iter()
            .map(|w| Rational::from(w / total))
            .collect()
    }

    pub fn is_unit(&self) -> bool {
        self.weights.iter().all(|w| *w == 1)
    }
}

/// Weights `q_i > 0` with `sum q_i = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedWeights(Vec<Rational>);

impl NormalizedWeights {
    pub fn new(q: Vec<Rational>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::Empty);
        }
        let total: Rational = q.iter().sum();
        if q.iter().any(|v| v.cmp0() != Ordering::Greater) || total != 1 {
            return Err(Error::InvalidNormalizedWeights);
        }
        Ok(NormalizedWeights(q))
    }

    pub fn uniform(n: usize) -> Self {
        let n = n.max(1);
        NormalizedWeights(vec![Rational::from((1, n as u64)); n])
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A power-mean exponent. `Geometric` is the `r -> 0` limit and compares as 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exponent {
    Geometric,
    Rational(Rational),
}

impl Exponent {
    pub fn new(r: Rational) -> Self {
        if r.is_zero() {
            Exponent::Geometric
        } else {
            Exponent::Rational(r)
        }
    }

    pub fn int(r: i64) -> Self {
        Self::new(Rational::from(r))
    }

    pub fn as_rational(&self) -> Rational {
        match self {
            Exponent::Geometric => Rational::new(),
            Exponent::Rational(r) => r.clone(),
        }
    }

    pub fn is_geometric(&self) -> bool {
        matches!(self, Exponent::Geometric)
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.as_rational().cmp(&other.as_rational())
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "geo" | "geometric" | "g" => Ok(Exponent::Geometric),
            other => parse_rational(other).map(Exponent::new),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Geometric => f.write_str("geometric"),
            Exponent::Rational(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(M_{1,r}, ..., M_{n,r})`.
#[derive(Debug, Clone)]
pub struct PrefixMeanSequence(pub Vec<Scalar>);

impl PrefixMeanSequence {
    pub fn as_slice(&self) -> &[Scalar] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn is_exact_zero(s: &Scalar) -> bool {
    s.exact().is_some_and(|q| q.is_zero()) || (s.value().is_zero() && s.err().is_zero())
}

/// Largest denominator for which the geometric mean is taken as a root of a
/// product of integer powers, keeping rational results exact.
const GEOMETRIC_ROOT_MAX_DENOM: u32 = 64;

/// Weighted power mean of scalar entries. Zero weights drop their term.
pub(crate) fn weighted_power_mean(
    q: &[Rational],
    x: &[Scalar],
    r: &Exponent,
    prec: u32,
) -> Result<Scalar> {
    if q.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            got: x.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::Empty);
    }
    let terms: Vec<(&Rational, &Scalar)> = q.iter().zip(x).filter(|(w, _)| !w.is_zero()).collect();
    for (i, (_, v)) in terms.iter().enumerate() {
        if !v.is_certainly_nonnegative() {
            return Err(Error::InvalidEntry {
                index: i,
                value: v.to_string(),
                reason: "power means need non-negative entries",
            });
        }
    }
    let nonpositive_exponent = match r {
        Exponent::Geometric => true,
        Exponent::Rational(v) => v.cmp0() == Ordering::Less,
    };
    if nonpositive_exponent {
        if terms.iter().any(|(_, v)| is_exact_zero(v)) {
            // Continuous extension: G and negative-order means vanish.
            return Ok(Scalar::zero(prec));
        }
        if let Some((i, (_, v))) = terms
            .iter()
            .enumerate()
            .find(|(_, (_, v))| !v.is_certainly_positive())
        {
            return Err(Error::InvalidEntry {
                index: i,
                value: v.to_string(),
                reason: "geometric and negative-order means need positive entries",
            });
        }
    }
    match r {
        Exponent::Geometric => geometric_mean(&terms, prec),
        Exponent::Rational(rr) => {
            if *rr == 1 {
                let parts: Vec<Scalar> = terms.iter().map(|(w, v)| v.mul_rational(w)).collect();
                return Ok(Scalar::sum(&parts, prec));
            }
            if let Some(k) = rr.numer().to_i64().filter(|_| rr.denom() == &1) {
                let k_abs = k.unsigned_abs();
                let mut parts = Vec::with_capacity(terms.len());
                for (w, v) in &terms {
                    parts.push(v.powi(k)?.mul_rational(w));
                }
                let s = Scalar::sum(&parts, prec);
                let root = s.root(u32::try_from(k_abs).map_err(|_| {
                    Error::InvalidArgument(format!("exponent {rr} too large"))
                })?)?;
                return if k > 0 { Ok(root) } else { root.recip() };
            }
            let mut parts = Vec::with_capacity(terms.len());
            for (w, v) in &terms {
                parts.push(v.pow_rational(rr)?.mul_rational(w));
            }
            let s = Scalar::sum(&parts, prec);
            let inv = Rational::from(rr.recip_ref());
            s.pow_rational(&inv)
        }
    }
}

fn geometric_mean(terms: &[(&Rational, &Scalar)], prec: u32) -> Result<Scalar> {
    let denom = terms
        .iter()
        .fold(Integer::from(1), |acc, (w, _)| acc.lcm(w.denom()));
    let all_exact = terms.iter().all(|(_, v)| v.is_exact());
    if all_exact {
        if let Some(d) = denom.to_u32().filter(|&d| d <= GEOMETRIC_ROOT_MAX_DENOM) {
            let mut prod = Scalar::one(prec);
            for (w, v) in terms {
                let k = Integer::from(w.numer() * d) / w.denom();
                let k = k.to_i64().expect("bounded by the denominator");
                prod = &prod * &v.powi(k)?;
            }
            return prod.root(d);
        }
    }
    let mut logs = Vec::with_capacity(terms.len());
    for (w, v) in terms {
        logs.push(v.ln()?.mul_rational(w));
    }
    Ok(Scalar::sum(&logs, prec).exp())
}

/// `M_{n,r}(q, x) = (sum q_i x_i^r)^(1/r)`, or `prod x_i^{q_i}` for the
/// geometric exponent.
pub fn power_mean(
    q: &NormalizedWeights,
    x: &PositiveVector,
    r: &Exponent,
    prec: u32,
) -> Result<Scalar> {
    if q.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            got: x.len(),
        });
    }
    weighted_power_mean(q.as_slice(), &x.scalars(prec), r, prec)
}

pub(crate) fn prefix_means_scalar(
    w: &WeightSequence,
    x: &[Scalar],
    r: &Exponent,
    prec: u32,
) -> Result<Vec<Scalar>> {
    if w.len() < x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: w.len(),
        });
    }
    (1..=x.len())
        .map(|i| weighted_power_mean(&w.normalized_prefix(i), &x[..i], r, prec))
        .collect()
}

/// `(M_{1,r}, ..., M_{n,r})` where entry `i` uses weights `w_i / W_i` on the
/// prefix `x_i`.
pub fn prefix_means(
    w: &WeightSequence,
    x: &PositiveVector,
    r: &Exponent,
    prec: u32,
) -> Result<PrefixMeanSequence> {
    if w.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            got: x.len(),
        });
    }
    prefix_means_scalar(w, &x.scalars(prec), r, prec).map(PrefixMeanSequence)
}

/// `[E_{n,0}, ..., E_{n,max_order}]` by the recurrence
/// `E_{k,r} = E_{k-1,r} + x_k E_{k-1,r-1}`.
pub fn esf_table(x: &[Rational], max_order: usize) -> Vec<Rational> {
    let mut e = vec![Rational::new(); max_order + 1];
    e[0] = Rational::from(1);
    for (k, xk) in x.iter().enumerate() {
        let top = (k + 1).min(max_order);
        for j in (1..=top).rev() {
            let add = Rational::from(xk * &e[j - 1]);
            e[j] += add;
        }
    }
    e
}

/// `E_{n,r}(x)` in exact arithmetic.
pub fn esf(x: &PositiveVector, r: usize) -> Result<Rational> {
    if r > x.len() {
        return Err(Error::OrderOutOfRange {
            r: r as i64,
            n: x.len(),
        });
    }
    Ok(esf_table(x.entries(), r).swap_remove(r))
}

pub(crate) fn esf_scalar(x: &[Scalar], r: usize, prec: u32) -> Result<Scalar> {
    if r > x.len() {
        return Err(Error::OrderOutOfRange {
            r: r as i64,
            n: x.len(),
        });
    }
    let mut e = vec![Scalar::zero(prec); r + 1];
    e[0] = Scalar::one(prec);
    for (k, xk) in x.iter().enumerate() {
        let top = (k + 1).min(r);
        for j in (1..=top).rev() {
            e[j] = &e[j] + &(xk * &e[j - 1]);
        }
    }
    Ok(e.swap_remove(r))
}

pub fn binomial(n: usize, r: usize) -> Integer {
    Integer::from(n as u64).binomial(r as u32)
}

pub(crate) fn symmetric_mean_scalar(x: &[Scalar], r: usize, prec: u32) -> Result<Scalar> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    if n == 1 && (r == 0 || r == 2) {
        return Ok(x[0].clone());
    }
    if r == 0 {
        return Ok(Scalar::one(prec));
    }
    if r > n {
        return Err(Error::OrderOutOfRange { r: r as i64, n });
    }
    for (i, v) in x.iter().enumerate() {
        if !v.is_certainly_nonnegative() {
            return Err(Error::InvalidEntry {
                index: i,
                value: v.to_string(),
                reason: "symmetric means need non-negative entries",
            });
        }
    }
    let e = esf_scalar(x, r, prec)?;
    let c = Rational::from(binomial(n, r));
    e.div_rational(&c)?.root(r as u32)
}

/// `P_{n,r}(x) = (E_{n,r} / C(n,r))^(1/r)` together with the small-`n`
/// conventions described in the module docs.
pub fn symmetric_mean(x: &PositiveVector, r: usize, prec: u32) -> Result<Scalar> {
    symmetric_mean_scalar(&x.scalars(prec), r, prec)
}

/// `E_{i,i-1}` for every prefix `i = 1..n`, in `O(n)` via
/// `E_{i,i-1} = x_i E_{i-1,i-2} + x_1 ... x_{i-1}`.
pub(crate) fn next_to_top_esf_prefixes(x: &[Scalar], prec: u32) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(x.len());
    let mut e = Scalar::one(prec);
    let mut prod = Scalar::one(prec);
    for (i, xi) in x.iter().enumerate() {
        if i > 0 {
            e = &(xi * &e) + &prod;
        }
        prod = &prod * xi;
        out.push(e.clone());
    }
    out
}

/// `(P_{1,0}, P_{2,1}, ..., P_{n,n-1})` over the prefixes of `x`, with
/// `P_{1,0} = x_1`.
pub(crate) fn prefix_next_to_top(x: &[Scalar], prec: u32) -> Result<Vec<Scalar>> {
    let e = next_to_top_esf_prefixes(x, prec);
    let mut out = Vec::with_capacity(x.len());
    for (idx, ei) in e.iter().enumerate() {
        let i = idx + 1;
        if i == 1 {
            out.push(x[0].clone());
            continue;
        }
        let scaled = ei.div_rational(&Rational::from(i as u64))?;
        out.push(scaled.root((i - 1) as u32)?);
    }
    Ok(out)
}

/// `P_{n,n-1}(x) = (E_{n,n-1} / n)^(1/(n-1))` for `n >= 2`. Accepts
/// non-negative input.
pub fn p_next_to_top(x: &PositiveVector, prec: u32) -> Result<Scalar> {
    let n = x.len();
    if n < 2 {
        return Err(Error::OrderOutOfRange { r: n as i64 - 1, n });
    }
    let scalars = x.scalars(prec);
    let e = next_to_top_esf_prefixes(&scalars, prec)
        .pop()
        .expect("n >= 2");
    e.div_rational(&Rational::from(n as u64))?.root((n - 1) as u32)
}

/// `P_{n,n-1}` through the geometric and harmonic means,
/// `G_n^{n/(n-1)} / H_n^{1/(n-1)}`. Strictly positive input only.
pub fn p_next_to_top_via_gh(x: &PositiveVector, prec: u32) -> Result<Scalar> {
    let n = x.len();
    if n < 2 {
        return Err(Error::OrderOutOfRange { r: n as i64 - 1, n });
    }
    if x.entries().iter().any(|q| q.is_zero()) {
        return Err(Error::NotPositive("harmonic mean"));
    }
    let q = NormalizedWeights::uniform(n);
    let g = power_mean(&q, x, &Exponent::Geometric, prec)?;
    let h = power_mean(&q, x, &Exponent::int(-1), prec)?;
    let m = (n - 1) as i64;
    let num = g.pow_rational(&Rational::from((n as i64, m)))?;
    let den = h.pow_rational(&Rational::from((1, m)))?;
    num.div(&den)
}
