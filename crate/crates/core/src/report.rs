//! Inequality reports and the verdict procedure.
//!
//! A check evaluates both sides of an inequality at a requested precision.
//! [`decide`] turns those evaluations into a [`Verdict`]:
//!
//! * an exact margin decides immediately;
//! * a margin whose magnitude exceeds its error bound decides by sign, except
//!   that a negative margin must be reproduced at doubled precision before it
//!   is reported as `Violated`;
//! * otherwise both sides are recomputed at doubled precision. If the margin
//!   is still inside the error bound and that bound is below the relative
//!   equality tolerance, the verdict is `Equality`; if not, `Indeterminate`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rug::{Float, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::means::parse_rational;
use crate::scalar::{Scalar, DEFAULT_PRECISION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Equality,
    Violated,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Equality => "equality",
            Verdict::Violated => "violated",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

/// Which way the inequality points: `Le` claims `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Le,
    Ge,
}

impl Relation {
    pub fn reversed(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
        }
    }
}

/// Precision and equality tolerance shared by every check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub precision: u32,
    pub equality_tol: f64,
}

impl CheckConfig {
    pub const DEFAULT_EQUALITY_TOL: f64 = 5.421010862427522e-20; // 2^-64

    pub fn new(precision: u32, equality_tol: f64) -> Result<Self> {
        if precision < 64 {
            return Err(Error::InvalidArgument(format!(
                "precision must be at least 64 bits, got {precision}"
            )));
        }
        if !(equality_tol > 0.0 && equality_tol <= 2f64.powi(-16)) {
            return Err(Error::InvalidArgument(format!(
                "equality tolerance must lie in (0, 2^-16], got {equality_tol}"
            )));
        }
        Ok(CheckConfig {
            precision,
            equality_tol,
        })
    }

    pub fn with_precision(precision: u32) -> Result<Self> {
        Self::new(precision, Self::DEFAULT_EQUALITY_TOL)
    }
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            precision: DEFAULT_PRECISION,
            equality_tol: Self::DEFAULT_EQUALITY_TOL,
        }
    }
}

/// A rational that serializes as its `p/q` string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RationalText(pub Rational);

impl Serialize for RationalText {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s)
            .map(RationalText)
            .map_err(serde::de::Error::custom)
    }
}

pub(crate) fn texts(v: &[Rational]) -> Vec<RationalText> {
    v.iter().cloned().map(RationalText).collect()
}

pub(crate) fn rationals(v: &[RationalText]) -> Vec<Rational> {
    v.iter().map(|t| t.0.clone()).collect()
}

/// Everything needed to replay a check: the vectors, weights and parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub x: Vec<RationalText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<RationalText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<RationalText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<RationalText>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<RationalText>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
}

impl Instance {
    pub fn from_x(x: &[Rational]) -> Self {
        Instance {
            x: texts(x),
            ..Default::default()
        }
    }

    pub fn with_w(mut self, w: &[Rational]) -> Self {
        self.w = Some(texts(w));
        self
    }

    pub fn with_y(mut self, y: &[Rational]) -> Self {
        self.y = Some(texts(y));
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn x_values(&self) -> Vec<Rational> {
        rationals(&self.x)
    }

    pub fn y_values(&self) -> Option<Vec<Rational>> {
        self.y.as_deref().map(rationals)
    }

    pub fn w_values(&self) -> Option<Vec<Rational>> {
        self.w.as_deref().map(rationals)
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }
}

/// Both sides of an inequality at one precision. `scale` is the magnitude the
/// equality tolerance is measured against; it defaults to the larger side.
#[derive(Debug, Clone)]
pub struct Sides {
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub scale: Option<Float>,
}

impl Sides {
    pub fn new(lhs: Scalar, rhs: Scalar) -> Self {
        Sides {
            lhs,
            rhs,
            scale: None,
        }
    }

    pub fn with_scale(mut self, scale: &Scalar) -> Self {
        self.scale = Some(scale.magnitude());
        self
    }

    fn margin(&self, relation: Relation) -> Scalar {
        match relation {
            Relation::Le => &self.rhs - &self.lhs,
            Relation::Ge => &self.lhs - &self.rhs,
        }
    }

    fn scale(&self) -> Float {
        let l = self.lhs.magnitude();
        let r = self.rhs.magnitude();
        let mut s = if l > r { l } else { r };
        if let Some(extra) = &self.scale {
            if *extra > s {
                s = extra.clone();
            }
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub relation: Relation,
    /// `rhs - lhs` for `Le`, `lhs - rhs` for `Ge`: nonnegative iff it holds.
    pub margin: Scalar,
    pub verdict: Verdict,
    /// Precision of the evaluation that settled the verdict.
    pub precision: u32,
    pub instance: Instance,
}

impl InequalityReport {
    /// Margin divided by the larger side, as an `f64`.
    pub fn relative_margin(&self) -> f64 {
        let scale = self.lhs.to_f64().abs().max(self.rhs.to_f64().abs());
        let m = self.margin.to_f64();
        if scale == 0.0 {
            m
        } else {
            m / scale
        }
    }

    /// True when the margin is provably larger than its error bound.
    pub fn margin_beyond_error(&self) -> bool {
        self.margin.certain_sign().is_some_and(|o| o != Ordering::Equal)
    }

    pub fn holds_or_equal(&self) -> bool {
        matches!(self.verdict, Verdict::Holds | Verdict::Equality)
    }
}

fn report(sides: Sides, relation: Relation, verdict: Verdict, instance: Instance) -> InequalityReport {
    let margin = sides.margin(relation);
    InequalityReport {
        precision: sides.lhs.prec().max(sides.rhs.prec()),
        lhs: sides.lhs,
        rhs: sides.rhs,
        relation,
        margin,
        verdict,
        instance,
    }
}

/// Runs `eval` at the configured precision (and at doubled precision when
/// needed) and classifies the result.
pub fn decide<F>(cfg: &CheckConfig, relation: Relation, instance: Instance, eval: F) -> Result<InequalityReport>
where
    F: Fn(u32) -> Result<Sides>,
{
    let p = cfg.precision;
    let first = eval(p)?;
    match first.margin(relation).certain_sign() {
        Some(Ordering::Greater) => return Ok(report(first, relation, Verdict::Holds, instance)),
        Some(Ordering::Equal) => return Ok(report(first, relation, Verdict::Equality, instance)),
        Some(Ordering::Less) => {
            let second = eval(2 * p)?;
            let verdict = if second.margin(relation).certain_sign() == Some(Ordering::Less) {
                Verdict::Violated
            } else {
                Verdict::Indeterminate
            };
            return Ok(report(second, relation, verdict, instance));
        }
        None => {}
    }
    let second = eval(2 * p)?;
    let m2 = second.margin(relation);
    match m2.certain_sign() {
        Some(Ordering::Greater) => Ok(report(second, relation, Verdict::Holds, instance)),
        Some(Ordering::Equal) => Ok(report(second, relation, Verdict::Equality, instance)),
        Some(Ordering::Less) => {
            let third = eval(4 * p)?;
            let verdict = if third.margin(relation).certain_sign() == Some(Ordering::Less) {
                Verdict::Violated
            } else {
                Verdict::Indeterminate
            };
            Ok(report(third, relation, verdict, instance))
        }
        None => {
            let tol = Float::with_val(64, cfg.equality_tol);
            let bound = Float::with_val(64, &tol * &second.scale());
            let verdict = if m2.err().is_finite() && *m2.err() <= bound {
                Verdict::Equality
            } else {
                Verdict::Indeterminate
            };
            Ok(report(second, relation, verdict, instance))
        }
    }
}
