//! Error-bounded high-precision reals.
//!
//! A [`Scalar`] is a multiprecision value together with an absolute error
//! bound: the mathematical quantity it stands for is guaranteed to lie in
//! `[value - err, value + err]`. When every input of a computation is an exact
//! rational and the computation stays inside the rationals, the exact result is
//! carried alongside, so that sign and equality decisions can be made without
//! any rounding at all.
//!
//! Error bounds are kept in a short `ERR_PRECISION`-bit float rounded toward
//! +inf. Rational operations (add, mul, div, integer powers) use closed-form
//! worst-case bounds; transcendental ones (exp, ln, roots) use the derivative
//! bound with the computed value standing in for the true one, scaled by
//! [`SAFETY`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::{Round, Special};
use rug::ops::{AssignRound, Pow};
use rug::{Float, Integer, Rational};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default significand precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// Precision of the error-bound carrier.
pub const ERR_PRECISION: u32 = 64;

/// Multiplier applied where the computed value stands in for the true one.
pub const SAFETY: u32 = 2;

/// Exact results whose numerator and denominator together exceed this many
/// bits are dropped from the exact path.
pub const MAX_EXACT_BITS: u32 = 16_384;

fn up<T>(val: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(ERR_PRECISION, val, Round::Up).0
}

fn down<T>(val: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(ERR_PRECISION, val, Round::Down).0
}

fn err_zero() -> Float {
    Float::new(ERR_PRECISION)
}

fn err_inf() -> Float {
    Float::with_val(ERR_PRECISION, Special::Infinity)
}

fn err_add(a: &Float, b: &Float) -> Float {
    up(a + b)
}

fn err_mul(a: &Float, b: &Float) -> Float {
    if a.is_zero() || b.is_zero() {
        err_zero()
    } else {
        up(a * b)
    }
}

/// Rounding bound for a freshly computed value: `SAFETY` half-ulps.
fn rounding(z: &Float) -> Float {
    if z.is_zero() || !z.is_finite() {
        return err_zero();
    }
    let mut e = up(z.abs_ref());
    e >>= z.prec() - 1;
    e
}

fn abs_up(z: &Float) -> Float {
    up(z.abs_ref())
}

fn keep(q: Rational) -> Option<Rational> {
    let bits = q.numer().significant_bits() as u64 + q.denom().significant_bits() as u64;
    (bits <= MAX_EXACT_BITS as u64).then_some(q)
}

fn exact_root(q: &Rational, k: u32) -> Option<Rational> {
    if q.cmp0() == Ordering::Less {
        return None;
    }
    if k == 1 {
        return Some(q.clone());
    }
    let (n_root, n_rem) = q.numer().clone().root_rem(Integer::new(), k);
    if !n_rem.is_zero() {
        return None;
    }
    let (d_root, d_rem) = q.denom().clone().root_rem(Integer::new(), k);
    if !d_rem.is_zero() {
        return None;
    }
    Some(Rational::from((n_root, d_root)))
}

#[derive(Clone, Debug)]
pub struct Scalar {
    value: Float,
    err: Float,
    exact: Option<Rational>,
}

impl Scalar {
    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        let (value, ord) = Float::with_val_round(prec, q, Round::Nearest);
        let err = if ord == Ordering::Equal {
            err_zero()
        } else {
            rounding(&value)
        };
        Scalar {
            value,
            err,
            exact: keep(q.clone()),
        }
    }

    pub fn from_int(i: i64, prec: u32) -> Self {
        Self::from_rational(&Rational::from(i), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_int(0, prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    /// An inexact value with a caller-supplied error bound.
    pub fn with_error(value: Float, err: &Float) -> Self {
        let err = if err.is_nan() { err_inf() } else { abs_up(err) };
        Scalar {
            value,
            err,
            exact: None,
        }
    }

    fn numeric(value: Float, err: Float) -> Self {
        let err = if err.is_nan() { err_inf() } else { err };
        Scalar {
            value,
            err,
            exact: None,
        }
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn err(&self) -> &Float {
        &self.err
    }

    pub fn exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn prec(&self) -> u32 {
        self.value.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn err_f64(&self) -> f64 {
        self.err.to_f64()
    }

    /// Lower end of the enclosing interval, rounded down.
    pub fn lower(&self) -> Float {
        Float::with_val_round(self.prec(), &self.value - &self.err, Round::Down).0
    }

    /// Upper end of the enclosing interval, rounded up.
    pub fn upper(&self) -> Float {
        Float::with_val_round(self.prec(), &self.value + &self.err, Round::Up).0
    }

    /// Sign that is certain given the error bound, if any.
    pub fn certain_sign(&self) -> Option<Ordering> {
        if let Some(q) = &self.exact {
            return Some(q.cmp0());
        }
        if !self.err.is_finite() {
            return None;
        }
        let mag = down(self.value.abs_ref());
        if mag > self.err {
            self.value.cmp0()
        } else if self.value.is_zero() && self.err.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn is_certainly_positive(&self) -> bool {
        self.certain_sign() == Some(Ordering::Greater)
    }

    /// True when the interval cannot contain a negative number.
    pub fn is_certainly_nonnegative(&self) -> bool {
        if let Some(q) = &self.exact {
            return q.cmp0() != Ordering::Less;
        }
        self.lower().cmp0() != Some(Ordering::Less)
    }

    fn binary_prec(&self, other: &Scalar) -> u32 {
        self.prec().max(other.prec())
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        let prec = self.binary_prec(other);
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            if b.is_zero() {
                return Err(Error::NotPositive("division"));
            }
            if let Some(q) = keep(Rational::from(a / b)) {
                return Ok(Scalar::from_rational(&q, prec));
            }
        }
        let b_abs_low = down(&down(other.value.abs_ref()) - &other.err);
        if b_abs_low.cmp0() != Some(Ordering::Greater) {
            if other.value.is_zero() {
                return Err(Error::NotPositive("division"));
            }
            let value = Float::with_val(prec, &self.value / &other.value);
            return Ok(Scalar::numeric(value, err_inf()));
        }
        let value = Float::with_val(prec, &self.value / &other.value);
        // |a'/b' - a/b| <= (|b| ea + |a| eb) / (|b| (|b| - eb))
        let num = err_add(
            &err_mul(&abs_up(&other.value), &self.err),
            &err_mul(&abs_up(&self.value), &other.err),
        );
        let den = down(&down(other.value.abs_ref()) * &b_abs_low);
        let prop = if num.is_zero() { err_zero() } else { up(&num / &den) };
        let err = err_add(&prop, &rounding(&value));
        Ok(Scalar::numeric(value, err))
    }

    pub fn recip(&self) -> Result<Scalar> {
        Scalar::one(self.prec()).div(self)
    }

    pub fn mul_rational(&self, q: &Rational) -> Scalar {
        self * &Scalar::from_rational(q, self.prec())
    }

    pub fn div_rational(&self, q: &Rational) -> Result<Scalar> {
        self.div(&Scalar::from_rational(q, self.prec()))
    }

    /// Integer power. Negative exponents require a nonzero base.
    pub fn powi(&self, k: i64) -> Result<Scalar> {
        if k < 0 {
            let k_abs = k.checked_neg().ok_or_else(|| {
                Error::InvalidArgument(format!("exponent {k} out of range"))
            })?;
            return self.powi(k_abs)?.recip();
        }
        let k_u32 = u32::try_from(k)
            .map_err(|_| Error::InvalidArgument(format!("exponent {k} out of range")))?;
        let prec = self.prec();
        if k_u32 == 0 {
            return Ok(Scalar::one(prec));
        }
        if let Some(a) = &self.exact {
            // Size check before materializing the power.
            let bits = (a.numer().significant_bits() as u64 + a.denom().significant_bits() as u64)
                * k_u32 as u64;
            if bits <= MAX_EXACT_BITS as u64 {
                let q: Rational = a.clone().pow(k_u32);
                return Ok(Scalar::from_rational(&q, prec));
            }
        }
        let value = Float::with_val(prec, (&self.value).pow(k_u32));
        let a_abs = abs_up(&self.value);
        let prop = if self.err.is_zero() {
            err_zero()
        } else if a_abs.is_zero() {
            up((&self.err).pow(k_u32))
        } else {
            // |a'^k - a^k| <= |a|^k ((1 + ea/|a|)^k - 1)
            let delta = up(&self.err / &down(self.value.abs_ref()));
            let growth = up(&up(delta.ln_1p_ref()) * k_u32);
            let factor = up(growth.exp_m1_ref());
            let mag = up(&abs_up(&value) * SAFETY);
            err_mul(&mag, &factor)
        };
        let err = err_add(&prop, &rounding(&value));
        Ok(Scalar::numeric(value, err))
    }

    /// Principal `k`-th root of a value whose interval may touch zero.
    pub fn root(&self, k: u32) -> Result<Scalar> {
        if k == 0 {
            return Err(Error::InvalidArgument("root of degree 0".into()));
        }
        let prec = self.prec();
        if k == 1 {
            return Ok(self.clone());
        }
        if let Some(a) = &self.exact {
            if a.cmp0() == Ordering::Less {
                return Err(Error::NotPositive("root"));
            }
            if let Some(q) = exact_root(a, k) {
                return Ok(Scalar::from_rational(&q, prec));
            }
        }
        let hi = up(&self.value + &self.err);
        if hi.cmp0() == Some(Ordering::Less) {
            return Err(Error::NotPositive("root"));
        }
        let lo = down(&self.value - &self.err);
        if lo.cmp0() == Some(Ordering::Greater) {
            let value = Float::with_val(prec, self.value.root_ref(k));
            // |z' - z| <= z * ea / (k (a - ea))
            let delta = up(&self.err / &lo);
            let rel = up(&delta / k);
            let prop = err_mul(&up(&abs_up(&value) * SAFETY), &rel);
            let err = err_add(&prop, &rounding(&value));
            Ok(Scalar::numeric(value, err))
        } else {
            // The interval reaches zero: bound the whole range [0, hi^(1/k)].
            let base = if self.value.cmp0() == Some(Ordering::Greater) {
                self.value.clone()
            } else {
                Float::new(prec)
            };
            let value = Float::with_val(prec, base.root_ref(k));
            let err = if hi.is_zero() {
                err_zero()
            } else {
                Float::with_val_round(ERR_PRECISION, hi.root_ref(k), Round::Up).0
            };
            Ok(Scalar::numeric(value, err))
        }
    }

    pub fn sqrt(&self) -> Result<Scalar> {
        self.root(2)
    }

    pub fn exp(&self) -> Scalar {
        let prec = self.prec();
        if self.exact.as_ref().is_some_and(|q| q.is_zero()) {
            return Scalar::one(prec);
        }
        let value = Float::with_val(prec, self.value.exp_ref());
        let factor = up(self.err.exp_m1_ref());
        let prop = err_mul(&up(&abs_up(&value) * SAFETY), &factor);
        let err = err_add(&prop, &rounding(&value));
        Scalar::numeric(value, err)
    }

    pub fn ln(&self) -> Result<Scalar> {
        let prec = self.prec();
        if let Some(q) = &self.exact {
            if q.cmp0() != Ordering::Greater {
                return Err(Error::NotPositive("ln"));
            }
            if *q == 1 {
                return Ok(Scalar::zero(prec));
            }
        }
        let lo = down(&self.value - &self.err);
        if lo.cmp0() != Some(Ordering::Greater) {
            return Err(Error::NotPositive("ln"));
        }
        let value = Float::with_val(prec, self.value.ln_ref());
        let prop = if self.err.is_zero() {
            err_zero()
        } else {
            // |ln a' - ln a| <= -ln(1 - ea/a)
            let delta = up(&self.err / &down(&self.value));
            if delta >= 1 {
                err_inf()
            } else {
                let neg: Float = -delta;
                let l = down(neg.ln_1p_ref());
                -l
            }
        };
        let err = err_add(&prop, &rounding(&value));
        Ok(Scalar::numeric(value, err))
    }

    /// `self^r` for a rational exponent. Bases whose interval touches zero are
    /// allowed when `r > 0`.
    pub fn pow_rational(&self, r: &Rational) -> Result<Scalar> {
        let prec = self.prec();
        if r.is_zero() {
            return Ok(Scalar::one(prec));
        }
        if let (Some(p), Some(q)) = (r.numer().to_i64(), r.denom().to_u32()) {
            // Large integer powers lose about log2(p) bits; exp/ln does not.
            if p.unsigned_abs() <= 64 && q <= 64 {
                if p > 0 {
                    return self.powi(p)?.root(q);
                }
                // Negative powers need a base bounded away from zero.
                if !self.is_certainly_positive() {
                    return Err(Error::NotPositive("negative power"));
                }
                return self.powi(-p)?.root(q)?.recip();
            }
        }
        if self.is_certainly_positive() {
            let exponent = Scalar::from_rational(r, prec);
            return Ok((&self.ln()? * &exponent).exp());
        }
        if r.cmp0() == Ordering::Less {
            return Err(Error::NotPositive("negative power"));
        }
        let hi = up(&self.value + &self.err);
        if hi.cmp0() == Some(Ordering::Less) {
            return Err(Error::NotPositive("power"));
        }
        // hi^r is increasing in r when hi >= 1 and decreasing otherwise.
        let toward = if hi >= 1 { Round::Up } else { Round::Down };
        let rf = Float::with_val_round(ERR_PRECISION, r, toward).0;
        let err = if hi.is_zero() {
            err_zero()
        } else {
            up(hi.pow(&rf))
        };
        let value = if self.value.cmp0() == Some(Ordering::Greater) {
            Float::with_val(prec, (&self.value).pow(&Float::with_val(prec, r)))
        } else {
            Float::new(prec)
        };
        Ok(Scalar::numeric(value, err))
    }

    /// Sum of an iterator of scalars at the given precision.
    pub fn sum<'a, I>(items: I, prec: u32) -> Scalar
    where
        I: IntoIterator<Item = &'a Scalar>,
    {
        items
            .into_iter()
            .fold(Scalar::zero(prec), |acc, s| &acc + s)
    }

    /// Largest magnitude of the value, for relative comparisons.
    pub fn magnitude(&self) -> Float {
        abs_up(&self.value)
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if let Some(q) = &self.exact {
            if q.denom() == &1 {
                return q.numer().to_string();
            }
        }
        if self.value.is_zero() {
            return "0".into();
        }
        self.value.to_string_radix(10, Some(digits))
    }

    /// Number of decimal digits the value carries at its precision.
    pub fn decimal_digits(&self) -> usize {
        ((self.prec() as f64) * std::f64::consts::LOG10_2).floor() as usize
    }

    /// Error bound as `log2`, rounded up; `None` for an exact zero bound.
    pub fn err_log2(&self) -> Option<i64> {
        if self.err.is_zero() {
            return None;
        }
        if !self.err.is_finite() {
            return Some(i64::MAX);
        }
        let l = up(self.err.log2_ref());
        Some(l.to_f64().ceil() as i64)
    }
}

fn add_like(a: &Scalar, b: &Scalar, negate_b: bool) -> Scalar {
    let prec = a.binary_prec(b);
    if let (Some(x), Some(y)) = (&a.exact, &b.exact) {
        let q = if negate_b {
            Rational::from(x - y)
        } else {
            Rational::from(x + y)
        };
        if let Some(q) = keep(q) {
            return Scalar::from_rational(&q, prec);
        }
    }
    let value = if negate_b {
        Float::with_val(prec, &a.value - &b.value)
    } else {
        Float::with_val(prec, &a.value + &b.value)
    };
    let err = err_add(&err_add(&a.err, &b.err), &rounding(&value));
    Scalar::numeric(value, err)
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        add_like(self, rhs, false)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        add_like(self, rhs, true)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let prec = self.binary_prec(rhs);
        if let (Some(x), Some(y)) = (&self.exact, &rhs.exact) {
            if let Some(q) = keep(Rational::from(x * y)) {
                return Scalar::from_rational(&q, prec);
            }
        }
        let value = Float::with_val(prec, &self.value * &rhs.value);
        // |a'b' - ab| <= |a| eb + |b| ea + ea eb
        let prop = err_add(
            &err_add(
                &err_mul(&abs_up(&self.value), &rhs.err),
                &err_mul(&abs_up(&rhs.value), &self.err),
            ),
            &err_mul(&self.err, &rhs.err),
        );
        let err = err_add(&prop, &rounding(&value));
        Scalar::numeric(value, err)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            value: -self.value.clone(),
            err: self.err.clone(),
            exact: self.exact.as_ref().map(|q| Rational::from(-q)),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = &self.exact {
            return write!(f, "{q} (exact)");
        }
        let digits = self.decimal_digits().clamp(6, 40);
        write!(f, "{}", self.to_decimal(digits))?;
        match self.err_log2() {
            None => Ok(()),
            Some(i64::MAX) => write!(f, " ± inf"),
            Some(e) => write!(f, " ± 2^{e}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Scalar", 3)?;
        st.serialize_field("value", &self.to_decimal(self.decimal_digits().max(6)))?;
        st.serialize_field("err", &self.err.to_string_radix(10, Some(6)))?;
        st.serialize_field("exact", &self.exact.as_ref().map(|q| q.to_string()))?;
        st.end()
    }
}
