//! Mixed means over prefixes and the mixed-mean inequalities built on them.
//!
//! Throughout, `M_{i,r}` is the power mean of the prefix `x_i` with weights
//! `w_1/W_i, ..., w_i/W_i`, and a mixed mean `M_{n,s}(M_{n,r})` applies the
//! outer mean (weights `w/W_n`) to the vector `(M_{1,r}, ..., M_{n,r})`.
//! `A`, `G` abbreviate the exponents 1 and geometric.

use rug::Rational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::means::{prefix_means_scalar, weighted_power_mean, Exponent, PositiveVector, WeightSequence};
use crate::report::{decide, texts, CheckConfig, InequalityReport, Instance, Relation, Sides};
use crate::scalar::Scalar;

fn check_index(n: usize, min: usize, max: usize) -> Result<()> {
    if n < min || n > max {
        return Err(Error::IndexOutOfRange { n, min, max });
    }
    Ok(())
}

fn check_dims(w: &WeightSequence, x: &PositiveVector) -> Result<()> {
    if w.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            got: x.len(),
        });
    }
    Ok(())
}

/// `W_n w_k - W_k w_n > 0` for every `2 <= k <= n-1` (vacuous for `n = 2`).
pub fn nanjundiah_condition(w: &WeightSequence, n: usize) -> Result<bool> {
    check_index(n, 2, w.len())?;
    let wn = w.w(n);
    let big_wn = w.big_w(n);
    Ok((2..n).all(|k| {
        let lhs = Rational::from(&big_wn * w.w(k));
        let rhs = Rational::from(&w.big_w(k) * wn);
        lhs > rhs
    }))
}

/// [`nanjundiah_condition`] at every `m` in `2..=n`, the hypothesis of a
/// whole chain of step inequalities.
pub fn nanjundiah_condition_prefixwise(w: &WeightSequence, n: usize) -> Result<bool> {
    check_index(n, 2, w.len())?;
    for m in 2..=n {
        if !nanjundiah_condition(w, m)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `W_k^2 >= w_{k+1} (W_1 + ... + W_{k-1})` for every `2 <= k <= n-1`.
pub fn holland_condition(w: &WeightSequence, n: usize) -> Result<bool> {
    check_index(n, 2, w.len())?;
    let mut partial = w.big_w(1);
    for k in 2..n {
        let wk = w.big_w(k);
        let lhs = Rational::from(&wk * &wk);
        let rhs = Rational::from(w.w(k + 1) * &partial);
        if lhs < rhs {
            return Ok(false);
        }
        partial += &wk;
    }
    Ok(true)
}

pub(crate) fn mixed_mean_scalar(
    w: &WeightSequence,
    x: &[Scalar],
    outer: &Exponent,
    inner: &Exponent,
    prec: u32,
) -> Result<Scalar> {
    let inner_means = prefix_means_scalar(w, x, inner, prec)?;
    weighted_power_mean(&w.normalized_prefix(x.len()), &inner_means, outer, prec)
}

/// `M_{n,outer}(M_{n,inner})` with `n = dim(x)`.
pub fn mixed_mean(
    w: &WeightSequence,
    x: &PositiveVector,
    outer: &Exponent,
    inner: &Exponent,
    prec: u32,
) -> Result<Scalar> {
    check_dims(w, x)?;
    mixed_mean_scalar(w, &x.scalars(prec), outer, inner, prec)
}

fn base_instance(w: &WeightSequence, x: &PositiveVector) -> Instance {
    Instance::from_x(x.entries()).with_w(w.weights())
}

/// `M_{n,s}(M_{n,r}) >= M_{n,r}(M_{n,s})` for `r > s`, under the Nanjundiah
/// condition.
pub fn nanjundiah_check(
    w: &WeightSequence,
    x: &PositiveVector,
    r: &Exponent,
    s: &Exponent,
    cfg: &CheckConfig,
) -> Result<InequalityReport> {
    check_dims(w, x)?;
    let n = x.len();
    if n < 2 {
        return Err(Error::Precondition("n >= 2 required".into()));
    }
    if r <= s {
        return Err(Error::Precondition(format!("r > s required, got r={r}, s={s}")));
    }
    if !nanjundiah_condition(w, n)? {
        return Err(Error::Precondition("weights fail the Nanjundiah condition".into()));
    }
    let instance = base_instance(w, x).with_param("r", r).with_param("s", s);
    decide(cfg, Relation::Ge, instance, |p| {
        let xs = x.scalars(p);
        let lhs = mixed_mean_scalar(w, &xs, s, r, p)?;
        let rhs = mixed_mean_scalar(w, &xs, r, s, p)?;
        Ok(Sides::new(lhs, rhs))
    })
}

/// Terms of `W_m (M_{m,s}(M_{m,1}) - M_{m,1}(M_{m,s}))` for `m = 1..n`,
/// returned as `(first, second)` pairs so callers can form differences and
/// scales.
fn rado_terms(w: &WeightSequence, x: &[Scalar], s: &Exponent, prec: u32) -> Result<Vec<(Scalar, Scalar)>> {
    let one = Exponent::int(1);
    let means_one = prefix_means_scalar(w, x, &one, prec)?;
    let means_s = prefix_means_scalar(w, x, s, prec)?;
    (1..=x.len())
        .map(|m| {
            let q = w.normalized_prefix(m);
            let big_w = w.big_w(m);
            let first = weighted_power_mean(&q, &means_one[..m], s, prec)?.mul_rational(&big_w);
            let second = weighted_power_mean(&q, &means_s[..m], &one, prec)?.mul_rational(&big_w);
            Ok((first, second))
        })
        .collect()
}

/// `D_m` for every `m = 1..dim(x)`; `D_1 = 0`.
pub fn rado_differences(w: &WeightSequence, x: &PositiveVector, s: &Exponent, prec: u32) -> Result<Vec<Scalar>> {
    check_dims(w, x)?;
    Ok(rado_terms(w, &x.scalars(prec), s, prec)?
        .iter()
        .map(|(a, b)| a - b)
        .collect())
}

/// `D_n = W_n (M_{n,s}(M_{n,1}) - M_{n,1}(M_{n,s}))`.
pub fn rado_difference(w: &WeightSequence, x: &PositiveVector, s: &Exponent, n: usize, prec: u32) -> Result<Scalar> {
    check_dims(w, x)?;
    check_index(n, 1, x.len())?;
    let xs = x.scalars(prec);
    let terms = rado_terms(w, &xs[..n], s, prec)?;
    let (a, b) = &terms[n - 1];
    Ok(a - b)
}

fn rado_step(
    w: &WeightSequence,
    x: &PositiveVector,
    s: &Exponent,
    n: usize,
    relation: Relation,
    instance: Instance,
    cfg: &CheckConfig,
) -> Result<InequalityReport> {
    decide(cfg, relation, instance, |p| {
        let xs = x.scalars(p);
        let terms = rado_terms(w, &xs[..n], s, p)?;
        let (a0, b0) = &terms[n - 2];
        let (a1, b1) = &terms[n - 1];
        Ok(Sides::new(a0 - b0, a1 - b1).with_scale(a1))
    })
}

/// `D_{n-1} <= D_n` for `s < 1` (reversed for `s > 1`), under the Nanjundiah
/// condition at `n`.
pub fn rado_step_check(
    w: &WeightSequence,
    x: &PositiveVector,
    s: &Exponent,
    n: usize,
    cfg: &CheckConfig,
) -> Result<InequalityReport> {
    check_dims(w, x)?;
    check_index(n, 2, x.len())?;
    let relation = match s.as_rational().cmp(&Rational::from(1)) {
        std::cmp::Ordering::Less => Relation::Le,
        std::cmp::Ordering::Greater => Relation::Ge,
        std::cmp::Ordering::Equal => {
            return Err(Error::Precondition("s must differ from 1".into()));
        }
    };
    if !nanjundiah_condition(w, n)? {
        return Err(Error::Precondition("weights fail the Nanjundiah condition".into()));
    }
    let instance = base_instance(w, x).with_n(n).with_param("s", s);
    rado_step(w, x, s, n, relation, instance, cfg)
}

/// The step inequality with `s` geometric, under Holland's weaker condition.
pub fn holland_rado_check(w: &WeightSequence, x: &PositiveVector, n: usize, cfg: &CheckConfig) -> Result<InequalityReport> {
    check_dims(w, x)?;
    check_index(n, 2, x.len())?;
    if !holland_condition(w, n)? {
        return Err(Error::Precondition("weights fail the Holland condition".into()));
    }
    let instance = base_instance(w, x).with_n(n);
    rado_step(w, x, &Exponent::Geometric, n, Relation::Le, instance, cfg)
}

fn popoviciu_terms(w: &WeightSequence, x: &[Scalar], prec: u32) -> Result<Vec<Scalar>> {
    let one = Exponent::int(1);
    let geo = Exponent::Geometric;
    let means_one = prefix_means_scalar(w, x, &one, prec)?;
    let means_geo = prefix_means_scalar(w, x, &geo, prec)?;
    (1..=x.len())
        .map(|m| {
            let q = w.normalized_prefix(m);
            let g_of_a = weighted_power_mean(&q, &means_one[..m], &geo, prec)?;
            let a_of_g = weighted_power_mean(&q, &means_geo[..m], &one, prec)?;
            Ok((&g_of_a.ln()? - &a_of_g.ln()?).mul_rational(&w.big_w(m)))
        })
        .collect()
}

/// `W_n (ln M_{n,0}(M_{n,1}) - ln M_{n,1}(M_{n,0}))`.
pub fn popoviciu_log_difference(w: &WeightSequence, x: &PositiveVector, n: usize, prec: u32) -> Result<Scalar> {
    check_dims(w, x)?;
    check_index(n, 1, x.len())?;
    let xs = x.scalars(prec);
    Ok(popoviciu_terms(w, &xs[..n], prec)?.pop().expect("n >= 1"))
}

/// The log-difference at `n - 1` is at most the one at `n`.
pub fn popoviciu_step_check(w: &WeightSequence, x: &PositiveVector, n: usize, cfg: &CheckConfig) -> Result<InequalityReport> {
    check_dims(w, x)?;
    check_index(n, 2, x.len())?;
    if !nanjundiah_condition(w, n)? {
        return Err(Error::Precondition("weights fail the Nanjundiah condition".into()));
    }
    let instance = base_instance(w, x).with_n(n);
    decide(cfg, Relation::Le, instance, |p| {
        let xs = x.scalars(p);
        let mut terms = popoviciu_terms(w, &xs[..n], p)?;
        let hi = terms.pop().expect("n >= 2");
        let lo = terms.pop().expect("n >= 2");
        let scale = Scalar::from_rational(&w.big_w(n), p);
        Ok(Sides::new(lo, hi).with_scale(&scale))
    })
}

/// Both product identities relating `G_n(A_n)` to `G_{n-1}(A_{n-1})`.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    /// `G_n(A_n) = G_{n-1}(A_{n-1})^{W_{n-1}/W_n} A_n^{w_n/W_n}`
    pub product_form: InequalityReport,
    /// `G_{n-1}(A_{n-1}) = A_n prod_{i<n} (A_i/A_{i+1})^{W_i/W_{n-1}}`
    pub telescoped_form: InequalityReport,
}

impl IdentityReport {
    pub fn both_equal(&self) -> bool {
        self.product_form.verdict == crate::report::Verdict::Equality
            && self.telescoped_form.verdict == crate::report::Verdict::Equality
    }
}

/// Both sides of the two identities at precision `prec`:
/// `[(G_n(A_n), product form), (G_{n-1}(A_{n-1}), telescoped form)]`.
pub fn identity_sides(w: &WeightSequence, x: &PositiveVector, prec: u32) -> Result<[(Scalar, Scalar); 2]> {
    check_dims(w, x)?;
    let n = x.len();
    if n < 2 {
        return Err(Error::Precondition("n >= 2 required".into()));
    }
    let one = Exponent::int(1);
    let geo = Exponent::Geometric;
    let xs = x.scalars(prec);
    let a = prefix_means_scalar(w, &xs, &one, prec)?;
    let g_n = weighted_power_mean(&w.normalized_prefix(n), &a, &geo, prec)?;
    let g_prev = weighted_power_mean(&w.normalized_prefix(n - 1), &a[..n - 1], &geo, prec)?;
    let big_w_n = w.big_w(n);
    let big_w_prev = w.big_w(n - 1);
    let product = &g_prev.pow_rational(&Rational::from(&big_w_prev / &big_w_n))?
        * &a[n - 1].pow_rational(&Rational::from(w.w(n) / &big_w_n))?;
    let mut telescoped = a[n - 1].clone();
    for i in 1..n {
        let ratio = a[i - 1].div(&a[i])?;
        let e = Rational::from(&w.big_w(i) / &big_w_prev);
        telescoped = &telescoped * &ratio.pow_rational(&e)?;
    }
    Ok([(g_n, product), (g_prev, telescoped)])
}

/// Checks both identities; each report should come out `Equality`.
pub fn reformulation_identity_check(w: &WeightSequence, x: &PositiveVector, cfg: &CheckConfig) -> Result<IdentityReport> {
    identity_sides(w, x, cfg.precision)?;
    let instance = base_instance(w, x);
    let mut reports = Vec::with_capacity(2);
    for which in 0..2 {
        reports.push(decide(cfg, Relation::Le, instance.clone().with_param("identity", which + 1), |p| {
            let sides = identity_sides(w, x, p)?;
            let (l, r) = sides[which].clone();
            Ok(Sides::new(l, r))
        })?);
    }
    let telescoped_form = reports.pop().expect("two reports");
    let product_form = reports.pop().expect("two reports");
    Ok(IdentityReport {
        product_form,
        telescoped_form,
    })
}

/// The substituted variables `y_i = A_i / A_{i+1}` and the constant
/// `c_n = 1 - sum_{i<n} W_i w_n / (W_{n-1} W_n)`.
#[derive(Debug, Clone, Serialize)]
pub struct ReformulationView {
    pub y: Vec<Scalar>,
    #[serde(serialize_with = "serialize_rational")]
    pub c_n: Rational,
}

fn serialize_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl ReformulationView {
    /// Builds the view from `y` directly. Rejects ratios for which some
    /// factor `W_{i+1} - W_i y_i` is not positive; genuine prefix means never
    /// produce one.
    pub fn from_ratios(w: &WeightSequence, y: Vec<Scalar>) -> Result<Self> {
        let n = y.len() + 1;
        check_index(n, 2, w.len())?;
        for (idx, yi) in y.iter().enumerate() {
            let i = idx + 1;
            let factor = &Scalar::from_rational(&w.big_w(i + 1), yi.prec()) - &yi.mul_rational(&w.big_w(i));
            if !factor.is_certainly_positive() {
                return Err(Error::InvalidEntry {
                    index: idx,
                    value: yi.to_string(),
                    reason: "W_{i+1} - W_i y_i must be positive",
                });
            }
        }
        let big_w_n = w.big_w(n);
        let big_w_prev = w.big_w(n - 1);
        let denom = Rational::from(&big_w_prev * &big_w_n);
        let mut c_n = Rational::from(1);
        for i in 1..n {
            c_n -= Rational::from(&w.big_w(i) * w.w(n)) / &denom;
        }
        Ok(ReformulationView { y, c_n })
    }

    /// The view for the prefix of length `n` of `x`.
    pub fn from_instance(w: &WeightSequence, x: &PositiveVector, n: usize, prec: u32) -> Result<Self> {
        check_dims(w, x)?;
        check_index(n, 2, x.len())?;
        let xs = x.scalars(prec);
        let a = prefix_means_scalar(w, &xs[..n], &Exponent::int(1), prec)?;
        let y = (0..n - 1).map(|i| a[i].div(&a[i + 1])).collect::<Result<Vec<_>>>()?;
        Self::from_ratios(w, y)
    }

    /// `F(y)`; the step inequality is equivalent to `F <= 1`.
    pub fn objective(&self, w: &WeightSequence, prec: u32) -> Result<Scalar> {
        let (first, second) = self.products(w, prec)?;
        let n = self.y.len() + 1;
        let big_w_n = w.big_w(n);
        let head = first.mul_rational(&Rational::from(&w.big_w(n - 1) / &big_w_n));
        let tail = second.mul_rational(&Rational::from(w.w(n) / &big_w_n));
        Ok(&head + &tail)
    }

    fn alpha(&self, w: &WeightSequence, i: usize) -> Rational {
        let n = self.y.len() + 1;
        Rational::from(&w.big_w(i) * w.w(n)) / Rational::from(&w.big_w(n - 1) * &w.big_w(n))
    }

    fn z(&self, w: &WeightSequence, i: usize, prec: u32) -> Result<Scalar> {
        let yi = &self.y[i - 1];
        (&Scalar::from_rational(&w.big_w(i + 1), prec) - &yi.mul_rational(&w.big_w(i))).div_rational(w.w(i + 1))
    }

    /// `prod y_i^{alpha_i}` and `prod z_i^{beta_i}` with
    /// `z_i = (W_{i+1} - W_i y_i)/w_{i+1}` and `beta_i = w_{i+1}/W_n`.
    fn products(&self, w: &WeightSequence, prec: u32) -> Result<(Scalar, Scalar)> {
        let n = self.y.len() + 1;
        let big_w_n = w.big_w(n);
        let mut first = Scalar::one(prec);
        let mut second = Scalar::one(prec);
        for i in 1..n {
            first = &first * &self.y[i - 1].pow_rational(&self.alpha(w, i))?;
            if w.w(i + 1).is_zero() {
                continue;
            }
            let beta = Rational::from(w.w(i + 1) / &big_w_n);
            second = &second * &self.z(w, i, prec)?.pow_rational(&beta)?;
        }
        Ok((first, second))
    }

    /// Arithmetic-mean upper bounds for the two products:
    /// `sum alpha_i y_i + c_n` and `sum beta_i z_i + w_1/W_n`.
    fn amgm_bounds(&self, w: &WeightSequence, prec: u32) -> Result<(Scalar, Scalar)> {
        let n = self.y.len() + 1;
        let big_w_n = w.big_w(n);
        let mut first = Scalar::from_rational(&self.c_n, prec);
        let mut second = Scalar::from_rational(&Rational::from(w.w(1) / &big_w_n), prec);
        for i in 1..n {
            first = &first + &self.y[i - 1].mul_rational(&self.alpha(w, i));
            if w.w(i + 1).is_zero() {
                continue;
            }
            let beta = Rational::from(w.w(i + 1) / &big_w_n);
            second = &second + &self.z(w, i, prec)?.mul_rational(&beta);
        }
        Ok((first, second))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReformulationReport {
    /// `F <= 1`.
    pub main: InequalityReport,
    /// `G_n(A_n) - (W_{n-1}/W_n) G_{n-1}(A_{n-1}) - (w_n/W_n) G_n`.
    pub difference_form: Scalar,
    /// `|difference_form - G_n(A_n)(1 - F)| / G_n(A_n)` at the base precision.
    pub relative_residual: f64,
    /// Whether `1 - F` and `difference_form` have the same sign (both
    /// undecided counts as agreement).
    pub signs_agree: bool,
    pub amgm_first: InequalityReport,
    pub amgm_second: InequalityReport,
    pub view: ReformulationView,
}

fn difference_form(w: &WeightSequence, xs: &[Scalar], n: usize, prec: u32) -> Result<(Scalar, Scalar)> {
    let one = Exponent::int(1);
    let geo = Exponent::Geometric;
    let a = prefix_means_scalar(w, &xs[..n], &one, prec)?;
    let g_n_of_a = weighted_power_mean(&w.normalized_prefix(n), &a, &geo, prec)?;
    let g_prev_of_a = weighted_power_mean(&w.normalized_prefix(n - 1), &a[..n - 1], &geo, prec)?;
    let g_n = weighted_power_mean(&w.normalized_prefix(n), &xs[..n], &geo, prec)?;
    let big_w_n = w.big_w(n);
    let t = &(&g_n_of_a - &g_prev_of_a.mul_rational(&Rational::from(&w.big_w(n - 1) / &big_w_n)))
        - &g_n.mul_rational(&Rational::from(w.w(n) / &big_w_n));
    Ok((t, g_n_of_a))
}

/// Evaluates `F(y) <= 1`, checks it against the difference form it was
/// derived from, and checks the two arithmetic-geometric mean bounds whose
/// sum gives `F <= 1`.
pub fn reformulation_equivalence_check(
    w: &WeightSequence,
    x: &PositiveVector,
    n: usize,
    cfg: &CheckConfig,
) -> Result<ReformulationReport> {
    check_dims(w, x)?;
    check_index(n, 2, x.len())?;
    if !holland_condition(w, n)? {
        return Err(Error::Precondition("weights fail the Holland condition".into()));
    }
    let prec = cfg.precision;
    let view = ReformulationView::from_instance(w, x, n, prec)?;
    let instance = base_instance(w, x).with_n(n);

    let main = decide(cfg, Relation::Le, instance.clone(), |p| {
        let v = ReformulationView::from_instance(w, x, n, p)?;
        Ok(Sides::new(v.objective(w, p)?, Scalar::one(p)))
    })?;
    let amgm_first = decide(cfg, Relation::Le, instance.clone().with_param("bound", "first"), |p| {
        let v = ReformulationView::from_instance(w, x, n, p)?;
        let (prod, _) = v.products(w, p)?;
        let (bound, _) = v.amgm_bounds(w, p)?;
        Ok(Sides::new(prod, bound))
    })?;
    let amgm_second = decide(cfg, Relation::Le, instance.with_param("bound", "second"), |p| {
        let v = ReformulationView::from_instance(w, x, n, p)?;
        let (_, prod) = v.products(w, p)?;
        let (_, bound) = v.amgm_bounds(w, p)?;
        Ok(Sides::new(prod, bound))
    })?;

    let xs = x.scalars(prec);
    let (t, g_of_a) = difference_form(w, &xs, n, prec)?;
    let one_minus_f = &Scalar::one(prec) - &view.objective(w, prec)?;
    let predicted = &g_of_a * &one_minus_f;
    let residual = (&t - &predicted).div(&g_of_a)?;
    let relative_residual = residual.to_f64().abs();
    let signs_agree = match (main.margin.certain_sign(), t.certain_sign()) {
        (Some(a), Some(b)) => a == b,
        (None, None) => true,
        (Some(std::cmp::Ordering::Equal), None) | (None, Some(std::cmp::Ordering::Equal)) => true,
        _ => false,
    };
    Ok(ReformulationReport {
        main,
        difference_form: t,
        relative_residual,
        signs_agree,
        amgm_first,
        amgm_second,
        view,
    })
}

/// Two `m x m` non-negative matrices, a non-negative vector and an exponent
/// `p > 0` for the general mixed-mean inequality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralMixedInstance {
    a: Vec<Vec<Rational>>,
    b: Vec<Vec<Rational>>,
    x: Vec<Rational>,
    p: Rational,
}

impl GeneralMixedInstance {
    pub fn new(a: Vec<Vec<Rational>>, b: Vec<Vec<Rational>>, x: Vec<Rational>, p: Rational) -> Result<Self> {
        let m = x.len();
        if m == 0 {
            return Err(Error::Empty);
        }
        for mat in [&a, &b] {
            if mat.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: mat.len(),
                });
            }
            for row in mat.iter() {
                if row.len() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        got: row.len(),
                    });
                }
                if row.iter().any(|v| v.cmp0() == std::cmp::Ordering::Less) {
                    return Err(Error::InvalidArgument("matrix entries must be non-negative".into()));
                }
            }
        }
        if x.iter().any(|v| v.cmp0() == std::cmp::Ordering::Less) {
            return Err(Error::InvalidArgument("x must be non-negative".into()));
        }
        if p.cmp0() != std::cmp::Ordering::Greater {
            return Err(Error::InvalidArgument("p must be positive".into()));
        }
        Ok(GeneralMixedInstance { a, b, x, p })
    }

    /// Row `n` of `A` is `w_k / W_n` for `k <= n`, zero beyond.
    pub fn weighted_mean_matrix(w: &WeightSequence) -> Vec<Vec<Rational>> {
        let m = w.len();
        (1..=m)
            .map(|n| {
                let mut row = w.normalized_prefix(n);
                row.resize(m, Rational::new());
                row
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn instance(&self) -> Instance {
        let mut inst = Instance::from_x(&self.x).with_param("p", &self.p);
        inst.a = Some(self.a.iter().map(|r| texts(r)).collect());
        inst.b = Some(self.b.iter().map(|r| texts(r)).collect());
        inst
    }

    fn sides(&self, prec: u32) -> Result<Sides> {
        let m = self.dim();
        let xs: Vec<Scalar> = self.x.iter().map(|q| Scalar::from_rational(q, prec)).collect();
        let xp = xs.iter().map(|v| v.pow_rational(&self.p)).collect::<Result<Vec<_>>>()?;
        let inv_p = Rational::from(self.p.recip_ref());
        let dot = |row: &[Rational], v: &[Scalar]| {
            let parts: Vec<Scalar> = row.iter().zip(v).map(|(c, s)| s.mul_rational(c)).collect();
            Scalar::sum(&parts, prec)
        };
        let last = m - 1;
        let mut lhs_parts = Vec::with_capacity(m);
        let mut rhs_parts = Vec::with_capacity(m);
        for n in 0..m {
            let bx = dot(&self.b[n], &xs);
            lhs_parts.push(bx.pow_rational(&self.p)?.mul_rational(&self.a[last][n]));
            let axp = dot(&self.a[n], &xp);
            rhs_parts.push(axp.pow_rational(&inv_p)?.mul_rational(&self.b[last][n]));
        }
        let lhs = Scalar::sum(&lhs_parts, prec).pow_rational(&inv_p)?;
        let rhs = Scalar::sum(&rhs_parts, prec);
        Ok(Sides::new(lhs, rhs))
    }
}

/// Evaluates the general mixed-mean inequality, `lhs <= rhs` for `p >= 1`
/// and reversed for `p < 1`. Arbitrary matrices may legitimately violate it.
pub fn general_mixed_check(inst: &GeneralMixedInstance, cfg: &CheckConfig) -> Result<InequalityReport> {
    let relation = if *inst.p() >= 1 { Relation::Le } else { Relation::Ge };
    decide(cfg, relation, inst.instance(), |p| inst.sides(p))
}
