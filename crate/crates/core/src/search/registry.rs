//! Named inequalities: how to draw a trial instance for each and how to
//! evaluate a (possibly replayed) instance.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rug::Rational;
use serde::{Deserialize, Serialize};

use super::generate::{quantize, InstanceGenerator};
use crate::error::{Error, Result};
use crate::hardy::{gamma_integers, hardy_constant_check};
use crate::means::{parse_rational, Exponent, Mode, PositiveVector, WeightSequence};
use crate::mixed::{
    holland_condition, holland_rado_check, nanjundiah_check, popoviciu_step_check, rado_step_check,
    reformulation_equivalence_check, reformulation_identity_check, GeneralMixedInstance,
};
use crate::report::{rationals, CheckConfig, InequalityReport, Instance, Relation, Verdict};
use crate::scalar::Scalar;
use crate::symmetric::{
    lemma83_check, marcus_lopes_check, open_question_check, symmetric_endpoint_check, symmetric_rado_check,
    tarnavas_check, ConvexFunctionSpec,
};

/// Residual allowed in the identity suite, relative to `G_n(A_n)`.
pub const IDENTITY_RESIDUAL: f64 = 7.888609052210118e-31; // 2^-100

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityId {
    Nanjundiah,
    Rado,
    Popoviciu,
    Holland,
    MarcusLopes,
    Tarnavas,
    Lemma83,
    SymmetricRado,
    OpenQuestion,
    Hardy3,
    Eq33,
    Identity16,
    GeneralMixed,
}

impl InequalityId {
    pub const ALL: [InequalityId; 13] = [
        InequalityId::Nanjundiah,
        InequalityId::Rado,
        InequalityId::Popoviciu,
        InequalityId::Holland,
        InequalityId::MarcusLopes,
        InequalityId::Tarnavas,
        InequalityId::Lemma83,
        InequalityId::SymmetricRado,
        InequalityId::OpenQuestion,
        InequalityId::Hardy3,
        InequalityId::Eq33,
        InequalityId::Identity16,
        InequalityId::GeneralMixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InequalityId::Nanjundiah => "nanjundiah",
            InequalityId::Rado => "rado",
            InequalityId::Popoviciu => "popoviciu",
            InequalityId::Holland => "holland",
            InequalityId::MarcusLopes => "marcus-lopes",
            InequalityId::Tarnavas => "tarnavas",
            InequalityId::Lemma83 => "lemma83",
            InequalityId::SymmetricRado => "symmetric-rado",
            InequalityId::OpenQuestion => "open-question",
            InequalityId::Hardy3 => "hardy3",
            InequalityId::Eq33 => "eq33",
            InequalityId::Identity16 => "identity16",
            InequalityId::GeneralMixed => "general-mixed",
        }
    }

    /// Suites whose violations are findings rather than failures: the open
    /// question, and the general form, which need not hold for arbitrary
    /// matrices.
    pub fn is_report_only(self) -> bool {
        matches!(self, InequalityId::OpenQuestion | InequalityId::GeneralMixed)
    }

    /// Smallest dimension the check accepts.
    pub fn min_n(self) -> usize {
        match self {
            InequalityId::Nanjundiah
            | InequalityId::Rado
            | InequalityId::Popoviciu
            | InequalityId::Holland
            | InequalityId::Tarnavas
            | InequalityId::Lemma83
            | InequalityId::SymmetricRado
            | InequalityId::Identity16 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InequalityId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = InequalityId::ALL.iter().map(|i| i.name()).collect();
                Error::Parse(format!("unknown inequality '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

/// Optional fixed parameters for a suite; unset ones take defaults or are
/// drawn per trial.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
}

impl SuiteParams {
    pub fn with_r(mut self, r: impl ToString) -> Self {
        self.r = Some(r.to_string());
        self
    }

    pub fn with_s(mut self, s: impl ToString) -> Self {
        self.s = Some(s.to_string());
        self
    }

    pub fn with_f(mut self, f: impl ToString) -> Self {
        self.f = Some(f.to_string());
        self
    }

    pub fn with_p(mut self, p: impl ToString) -> Self {
        self.p = Some(p.to_string());
        self
    }

    /// Parses every set field so bad input fails before any trial runs.
    pub fn validate(&self, id: InequalityId) -> Result<()> {
        if let Some(r) = &self.r {
            if id == InequalityId::MarcusLopes {
                r.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("order '{r}' is not a positive integer")))?;
            } else {
                r.parse::<Exponent>()?;
            }
        }
        if let Some(s) = &self.s {
            s.parse::<Exponent>()?;
        }
        if let Some(f) = &self.f {
            f.parse::<ConvexFunctionSpec>()?;
        }
        if let Some(p) = &self.p {
            let p = parse_rational(p)?;
            if p.cmp0().is_le() {
                return Err(Error::InvalidArgument("p must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Draws the instance for trial `trial`.
pub fn sample_instance(id: InequalityId, gen: &InstanceGenerator, params: &SuiteParams, trial: u64) -> Result<Instance> {
    let mut rng = gen.rng_for(trial);
    let sample = gen.sample_with(&mut rng)?;
    let n = sample.x.len();
    if n < id.min_n() {
        return Err(Error::InvalidArgument(format!("{id} needs n >= {}", id.min_n())));
    }
    let mut inst = Instance::from_x(sample.x.entries());
    if !sample.w.is_unit() {
        inst = inst.with_w(sample.w.weights());
    }
    match id {
        InequalityId::Nanjundiah => {
            let r = params.r.clone().unwrap_or_else(|| "1".into());
            let s = params.s.clone().unwrap_or_else(|| "geo".into());
            inst = inst.with_param("r", r).with_param("s", s);
        }
        InequalityId::Rado => {
            inst = inst.with_param("s", params.s.clone().unwrap_or_else(|| "geo".into()));
        }
        InequalityId::Tarnavas => {
            inst = inst.with_param("f", params.f.clone().unwrap_or_else(|| "square".into()));
        }
        InequalityId::MarcusLopes => {
            let y = gen.distribution.sample(&mut rng, n);
            let r = match &params.r {
                Some(r) => r.clone(),
                None => rng.random_range(1..=n).to_string(),
            };
            inst = inst.with_y(&y).with_param("r", r);
            inst.w = None;
        }
        InequalityId::GeneralMixed => {
            let matrix = |rng: &mut ChaCha8Rng| -> Vec<Vec<Rational>> {
                (0..n)
                    .map(|_| (0..n).map(|_| quantize(1.0 - rng.random::<f64>(), 16)).collect())
                    .collect()
            };
            let a = matrix(&mut rng);
            let b = matrix(&mut rng);
            let p = match &params.p {
                Some(p) => p.clone(),
                None => ["1/2", "2", "3"][rng.random_range(0..3)].to_string(),
            };
            let g = GeneralMixedInstance::new(a, b, sample.x.entries().to_vec(), parse_rational(&p)?)?;
            inst = g.instance();
        }
        _ => {}
    }
    Ok(inst)
}

fn verdict_rank(v: Verdict) -> u8 {
    match v {
        Verdict::Equality => 0,
        Verdict::Holds => 1,
        Verdict::Indeterminate => 2,
        Verdict::Violated => 3,
    }
}

/// Closer to failing: violations, then undecided reports, then the smallest
/// relative margin, equalities included.
pub fn closer_to_failure(a: &InequalityReport, b: &InequalityReport) -> bool {
    let rank = |v: Verdict| match v {
        Verdict::Violated => 2,
        Verdict::Indeterminate => 1,
        Verdict::Holds | Verdict::Equality => 0,
    };
    let (ra, rb) = (rank(a.verdict), rank(b.verdict));
    if ra != rb {
        return ra > rb;
    }
    a.relative_margin() < b.relative_margin()
}

/// Orders reports from least to most concerning: by verdict rank, then by
/// smaller relative margin.
pub fn more_concerning(a: &InequalityReport, b: &InequalityReport) -> bool {
    let (ra, rb) = (verdict_rank(a.verdict), verdict_rank(b.verdict));
    if ra != rb {
        return ra > rb;
    }
    a.relative_margin() < b.relative_margin()
}

/// The most concerning report of a non-empty list. A chain therefore reads
/// `Equality` only when every step is an equality.
pub fn worst_of(reports: Vec<InequalityReport>) -> InequalityReport {
    let mut iter = reports.into_iter();
    let mut worst = iter.next().expect("at least one report");
    for r in iter {
        if more_concerning(&r, &worst) {
            worst = r;
        }
    }
    worst
}

fn param<T: FromStr<Err = Error>>(inst: &Instance, key: &str, default: &str) -> Result<T> {
    inst.param(key).unwrap_or(default).parse()
}

fn weights_of(inst: &Instance, n: usize) -> Result<WeightSequence> {
    match inst.w_values() {
        Some(w) => WeightSequence::new(w),
        None => Ok(WeightSequence::unit(n)),
    }
}

fn step_indices(inst: &Instance, min: usize, len: usize) -> Vec<usize> {
    match inst.n {
        Some(n) => vec![n],
        None => (min..=len).collect(),
    }
}

fn chain<F>(inst: &Instance, len: usize, check: F) -> Result<InequalityReport>
where
    F: Fn(usize) -> Result<InequalityReport>,
{
    let reports = step_indices(inst, 2, len)
        .into_iter()
        .map(check)
        .collect::<Result<Vec<_>>>()?;
    Ok(worst_of(reports))
}

fn eq33_report(i: u32) -> Result<InequalityReport> {
    if i < 2 {
        return Err(Error::IndexOutOfRange {
            n: i as usize,
            min: 2,
            max: u32::MAX as usize,
        });
    }
    let (lhs, rhs) = gamma_integers(i);
    let verdict = match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => Verdict::Holds,
        std::cmp::Ordering::Equal => Verdict::Equality,
        std::cmp::Ordering::Less => Verdict::Violated,
    };
    // The verdict above came from the integers; these are for display.
    let l = Scalar::from_rational(&Rational::from(lhs), 128);
    let r = Scalar::from_rational(&Rational::from(rhs), 128);
    let margin = &l - &r;
    Ok(InequalityReport {
        lhs: l,
        rhs: r,
        relation: Relation::Ge,
        margin,
        verdict,
        precision: 128,
        instance: Instance::from_x(&[]).with_param("i", i),
    })
}

fn identity_report(x: &PositiveVector, w: &WeightSequence, cfg: &CheckConfig) -> Result<InequalityReport> {
    let n = x.len();
    let ids = reformulation_identity_check(w, x, cfg)?;
    let mut parts = vec![ids.product_form, ids.telescoped_form];
    let mut agree = true;
    let mut residual_ok = true;
    if holland_condition(w, n)? {
        let eq = reformulation_equivalence_check(w, x, n, cfg)?;
        agree = eq.signs_agree;
        residual_ok = eq.relative_residual <= IDENTITY_RESIDUAL;
    }
    let verdicts: Vec<Verdict> = parts.iter().map(|r| r.verdict).collect();
    let mut out = parts.remove(0);
    out.verdict = if verdicts.contains(&Verdict::Indeterminate) {
        Verdict::Indeterminate
    } else if verdicts.iter().all(|v| *v == Verdict::Equality) && agree && residual_ok {
        Verdict::Equality
    } else {
        Verdict::Violated
    };
    Ok(out)
}

/// Evaluates `inst` as an instance of `id`. Instances without `n` run every
/// step of a chain and return the most concerning one.
pub fn evaluate(id: InequalityId, inst: &Instance, cfg: &CheckConfig) -> Result<InequalityReport> {
    if id == InequalityId::Eq33 {
        let i: u32 = inst
            .param("i")
            .ok_or_else(|| Error::InvalidArgument("eq33 instances need the parameter i".into()))?
            .parse()
            .map_err(|_| Error::Parse("i must be a positive integer".into()))?;
        return eq33_report(i);
    }
    let mode = match id {
        InequalityId::Hardy3 | InequalityId::GeneralMixed => Mode::NonNegative,
        _ => Mode::Strict,
    };
    let x = PositiveVector::with_mode(inst.x_values(), mode)?;
    let len = x.len();
    let w = weights_of(inst, len)?;
    match id {
        InequalityId::Nanjundiah => {
            let r: Exponent = param(inst, "r", "1")?;
            let s: Exponent = param(inst, "s", "geo")?;
            nanjundiah_check(&w, &x, &r, &s, cfg)
        }
        InequalityId::Rado => {
            let s: Exponent = param(inst, "s", "geo")?;
            chain(inst, len, |m| rado_step_check(&w, &x, &s, m, cfg))
        }
        InequalityId::Popoviciu => chain(inst, len, |m| popoviciu_step_check(&w, &x, m, cfg)),
        InequalityId::Holland => chain(inst, len, |m| holland_rado_check(&w, &x, m, cfg)),
        InequalityId::MarcusLopes => {
            let y = inst
                .y_values()
                .ok_or_else(|| Error::InvalidArgument("marcus-lopes instances need y".into()))?;
            let y = PositiveVector::new(y)?;
            let r: usize = inst
                .param("r")
                .ok_or_else(|| Error::InvalidArgument("marcus-lopes instances need the order r".into()))?
                .parse()
                .map_err(|_| Error::Parse("r must be a positive integer".into()))?;
            marcus_lopes_check(&x, &y, r, cfg)
        }
        InequalityId::Tarnavas => {
            let f: ConvexFunctionSpec = param(inst, "f", "square")?;
            tarnavas_check(&w, &x, &f, inst.n.unwrap_or(len), cfg)
        }
        InequalityId::Lemma83 => lemma83_check(&x, inst.n.unwrap_or(len), cfg),
        InequalityId::SymmetricRado => {
            let mut reports = step_indices(inst, 2, len)
                .into_iter()
                .map(|m| symmetric_rado_check(&x, m, cfg))
                .collect::<Result<Vec<_>>>()?;
            if inst.n.is_none() {
                reports.push(symmetric_endpoint_check(&x, len, cfg)?);
            }
            Ok(worst_of(reports))
        }
        InequalityId::OpenQuestion => open_question_check(&x, inst.n.unwrap_or(len), cfg),
        InequalityId::Hardy3 => Ok(hardy_constant_check(&x, cfg)?.report),
        InequalityId::Identity16 => identity_report(&x, &w, cfg),
        InequalityId::GeneralMixed => {
            let a = inst
                .a
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("general-mixed instances need matrix a".into()))?;
            let b = inst
                .b
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("general-mixed instances need matrix b".into()))?;
            let p = parse_rational(
                inst.param("p")
                    .ok_or_else(|| Error::InvalidArgument("general-mixed instances need p".into()))?,
            )?;
            let g = GeneralMixedInstance::new(
                a.iter().map(|r| rationals(r)).collect(),
                b.iter().map(|r| rationals(r)).collect(),
                inst.x_values(),
                p,
            )?;
            crate::mixed::general_mixed_check(&g, cfg)
        }
        InequalityId::Eq33 => unreachable!("handled above"),
    }
}
