//! Derivative-free maximization of scale-invariant objectives over positive
//! vectors, by coordinate ascent on `u = ln x`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use rug::Rational;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::generate::{quantize, InstanceGenerator, ValueDistribution};
use crate::error::{Error, Result};
use crate::hardy::hardy_ratio;
use crate::means::{Exponent, PositiveVector, WeightSequence};
use crate::mixed::{mixed_mean, rado_differences};
use crate::report::Instance;
use crate::scalar::Scalar;
use crate::symmetric::open_question_sides;

const U_BOUND: f64 = 200.0;
const VALUE_BITS: i32 = 40;
const MIN_STEP: f64 = 1e-3;
const MAX_STEP: f64 = 16.0;
const DECAY_EXPONENTS: [f64; 6] = [0.5, 0.8, 1.0, 1.2, 1.5, 2.0];
const RANDOM_RESTARTS: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptTarget {
    /// `S(x) / sum x`, bounded by 3.
    HardyRatio,
    /// `lhs / rhs - 1` of the open inequality; positive means a violation.
    OpenQuestionMargin,
    /// `(D_{n-1} - D_n) / (n A(G))` for unit weights and the geometric
    /// inner mean; positive means a violation.
    RadoGap,
}

impl OptTarget {
    pub fn name(self) -> &'static str {
        match self {
            OptTarget::HardyRatio => "hardy-ratio",
            OptTarget::OpenQuestionMargin => "open-question",
            OptTarget::RadoGap => "rado-gap",
        }
    }

    /// Values above this would contradict a theorem or answer the open
    /// question.
    pub fn threshold(self) -> f64 {
        match self {
            OptTarget::HardyRatio => 3.0,
            OptTarget::OpenQuestionMargin | OptTarget::RadoGap => 0.0,
        }
    }

    pub fn min_n(self) -> usize {
        match self {
            OptTarget::RadoGap => 2,
            _ => 1,
        }
    }

    pub fn evaluate(self, x: &PositiveVector, prec: u32) -> Result<Scalar> {
        match self {
            OptTarget::HardyRatio => Ok(hardy_ratio(x, prec)?.expect("positive entries")),
            OptTarget::OpenQuestionMargin => {
                let (lhs, rhs) = open_question_sides(x, x.len(), prec)?;
                Ok(&lhs.div(&rhs)? - &Scalar::one(prec))
            }
            OptTarget::RadoGap => {
                let n = x.len();
                let w = WeightSequence::unit(n);
                let d = rado_differences(&w, x, &Exponent::Geometric, prec)?;
                let scale = mixed_mean(&w, x, &Exponent::int(1), &Exponent::Geometric, prec)?
                    .mul_rational(&Rational::from(n as u64));
                (&d[n - 2] - &d[n - 1]).div(&scale)
            }
        }
    }
}

impl fmt::Display for OptTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hardy-ratio" => Ok(OptTarget::HardyRatio),
            "open-question" | "open-question-margin" => Ok(OptTarget::OpenQuestionMargin),
            "rado-gap" => Ok(OptTarget::RadoGap),
            _ => Err(Error::Parse(format!(
                "unknown target '{s}' (expected hardy-ratio, open-question or rado-gap)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: u64,
    pub best: f64,
    pub hash: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptReport {
    pub target: OptTarget,
    pub n: usize,
    pub seed: u64,
    pub budget: u64,
    pub precision: u32,
    pub evaluations: u64,
    pub restarts: usize,
    pub best_value: Scalar,
    pub best_f64: f64,
    pub best_instance: Instance,
    pub best_hash: String,
    pub improvements: usize,
    /// Visited points whose value provably exceeds the target's threshold.
    pub threshold_exceeded: u64,
    pub exceeding_instance: Option<Instance>,
    /// Global best-so-far after each improvement; written out as CSV.
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

impl OptReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// `iter,best,hash` rows.
    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "iter,best,hash")?;
        for row in &self.trace {
            writeln!(out, "{},{},{}", row.iter, row.best, row.hash)?;
        }
        Ok(())
    }
}

pub fn instance_hash(x: &[Rational]) -> String {
    let mut h = Sha256::new();
    for (i, v) in x.iter().enumerate() {
        if i > 0 {
            h.update(b",");
        }
        h.update(v.to_string().as_bytes());
    }
    hex::encode(&h.finalize()[..8])
}

fn to_vector(u: &[f64]) -> PositiveVector {
    let x = u.iter().map(|v| quantize(v.exp(), VALUE_BITS)).collect();
    PositiveVector::new(x).expect("exp is positive")
}

struct Point {
    value: Scalar,
    x: PositiveVector,
}

struct LocalRun {
    best: Point,
    /// (local evaluation index, value, hash) at each local improvement.
    improvements: Vec<(u64, Scalar, String)>,
    evaluations: u64,
    exceeded: u64,
    exceeding: Option<PositiveVector>,
}

fn ascend(target: OptTarget, start: Vec<f64>, budget: u64, prec: u32) -> Result<LocalRun> {
    let threshold = target.threshold();
    let mut u: Vec<f64> = start.into_iter().map(|v| v.clamp(-U_BOUND, U_BOUND)).collect();
    let mut evaluations = 0u64;
    let mut exceeded = 0u64;
    let mut exceeding = None;
    let mut eval = |u: &[f64], evaluations: &mut u64| -> Result<Point> {
        *evaluations += 1;
        let x = to_vector(u);
        let value = target.evaluate(&x, prec)?;
        if value.lower() > threshold {
            exceeded += 1;
            exceeding.get_or_insert_with(|| x.clone());
        }
        Ok(Point { value, x })
    };
    let mut best = eval(&u, &mut evaluations)?;
    let mut improvements = vec![(1, best.value.clone(), instance_hash(best.x.entries()))];
    let mut step = 1.0;
    'outer: while step >= MIN_STEP {
        let mut improved = false;
        for i in 0..u.len() {
            for dir in [1.0, -1.0] {
                if evaluations >= budget {
                    break 'outer;
                }
                let old = u[i];
                u[i] = (old + dir * step).clamp(-U_BOUND, U_BOUND);
                if u[i] == old {
                    continue;
                }
                let cand = eval(&u, &mut evaluations)?;
                if cand.value.value() > best.value.value() {
                    improvements.push((evaluations, cand.value.clone(), instance_hash(cand.x.entries())));
                    best = cand;
                    improved = true;
                    break;
                }
                u[i] = old;
            }
        }
        step = if improved { (step * 1.5).min(MAX_STEP) } else { step * 0.5 };
    }
    Ok(LocalRun {
        best,
        improvements,
        evaluations,
        exceeded,
        exceeding,
    })
}

fn starts(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; n]];
    for alpha in DECAY_EXPONENTS {
        out.push((1..=n).map(|k| -alpha * (k as f64).ln()).collect());
    }
    let gen = InstanceGenerator::new(n, n, seed)
        .and_then(|g| g.with_distribution(ValueDistribution::Mixed))
        .expect("valid generator");
    for r in 0..RANDOM_RESTARTS {
        let x = gen.sample(r).expect("unit weights never exhaust the budget").x;
        out.push(x.entries().iter().map(|v| v.to_f64().ln()).collect());
    }
    out
}

/// Maximizes `target` over positive vectors of dimension `n` using at most
/// `budget` evaluations, split across deterministic restarts.
pub fn maximize_ratio(target: OptTarget, n: usize, budget: u64, seed: u64, prec: u32) -> Result<OptReport> {
    if n < target.min_n() {
        return Err(Error::InvalidArgument(format!("{target} needs n >= {}", target.min_n())));
    }
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let mut all = starts(n, seed);
    all.truncate(budget.min(all.len() as u64) as usize);
    let per = budget / all.len() as u64;
    let runs = all
        .into_par_iter()
        .map(|s| ascend(target, s, per, prec))
        .collect::<Result<Vec<_>>>()?;

    let mut trace = Vec::new();
    let mut offset = 0u64;
    let mut best: Option<&Point> = None;
    let mut exceeded = 0;
    let mut exceeding = None;
    for run in &runs {
        for (local, value, hash) in &run.improvements {
            if best.is_none_or(|b| value.value() > b.value.value()) {
                trace.push(TraceRow {
                    iter: offset + local,
                    best: value.to_f64(),
                    hash: hash.clone(),
                });
            }
        }
        if best.is_none_or(|b| run.best.value.value() > b.value.value()) {
            best = Some(&run.best);
        }
        exceeded += run.exceeded;
        if exceeding.is_none() {
            exceeding = run.exceeding.as_ref().map(|x| Instance::from_x(x.entries()));
        }
        offset += run.evaluations;
    }
    let best = best.expect("at least one restart");
    Ok(OptReport {
        target,
        n,
        seed,
        budget,
        precision: prec,
        evaluations: offset,
        restarts: runs.len(),
        best_value: best.value.clone(),
        best_f64: best.value.to_f64(),
        best_instance: Instance::from_x(best.x.entries()),
        best_hash: instance_hash(best.x.entries()),
        improvements: trace.len(),
        threshold_exceeded: exceeded,
        exceeding_instance: exceeding,
        trace,
    })
}
