//! Seeded random instances. Trial `t` draws from its own ChaCha stream
//! derived from `(seed, t)`, so results do not depend on evaluation order.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::means::{PositiveVector, WeightSequence};
use crate::mixed::{holland_condition, nanjundiah_condition};

/// Significant bits kept when turning a sampled float into a rational.
const VALUE_BITS: i32 = 40;
const WEIGHT_BITS: i32 = 16;

pub const DEFAULT_RETRY_BUDGET: usize = 10_000;

/// Rounds `v > 0` to `bits` significant bits and returns it exactly.
pub fn quantize(v: f64, bits: i32) -> Rational {
    assert!(v.is_finite() && v > 0.0, "quantize needs a positive finite value, got {v}");
    let e = v.log2().floor() as i32;
    let shift = bits - 1 - e;
    let scaled = (v * 2f64.powi(shift)).round();
    let mut q = Rational::from_f64(scaled).expect("finite");
    if shift >= 0 {
        q >>= shift as u32;
    } else {
        q <<= (-shift) as u32;
    }
    q
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    (a + (b - a) * rng.random::<f64>()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ValueDistribution {
    LogUniform { lo: f64, hi: f64 },
    Uniform { lo: f64, hi: f64 },
    /// A common log-uniform base times `1 + rel u`, `u` uniform in `[-1, 1]`,
    /// with `rel` log-uniform in `[rel_lo, rel_hi]`.
    NearConstant { rel_lo: f64, rel_hi: f64 },
    /// `c k^(-alpha)` with `alpha` uniform in `[alpha_lo, alpha_hi]`.
    Decaying { alpha_lo: f64, alpha_hi: f64 },
    /// One of the four defaults above, chosen per instance.
    Mixed,
}

impl ValueDistribution {
    pub fn log_uniform() -> Self {
        ValueDistribution::LogUniform { lo: 1e-6, hi: 1e6 }
    }

    pub fn uniform() -> Self {
        ValueDistribution::Uniform { lo: 0.0, hi: 1.0 }
    }

    pub fn near_constant() -> Self {
        ValueDistribution::NearConstant {
            rel_lo: 1e-9,
            rel_hi: 1e-2,
        }
    }

    pub fn decaying() -> Self {
        ValueDistribution::Decaying {
            alpha_lo: 0.5,
            alpha_hi: 2.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            ValueDistribution::LogUniform { lo, hi } => lo > 0.0 && lo <= hi && hi.is_finite(),
            ValueDistribution::Uniform { lo, hi } => lo >= 0.0 && lo < hi && hi.is_finite(),
            ValueDistribution::NearConstant { rel_lo, rel_hi } => rel_lo > 0.0 && rel_lo <= rel_hi && rel_hi < 1.0,
            ValueDistribution::Decaying { alpha_lo, alpha_hi } => alpha_lo <= alpha_hi && alpha_hi.is_finite(),
            ValueDistribution::Mixed => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bad distribution parameters: {self:?}")))
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
        match *self {
            ValueDistribution::LogUniform { lo, hi } => (0..n)
                .map(|_| quantize(log_uniform(rng, lo, hi), VALUE_BITS))
                .collect(),
            ValueDistribution::Uniform { lo, hi } => (0..n)
                .map(|_| {
                    // 1 - u lies in (0, 1], so lo = 0 never yields a zero entry.
                    let u = 1.0 - rng.random::<f64>();
                    quantize(lo + (hi - lo) * u, VALUE_BITS)
                })
                .collect(),
            ValueDistribution::NearConstant { rel_lo, rel_hi } => {
                let base = log_uniform(rng, 1e-3, 1e3);
                let rel = log_uniform(rng, rel_lo, rel_hi);
                (0..n)
                    .map(|_| {
                        let u = 2.0 * rng.random::<f64>() - 1.0;
                        quantize(base * (1.0 + rel * u), VALUE_BITS)
                    })
                    .collect()
            }
            ValueDistribution::Decaying { alpha_lo, alpha_hi } => {
                let c = log_uniform(rng, 1e-3, 1e3);
                let alpha = alpha_lo + (alpha_hi - alpha_lo) * rng.random::<f64>();
                (1..=n)
                    .map(|k| quantize(c * (k as f64).powf(-alpha), VALUE_BITS))
                    .collect()
            }
            ValueDistribution::Mixed => {
                let pick = match rng.random_range(0..4) {
                    0 => Self::log_uniform(),
                    1 => Self::uniform(),
                    2 => Self::near_constant(),
                    _ => Self::decaying(),
                };
                pick.sample(rng, n)
            }
        }
    }
}

impl fmt::Display for ValueDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueDistribution::LogUniform { .. } => "log-uniform",
            ValueDistribution::Uniform { .. } => "uniform",
            ValueDistribution::NearConstant { .. } => "near-constant",
            ValueDistribution::Decaying { .. } => "decaying",
            ValueDistribution::Mixed => "mixed",
        })
    }
}

impl FromStr for ValueDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-uniform" => Ok(Self::log_uniform()),
            "uniform" => Ok(Self::uniform()),
            "near-constant" => Ok(Self::near_constant()),
            "decaying" => Ok(Self::decaying()),
            "mixed" => Ok(ValueDistribution::Mixed),
            _ => Err(Error::Parse(format!(
                "unknown distribution '{s}' (expected log-uniform, uniform, near-constant, decaying or mixed)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    Unit,
    /// Every prefix satisfies the Nanjundiah condition.
    Nanjundiah,
    /// The Holland condition holds at `n` while the Nanjundiah condition
    /// fails there. Needs `n >= 3`.
    HollandOnly,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::Unit => "unit",
            WeightMode::Nanjundiah => "nanjundiah",
            WeightMode::HollandOnly => "holland-only",
        })
    }
}

impl FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(WeightMode::Unit),
            "nanjundiah" => Ok(WeightMode::Nanjundiah),
            "holland-only" | "holland" => Ok(WeightMode::HollandOnly),
            _ => Err(Error::Parse(format!(
                "unknown weight mode '{s}' (expected unit, nanjundiah or holland-only)"
            ))),
        }
    }
}

/// A generated vector and its weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub x: PositiveVector,
    pub w: WeightSequence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceGenerator {
    pub n_min: usize,
    pub n_max: usize,
    pub distribution: ValueDistribution,
    pub weights: WeightMode,
    pub seed: u64,
    pub retry_budget: usize,
}

impl InstanceGenerator {
    pub fn new(n_min: usize, n_max: usize, seed: u64) -> Result<Self> {
        InstanceGenerator {
            n_min,
            n_max,
            distribution: ValueDistribution::log_uniform(),
            weights: WeightMode::Unit,
            seed,
            retry_budget: DEFAULT_RETRY_BUDGET,
        }
        .validated()
    }

    pub fn with_distribution(mut self, d: ValueDistribution) -> Result<Self> {
        self.distribution = d;
        self.validated()
    }

    pub fn with_weights(mut self, mode: WeightMode) -> Result<Self> {
        self.weights = mode;
        self.validated()
    }

    pub fn with_retry_budget(mut self, budget: usize) -> Result<Self> {
        self.retry_budget = budget;
        self.validated()
    }

    pub fn with_n_range(mut self, n_min: usize, n_max: usize) -> Result<Self> {
        self.n_min = n_min;
        self.n_max = n_max;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::InvalidArgument(format!(
                "bad n range {}..={}",
                self.n_min, self.n_max
            )));
        }
        if self.weights == WeightMode::HollandOnly && self.n_min < 3 {
            return Err(Error::InvalidArgument(
                "holland-only weights need n >= 3 (both conditions are vacuous below)".into(),
            ));
        }
        if self.retry_budget == 0 {
            return Err(Error::InvalidArgument("retry budget must be positive".into()));
        }
        self.distribution.validate()?;
        Ok(self)
    }

    /// The random stream owned by trial `trial`.
    pub fn rng_for(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }

    /// Draws a sample from `rng`; callers may keep drawing from the same
    /// stream for extra data.
    pub fn sample_with(&self, rng: &mut ChaCha8Rng) -> Result<Sample> {
        let n = rng.random_range(self.n_min..=self.n_max);
        let w = match self.weights {
            WeightMode::Unit => WeightSequence::unit(n),
            WeightMode::Nanjundiah => self.nanjundiah_weights(rng, n)?,
            WeightMode::HollandOnly => self.holland_only_weights(rng, n)?,
        };
        let x = PositiveVector::new(self.distribution.sample(rng, n))?;
        Ok(Sample { x, w })
    }

    pub fn sample(&self, trial: u64) -> Result<Sample> {
        self.sample_with(&mut self.rng_for(trial))
    }

    /// `count` samples for trials `0..count`.
    pub fn generate(&self, count: u64) -> impl Iterator<Item = Result<Sample>> + '_ {
        (0..count).map(move |t| self.sample(t))
    }

    fn first_weight(rng: &mut ChaCha8Rng) -> Rational {
        quantize(log_uniform(rng, 0.125, 8.0), WEIGHT_BITS)
    }

    /// Coordinate by coordinate: propose `w_m` near the largest value the
    /// condition allows and keep it only if the exact predicate accepts.
    fn nanjundiah_weights(&self, rng: &mut ChaCha8Rng, n: usize) -> Result<WeightSequence> {
        let mut w = vec![Self::first_weight(rng)];
        let mut big_w = w[0].to_f64();
        // min over k >= 2 of w_k / W_k so far
        let mut rho = f64::INFINITY;
        for m in 2..=n {
            let cap = if rho.is_finite() { rho / (1.0 - rho) } else { 4.0 };
            let mut accepted = None;
            for _ in 0..self.retry_budget {
                let t = log_uniform(rng, cap / 16.0, cap * 1.25);
                let candidate = quantize(big_w * t, WEIGHT_BITS);
                w.push(candidate);
                let seq = WeightSequence::new(w.clone())?;
                if nanjundiah_condition(&seq, m)? {
                    accepted = w.pop();
                    break;
                }
                w.pop();
            }
            let wm = accepted.ok_or(Error::RetryBudgetExhausted {
                what: "Nanjundiah weights",
                budget: self.retry_budget,
            })?;
            let wm_f = wm.to_f64();
            w.push(wm);
            big_w += wm_f;
            rho = rho.min(wm_f / big_w);
        }
        WeightSequence::new(w)
    }

    /// Whole sequences, kept when Holland holds at `n` and Nanjundiah fails.
    fn holland_only_weights(&self, rng: &mut ChaCha8Rng, n: usize) -> Result<WeightSequence> {
        for _ in 0..self.retry_budget {
            let mut w = vec![Self::first_weight(rng)];
            let mut big_w = w[0].to_f64();
            for _ in 2..=n {
                let wk = quantize(big_w * log_uniform(rng, 0.125, 2.0), WEIGHT_BITS);
                big_w += wk.to_f64();
                w.push(wk);
            }
            let seq = WeightSequence::new(w)?;
            if holland_condition(&seq, n)? && !nanjundiah_condition(&seq, n)? {
                return Ok(seq);
            }
        }
        Err(Error::RetryBudgetExhausted {
            what: "Holland-only weights",
            budget: self.retry_budget,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixed::nanjundiah_condition_prefixwise;

    #[test]
    fn quantize_is_close_and_exact() {
        for v in [1e-6, 0.3, 1.0, 7.25, 123456.789, 1e6] {
            let q = quantize(v, 40);
            assert!((q.to_f64() / v - 1.0).abs() < 1e-11);
        }
        assert_eq!(quantize(0.5, 16), Rational::from((1, 2)));
        assert_eq!(quantize(3.0, 16), Rational::from(3));
    }

    #[test]
    fn deterministic_and_order_independent() {
        let g = InstanceGenerator::new(2, 6, 42).unwrap();
        let a: Vec<_> = g.generate(5).map(|s| s.unwrap()).collect();
        let b: Vec<_> = g.generate(5).map(|s| s.unwrap()).collect();
        assert_eq!(a, b);
        assert_eq!(g.sample(3).unwrap(), a[3]);
        let other = InstanceGenerator::new(2, 6, 43).unwrap();
        assert_ne!(other.sample(0).unwrap(), a[0]);
    }

    #[test]
    fn ranges_respected() {
        let g = InstanceGenerator::new(3, 5, 1).unwrap();
        for s in g.generate(50) {
            let s = s.unwrap();
            assert!((3..=5).contains(&s.x.len()));
            assert_eq!(s.w.len(), s.x.len());
            assert!(s.x.entries().iter().all(|v| *v >= 1e-6 * 0.999 && *v <= 1e6 * 1.001));
        }
    }

    #[test]
    fn weight_modes() {
        let g = InstanceGenerator::new(2, 10, 7)
            .unwrap()
            .with_weights(WeightMode::Nanjundiah)
            .unwrap();
        for s in g.generate(100) {
            let s = s.unwrap();
            assert!(nanjundiah_condition_prefixwise(&s.w, s.w.len()).unwrap());
        }
        let h = InstanceGenerator::new(3, 10, 7)
            .unwrap()
            .with_weights(WeightMode::HollandOnly)
            .unwrap();
        for s in h.generate(100) {
            let s = s.unwrap();
            let n = s.w.len();
            assert!(holland_condition(&s.w, n).unwrap());
            assert!(!nanjundiah_condition(&s.w, n).unwrap());
        }
        assert!(InstanceGenerator::new(2, 4, 0)
            .unwrap()
            .with_weights(WeightMode::HollandOnly)
            .is_err());
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let g = InstanceGenerator::new(10, 10, 3)
            .unwrap()
            .with_weights(WeightMode::HollandOnly)
            .unwrap()
            .with_retry_budget(1)
            .unwrap();
        let failures = g.generate(20).filter(|s| s.is_err()).count();
        assert!(failures > 0);
        assert!(g
            .generate(20)
            .filter_map(|s| s.err())
            .all(|e| matches!(e, Error::RetryBudgetExhausted { .. })));
    }

    #[test]
    fn distributions_parse_and_sample() {
        for name in ["log-uniform", "uniform", "near-constant", "decaying", "mixed"] {
            let d: ValueDistribution = name.parse().unwrap();
            assert_eq!(d.to_string(), name);
            let g = InstanceGenerator::new(1, 8, 11).unwrap().with_distribution(d).unwrap();
            for s in g.generate(20) {
                assert!(s.unwrap().x.entries().iter().all(|v| v.cmp0().is_gt()));
            }
        }
        assert!("gaussian".parse::<ValueDistribution>().is_err());
    }
}
