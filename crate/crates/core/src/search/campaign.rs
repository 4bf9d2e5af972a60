//! Running a named inequality over many generated instances.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::generate::{InstanceGenerator, ValueDistribution, WeightMode};
use super::registry::{evaluate, closer_to_failure, sample_instance, InequalityId, SuiteParams};
use crate::error::{Error, Result};
use crate::report::{CheckConfig, InequalityReport, Instance, Verdict};
use crate::scalar::Scalar;

/// Everything that determines a campaign's output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    pub precision: u32,
    pub equality_tol: f64,
    pub seed: u64,
    pub budget: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<ValueDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightMode>,
    pub params: SuiteParams,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub inequality: InequalityId,
    pub trials: u64,
    pub holds: u64,
    pub equality: u64,
    pub violated: u64,
    pub indeterminate: u64,
    pub worst_margin: Option<Scalar>,
    pub worst_relative_margin: Option<f64>,
    pub worst_verdict: Option<Verdict>,
    pub worst_instance: Option<Instance>,
    pub report_only: bool,
    /// Confirmed violations, replayable through `evaluate`.
    pub violations: Vec<Instance>,
    /// Largest `S(x) / sum x` seen, for the Hardy-type sum only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<f64>,
    pub config: SearchConfig,
    /// Not serialized, so equal seeds give byte-identical JSON.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SearchReport {
    fn empty(id: InequalityId, config: SearchConfig) -> Self {
        SearchReport {
            inequality: id,
            trials: 0,
            holds: 0,
            equality: 0,
            violated: 0,
            indeterminate: 0,
            worst_margin: None,
            worst_relative_margin: None,
            worst_verdict: None,
            worst_instance: None,
            report_only: id.is_report_only(),
            violations: Vec::new(),
            max_ratio: None,
            config,
            wall_time: Duration::ZERO,
        }
    }

    fn absorb(&mut self, report: InequalityReport, worst: &mut Option<InequalityReport>) {
        self.trials += 1;
        match report.verdict {
            Verdict::Holds => self.holds += 1,
            Verdict::Equality => self.equality += 1,
            Verdict::Violated => {
                self.violated += 1;
                self.violations.push(report.instance.clone());
            }
            Verdict::Indeterminate => self.indeterminate += 1,
        }
        if self.inequality == InequalityId::Hardy3 && !report.rhs.value().is_zero() {
            // rhs is 3 sum x
            let ratio = 3.0 * report.lhs.to_f64() / report.rhs.to_f64();
            self.max_ratio = Some(self.max_ratio.map_or(ratio, |m| m.max(ratio)));
        }
        if worst.as_ref().is_none_or(|w| closer_to_failure(&report, w)) {
            *worst = Some(report);
        }
    }

    fn finish(&mut self, worst: Option<InequalityReport>) {
        if let Some(w) = worst {
            self.worst_relative_margin = Some(w.relative_margin());
            self.worst_verdict = Some(w.verdict);
            self.worst_margin = Some(w.margin);
            self.worst_instance = Some(w.instance);
        }
    }

    /// No violations, or violations in a report-only suite.
    pub fn passed(&self) -> bool {
        self.violated == 0 || self.report_only
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Evaluates `id` on trials `0..budget`. Trials run in parallel; the
/// aggregation walks them in trial order.
pub fn search_counterexample(
    id: InequalityId,
    gen: &InstanceGenerator,
    params: &SuiteParams,
    budget: u64,
    cfg: &CheckConfig,
) -> Result<SearchReport> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    if id == InequalityId::Eq33 {
        return Err(Error::InvalidArgument("eq33 is not randomized; use run_eq33".into()));
    }
    params.validate(id)?;
    if gen.n_min < id.min_n() {
        return Err(Error::InvalidArgument(format!("{id} needs n_min >= {}", id.min_n())));
    }
    let start = Instant::now();
    let reports = (0..budget)
        .into_par_iter()
        .map(|t| {
            let inst = sample_instance(id, gen, params, t)?;
            evaluate(id, &inst, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let config = SearchConfig {
        precision: cfg.precision,
        equality_tol: cfg.equality_tol,
        seed: gen.seed,
        budget,
        n_min: Some(gen.n_min),
        n_max: Some(gen.n_max),
        distribution: Some(gen.distribution),
        weights: Some(gen.weights),
        params: params.clone(),
    };
    let mut out = SearchReport::empty(id, config);
    let mut worst = None;
    for r in reports {
        out.absorb(r, &mut worst);
    }
    out.finish(worst);
    out.wall_time = start.elapsed();
    Ok(out)
}

/// Checks the integer inequality behind `gamma_i >= 1/3` for `i = 2..=i_max`
/// in exact arithmetic. One trial per `i`.
pub fn run_eq33(i_max: u32, cfg: &CheckConfig) -> Result<SearchReport> {
    if i_max < 2 {
        return Err(Error::InvalidArgument(format!("i_max must be at least 2, got {i_max}")));
    }
    let start = Instant::now();
    let reports = (2..=i_max)
        .into_par_iter()
        .map(|i| evaluate(InequalityId::Eq33, &Instance::from_x(&[]).with_param("i", i), cfg))
        .collect::<Result<Vec<_>>>()?;
    let config = SearchConfig {
        precision: cfg.precision,
        equality_tol: cfg.equality_tol,
        seed: 0,
        budget: u64::from(i_max - 1),
        n_min: None,
        n_max: None,
        distribution: None,
        weights: None,
        params: SuiteParams::default(),
    };
    let mut out = SearchReport::empty(InequalityId::Eq33, config);
    let mut worst = None;
    for r in reports {
        out.absorb(r, &mut worst);
    }
    out.finish(worst);
    out.wall_time = start.elapsed();
    Ok(out)
}

/// Re-evaluates one persisted instance.
pub fn replay(id: InequalityId, inst: &Instance, cfg: &CheckConfig) -> Result<SearchReport> {
    let config = SearchConfig {
        precision: cfg.precision,
        equality_tol: cfg.equality_tol,
        seed: 0,
        budget: 1,
        n_min: None,
        n_max: None,
        distribution: None,
        weights: None,
        params: SuiteParams::default(),
    };
    let mut out = SearchReport::empty(id, config);
    let mut worst = None;
    out.absorb(evaluate(id, inst, cfg)?, &mut worst);
    out.finish(worst);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_sum_to_trials_and_json_is_stable() {
        let gen = InstanceGenerator::new(2, 5, 7).unwrap();
        let cfg = CheckConfig::default();
        let a = search_counterexample(InequalityId::Nanjundiah, &gen, &SuiteParams::default(), 40, &cfg).unwrap();
        assert_eq!(a.holds + a.equality + a.violated + a.indeterminate, a.trials);
        assert_eq!(a.trials, 40);
        assert_eq!(a.violated, 0);
        let b = search_counterexample(InequalityId::Nanjundiah, &gen, &SuiteParams::default(), 40, &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(!a.to_json().contains("wall_time"));
    }

    #[test]
    fn worst_instance_replays() {
        let gen = InstanceGenerator::new(2, 6, 3).unwrap();
        let cfg = CheckConfig::default();
        let r = search_counterexample(InequalityId::Rado, &gen, &SuiteParams::default(), 20, &cfg).unwrap();
        let inst = r.worst_instance.clone().unwrap();
        let again = replay(InequalityId::Rado, &inst, &cfg).unwrap();
        assert_eq!(again.worst_verdict, r.worst_verdict);
        assert_eq!(
            again.worst_margin.unwrap().to_string(),
            r.worst_margin.unwrap().to_string()
        );
    }

    #[test]
    fn eq33_small() {
        let r = run_eq33(200, &CheckConfig::default()).unwrap();
        assert_eq!(r.trials, 199);
        assert_eq!(r.equality, 1);
        assert_eq!(r.violated, 0);
        assert_eq!(r.worst_instance.unwrap().param("i"), Some("2"));
        assert!(run_eq33(1, &CheckConfig::default()).is_err());
    }

    #[test]
    fn hardy_ratio_is_tracked() {
        let gen = InstanceGenerator::new(1, 6, 1).unwrap();
        let r = search_counterexample(InequalityId::Hardy3, &gen, &SuiteParams::default(), 20, &CheckConfig::default())
            .unwrap();
        let m = r.max_ratio.unwrap();
        assert!((1.0..3.0).contains(&m));
    }

    #[test]
    fn rejects_bad_requests() {
        let gen = InstanceGenerator::new(1, 4, 1).unwrap();
        let cfg = CheckConfig::default();
        assert!(search_counterexample(InequalityId::Rado, &gen, &SuiteParams::default(), 5, &cfg).is_err());
        let gen2 = InstanceGenerator::new(2, 4, 1).unwrap();
        assert!(search_counterexample(InequalityId::Rado, &gen2, &SuiteParams::default(), 0, &cfg).is_err());
        assert!(search_counterexample(InequalityId::Eq33, &gen2, &SuiteParams::default(), 5, &cfg).is_err());
    }
}
