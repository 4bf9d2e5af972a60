//! Random search over the open symmetric-mean question. The suite is
//! report-only: violations are listed, not treated as failures.
//!
//!     cargo run --release --example open_question_search

use mixmean::report::CheckConfig;
use mixmean::search::{search_counterexample, InequalityId, InstanceGenerator, SuiteParams, ValueDistribution};

fn main() -> mixmean::Result<()> {
    let cfg = CheckConfig::default();
    for dist in [ValueDistribution::log_uniform(), ValueDistribution::Mixed] {
        let gen = InstanceGenerator::new(2, 8, 2024)?.with_distribution(dist)?;
        let rep = search_counterexample(InequalityId::OpenQuestion, &gen, &SuiteParams::default(), 2_000, &cfg)?;
        println!(
            "{dist}: {} trials, {} holds, {} equality, {} violated, worst relative margin {:.3e}",
            rep.trials,
            rep.holds,
            rep.equality,
            rep.violated,
            rep.worst_relative_margin.unwrap_or(f64::NAN)
        );
        if let Some(inst) = rep.violations.first() {
            println!("  first violation: {}", serde_json::to_string(inst).unwrap());
        }
    }
    Ok(())
}
