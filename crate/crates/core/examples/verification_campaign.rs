//! Every theorem suite over random instances, with the JSON report of one.
//!
//!     cargo run --release --example verification_campaign

use mixmean::report::CheckConfig;
use mixmean::search::{run_eq33, search_counterexample, InequalityId, InstanceGenerator, SuiteParams, WeightMode};

fn main() -> mixmean::Result<()> {
    let cfg = CheckConfig::default();
    for id in InequalityId::ALL {
        let rep = if id == InequalityId::Eq33 {
            run_eq33(2_000, &cfg)?
        } else {
            let weights = if id == InequalityId::Holland { WeightMode::Nanjundiah } else { WeightMode::Unit };
            let gen = InstanceGenerator::new(id.min_n(), 8, 11)?.with_weights(weights)?;
            search_counterexample(id, &gen, &SuiteParams::default(), 300, &cfg)?
        };
        println!(
            "{:<22} trials {:>5}  holds {:>5}  equality {:>4}  violated {:>3}  indeterminate {:>3}{}",
            id.name(),
            rep.trials,
            rep.holds,
            rep.equality,
            rep.violated,
            rep.indeterminate,
            if rep.report_only { "  (report only)" } else { "" }
        );
    }

    let gen = InstanceGenerator::new(2, 4, 1)?;
    let rep = search_counterexample(InequalityId::Nanjundiah, &gen, &SuiteParams::default(), 5, &cfg)?;
    println!("{}", rep.to_json());
    Ok(())
}
