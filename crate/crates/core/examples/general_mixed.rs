//! The general mixed-mean inequality for arbitrary nonnegative matrices.
//! Weighted-mean matrices satisfy it; arbitrary ones need not.
//!
//!     cargo run --example general_mixed

use mixmean::means::{parse_rational_list, WeightSequence};
use mixmean::mixed::{general_mixed_check, GeneralMixedInstance};
use mixmean::report::CheckConfig;
use rug::Rational;

fn main() -> mixmean::Result<()> {
    let cfg = CheckConfig::default();
    let x = parse_rational_list("4,1,9,2")?;
    let w = WeightSequence::from_ints(&[1, 1, 1, 1])?;
    let a = GeneralMixedInstance::weighted_mean_matrix(&w);

    for p in ["1/2", "2", "3"] {
        let p: Rational = p.parse().unwrap();
        let inst = GeneralMixedInstance::new(a.clone(), a.clone(), x.clone(), p.clone())?;
        let rep = general_mixed_check(&inst, &cfg)?;
        println!("weighted-mean matrices, p={p}: {} (lhs {}, rhs {})", rep.verdict, rep.lhs, rep.rhs);
    }

    // A reversal matrix for B is outside the hypotheses and breaks it.
    let reversal: Vec<Vec<Rational>> = (0..4)
        .map(|i| (0..4).map(|j| Rational::from(u32::from(i + j == 3))).collect())
        .collect();
    let inst = GeneralMixedInstance::new(a, reversal, x, Rational::from(2))?;
    let rep = general_mixed_check(&inst, &cfg)?;
    println!("B reversed, p=2: {} (margin {})", rep.verdict, rep.margin);
    Ok(())
}
