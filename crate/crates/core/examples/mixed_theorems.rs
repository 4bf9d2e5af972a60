//! The weighted mixed-mean inequalities: the mixed inequality itself,
//! the Rado and Popoviciu steps, the Holland chain and the convex-function
//! generalization.
//!
//!     cargo run --example mixed_theorems

use mixmean::means::{parse_rational_list, Exponent, PositiveVector, WeightSequence};
use mixmean::mixed::{
    holland_condition, holland_rado_check, mixed_mean, nanjundiah_check, nanjundiah_condition,
    popoviciu_step_check, rado_differences, rado_step_check,
};
use mixmean::report::CheckConfig;
use mixmean::symmetric::{tarnavas_check, ConvexFunctionSpec};

fn main() -> mixmean::Result<()> {
    let cfg = CheckConfig::default();
    let prec = cfg.precision;
    let x = PositiveVector::new(parse_rational_list("3,1/2,7,2,1/10")?)?;
    let w = WeightSequence::from_ints(&[1, 1, 1, 1, 1])?;
    let n = x.len();

    let r = Exponent::int(1);
    let s = Exponent::Geometric;
    println!("M_s(M_r) = {}", mixed_mean(&w, &x, &s, &r, prec)?);
    println!("M_r(M_s) = {}", mixed_mean(&w, &x, &r, &s, prec)?);
    let rep = nanjundiah_check(&w, &x, &r, &s, &cfg)?;
    println!("mixed inequality: {} (relative margin {:.3e})", rep.verdict, rep.relative_margin());

    // Weights growing fast enough still satisfy the condition.
    let heavy = WeightSequence::from_ints(&[1, 2, 3, 4, 5])?;
    println!("condition at n={n}: unit {}, 1..5 {}", nanjundiah_condition(&w, n)?, nanjundiah_condition(&heavy, n)?);
    let bad = WeightSequence::from_ints(&[1, 1, 100, 1, 1])?;
    println!("condition for 1,1,100,1,1 at n=3: {}", nanjundiah_condition(&bad, 3)?);
    if let Err(e) = nanjundiah_check(&bad.truncated(3)?, &x.prefix(3)?, &r, &s, &cfg) {
        println!("  -> refused: {e}");
    }

    for (m, d) in rado_differences(&w, &x, &s, prec)?.iter().enumerate() {
        println!("D_{} = {d}", m + 1);
    }
    for s in ["1/2", "2"] {
        let e: Exponent = s.parse()?;
        let rep = rado_step_check(&w, &x, &e, n, &cfg)?;
        println!("Rado step s={s}: {}", rep.verdict);
    }
    println!("Popoviciu step: {}", popoviciu_step_check(&w, &x, n, &cfg)?.verdict);

    println!("Holland condition: {}", holland_condition(&w, n)?);
    println!("Holland chain step: {}", holland_rado_check(&w, &x, n, &cfg)?.verdict);

    for spec in ["square", "exp", "pow:3", "-neglog"] {
        let f: ConvexFunctionSpec = spec.parse()?;
        let rep = tarnavas_check(&w, &x, &f, n, &cfg)?;
        println!("convex form with {f}: {}", rep.verdict);
    }
    Ok(())
}
