//! The ratio reformulation of the Holland chain: the product identity, the
//! objective `F(y) <= 1` and the two AM-GM bounds behind it.
//!
//!     cargo run --example holland_reformulation

use mixmean::means::{parse_rational_list, PositiveVector, WeightSequence};
use mixmean::mixed::{reformulation_equivalence_check, reformulation_identity_check};
use mixmean::report::CheckConfig;

fn main() -> mixmean::Result<()> {
    let cfg = CheckConfig::default();
    let x = PositiveVector::new(parse_rational_list("2,9,1/4,5,3")?)?;
    let w = WeightSequence::from_ints(&[1, 1, 1, 1, 1])?;

    let ident = reformulation_identity_check(&w, &x, &cfg)?;
    println!(
        "product form {} / telescoped form {}",
        ident.product_form.verdict, ident.telescoped_form.verdict
    );

    for n in 2..=x.len() {
        let r = reformulation_equivalence_check(&w, &x, n, &cfg)?;
        println!(
            "n={n}: F <= 1 {}, difference form {:.3e}, residual {:.1e}, AM-GM {} {}",
            r.main.verdict,
            r.difference_form.to_f64(),
            r.relative_residual,
            r.amgm_first.verdict,
            r.amgm_second.verdict
        );
        if n == x.len() {
            let y: Vec<String> = r.view.y.iter().map(|v| v.to_string()).collect();
            println!("  y = [{}]", y.join(", "));
            println!("  c_n = {}", r.view.c_n);
            println!("  F = {}", r.view.objective(&w, cfg.precision)?);
        }
    }
    Ok(())
}
