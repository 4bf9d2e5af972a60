//! The Hardy-type sum of next-to-top symmetric means and its constant 3:
//! the Knopp transform identity, the gamma coefficients, and the bound.
//!
//!     cargo run --release --example hardy_constant

use mixmean::hardy::{gamma_table, hardy_constant_check, knopp_sum_identity};
use mixmean::means::{parse_rational_list, PositiveVector};
use mixmean::report::CheckConfig;

fn main() -> mixmean::Result<()> {
    let x = PositiveVector::new(parse_rational_list("1,1/2,1/3,1/4,1/5")?)?;
    let k = knopp_sum_identity(&x);
    println!("sum a = {}  closed form = {}  identity {}", k.sum_a, k.closed_form, k.identity_holds());

    let table = gamma_table(10_000, 128)?;
    println!(
        "gamma_i >= 1/3 for i <= 10000: {} ({} equality rows, {} failing)",
        table.all_hold(),
        table.equality_rows().len(),
        table.failing_rows().len()
    );
    for row in &table.rows[..5] {
        println!("  gamma_{} = {}", row.i, row.gamma);
    }

    let cfg = CheckConfig::default();
    let harmonic: Vec<String> = (1..=200).map(|k| format!("1/{k}")).collect();
    let x = PositiveVector::new(parse_rational_list(&harmonic.join(","))?)?;
    let rep = hardy_constant_check(&x, &cfg)?;
    println!("harmonic, n=200: S <= 3 sum x {}, ratio {}", rep.report.verdict, rep.ratio.unwrap());
    Ok(())
}
