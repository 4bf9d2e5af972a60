//! Elementary symmetric functions, the symmetric means `P_r`, and the
//! Marcus-Lopes superadditivity of `P_r`.
//!
//!     cargo run --example symmetric_means

use mixmean::means::{esf, symmetric_mean, PositiveVector};
use mixmean::report::CheckConfig;
use mixmean::symmetric::marcus_lopes_check;

fn main() -> mixmean::Result<()> {
    let x = PositiveVector::from_ints(&[1, 2, 3, 4])?;
    for r in 0..=x.len() {
        println!("E_{r} = {:>3}   P_{r} = {}", esf(&x, r)?.to_string(), symmetric_mean(&x, r, 128)?);
    }

    let y = PositiveVector::from_ints(&[5, 1, 1, 2])?;
    let cfg = CheckConfig::default();
    for r in 1..=x.len() {
        let rep = marcus_lopes_check(&x, &y, r, &cfg)?;
        println!("P_{r}(x) + P_{r}(y) <= P_{r}(x + y): {} (margin {})", rep.verdict, rep.margin);
    }
    Ok(())
}
