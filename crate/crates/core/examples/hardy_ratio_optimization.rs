//! Coordinate ascent on `S(x) / sum x`. The ratio climbs toward, but stays
//! below, the constant 3.
//!
//!     cargo run --release --example hardy_ratio_optimization

use mixmean::search::{maximize_ratio, OptTarget};

fn main() -> mixmean::Result<()> {
    for n in [10, 100, 1000] {
        let rep = maximize_ratio(OptTarget::HardyRatio, n, 600, 7, 128)?;
        println!(
            "n={n:>4}: best ratio {:.6} after {} evaluations ({} improvements, {} above 3)",
            rep.best_f64, rep.evaluations, rep.improvements, rep.threshold_exceeded
        );
    }
    let rep = maximize_ratio(OptTarget::RadoGap, 6, 400, 7, 128)?;
    println!("rado-gap n=6: best {}", rep.best_value);
    Ok(())
}
