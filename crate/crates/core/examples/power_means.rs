//! Weighted power means, including the geometric and negative orders.
//!
//!     cargo run --example power_means

use mixmean::means::{parse_rational_list, power_mean, prefix_means, Exponent, NormalizedWeights, PositiveVector, WeightSequence};

fn main() -> mixmean::Result<()> {
    let prec = 160;
    let x = PositiveVector::new(parse_rational_list("1,2,4,8")?)?;
    let q = NormalizedWeights::new(parse_rational_list("1/8,1/8,1/4,1/2")?)?;

    for r in ["-1", "geo", "1/2", "1", "2", "3"] {
        let exp: Exponent = r.parse()?;
        println!("M_{r:<4} = {}", power_mean(&q, &x, &exp, prec)?);
    }

    // Exact inputs stay exact where the result is rational.
    let uniform = NormalizedWeights::uniform(2);
    let pair = PositiveVector::from_ints(&[1, 3])?;
    println!("AM(1,3) = {}", power_mean(&uniform, &pair, &Exponent::int(1), prec)?);
    println!("HM(1,3) = {}", power_mean(&uniform, &pair, &Exponent::int(-1), prec)?);

    let w = WeightSequence::from_ints(&[1, 1, 2, 4])?;
    let prefixes = prefix_means(&w, &x, &Exponent::Geometric, prec)?;
    for (i, g) in prefixes.as_slice().iter().enumerate() {
        println!("G_{} = {g}", i + 1);
    }
    Ok(())
}
