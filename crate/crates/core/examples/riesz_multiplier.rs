//! Fourier multiplier of the tempered Riesz derivative: closed sine form,
//! expanded form, and the untempered limit -|gamma|^alpha.

use tempered::spectral::{riesz_multiplier, riesz_multiplier_expanded};
use tempered::TemperParams;

fn main() -> tempered::Result<()> {
    let alpha = 0.7;
    println!("{:>8} {:>14} {:>14} {:>14} {:>14}", "gamma", "eta=2", "expanded", "eta=1e-8", "-|g|^alpha");
    for gamma in [0.1, 0.5, 1.0, 3.0, 10.0, 50.0] {
        let p = TemperParams::new(alpha, 2.0)?;
        let p0 = TemperParams::new(alpha, 1e-8)?;
        println!(
            "{gamma:>8} {:>14.8} {:>14.8} {:>14.8} {:>14.8}",
            riesz_multiplier(gamma, &p),
            riesz_multiplier_expanded(gamma, &p),
            riesz_multiplier(gamma, &p0),
            -gamma.powf(alpha)
        );
    }
    Ok(())
}
