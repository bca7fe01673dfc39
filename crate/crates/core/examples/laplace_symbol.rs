//! Laplace exponent of the tempered stable subordinator and its role as the
//! eigenvalue of the tempered Marchaud derivative on e^{sx}.

use tempered::operators::marchaud_tempered;
use tempered::spectral::laplace_symbol;
use tempered::{QuadConfig, TemperParams};

fn main() -> tempered::Result<()> {
    println!("{:>6} {:>6} {:>6} {:>14} {:>14} {:>10}", "alpha", "eta", "s", "symbol", "marchaud", "diff");
    for alpha in [0.25, 0.5, 0.75] {
        for eta in [0.5, 1.0, 4.0] {
            let p = TemperParams::new(alpha, eta)?;
            let q = QuadConfig::for_function(&p, 1.0)?;
            for s in [0.5, 1.0, 2.0] {
                let sym = laplace_symbol(s, &p)?;
                let m = marchaud_tempered(|x: f64| (s * x).exp(), 0.0, &p, &q)?;
                println!("{alpha:>6} {eta:>6} {s:>6} {sym:>14.10} {m:>14.10} {:>10.2e}", (m - sym).abs());
            }
        }
    }
    Ok(())
}
