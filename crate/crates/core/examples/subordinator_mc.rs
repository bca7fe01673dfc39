//! Tempered stable subordinator by exponential rejection; the empirical
//! Laplace transform against exp(-t ((eta+lambda)^alpha - eta^alpha)).

use tempered::montecarlo::{empirical_laplace, tempered_batch};
use tempered::spectral::laplace_symbol;
use tempered::TemperParams;

fn main() -> tempered::Result<()> {
    let t = 1.0;
    for (alpha, eta) in [(0.5, 0.0), (0.5, 1.0), (0.3, 2.0), (0.8, 0.5)] {
        let p = TemperParams::new(alpha, eta)?;
        let batch = tempered_batch(&p, t, 1_000_000, 7)?;
        println!(
            "alpha {alpha} eta {eta}: acceptance {:.5} (expected {:.5})",
            batch.acceptance_rate(),
            (-t * eta.powf(alpha)).exp()
        );
        for lambda in [0.5, 1.0, 2.0, 4.0] {
            let e = empirical_laplace(&batch, lambda)?;
            let exact = (-t * laplace_symbol(lambda, &p)?).exp();
            println!(
                "  lambda {lambda:>3}: {:.6} +- {:.6}  exact {exact:.6}  z = {:+.2}",
                e.value,
                e.stderr,
                (e.value - exact) / e.stderr
            );
        }
    }
    Ok(())
}
