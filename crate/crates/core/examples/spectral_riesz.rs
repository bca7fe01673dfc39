//! The tempered Riesz derivative of a Gaussian bump two ways: FFT with the
//! closed multiplier, and pointwise quadrature of the symmetric increments.

use tempered::operators::riesz_tempered_pointwise;
use tempered::spectral::{riesz_apply, SpectralField};
use tempered::{make_grid, sample_on_grid, QuadConfig, TemperParams};

fn main() -> tempered::Result<()> {
    let p = TemperParams::new(0.5, 1.0)?;
    let f = |x: f64| (-x * x).exp();
    let grid = make_grid(-12.0, 12.0, 2049)?;
    let field = sample_on_grid(f, &grid)?;
    let spec = riesz_apply(&SpectralField::from_field(&field), &p)?;

    let q = QuadConfig::for_function(&p, 1.0)?;
    let mut worst: f64 = 0.0;
    for i in (824..=1224).step_by(50) {
        let x = grid.point(i);
        let point = riesz_tempered_pointwise(f, x, &p, &q)?;
        let d = (spec.values()[i] - point).abs();
        worst = worst.max(d);
        println!("x = {x:>6.3}  fft {:>12.8}  quadrature {point:>12.8}  diff {d:.1e}", spec.values()[i]);
    }
    println!("max difference {worst:.2e}");
    Ok(())
}
