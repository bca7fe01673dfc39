//! Tempered Marchaud, Weyl and Riesz derivatives of a Gaussian bump, with the
//! decomposition Weyl+ = Marchaud + eta * (order alpha-1 term).

use tempered::operators::{marchaud_tempered, riesz_tempered_pointwise, weyl_minus_tempered, weyl_plus_tempered};
use tempered::verify::check_weyl_decomposition;
use tempered::{make_grid, QuadConfig, TemperParams};

fn main() -> tempered::Result<()> {
    let p = TemperParams::new(0.6, 1.5)?;
    let q = QuadConfig::for_function(&p, 1.0)?;
    let f = |x: f64| (-x * x).exp();

    println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>10}", "x", "marchaud", "weyl+", "weyl-", "riesz", "decomp");
    for x in make_grid(-2.0, 2.0, 9)?.points() {
        let wp = weyl_plus_tempered(f, x, &p, &q)?;
        let wm = weyl_minus_tempered(f, x, &p, &q)?;
        println!(
            "{x:>6.2} {:>12.6} {wp:>12.6} {wm:>12.6} {:>12.6} {:>10.1e}",
            marchaud_tempered(f, x, &p, &q)?,
            riesz_tempered_pointwise(f, x, &p, &q)?,
            check_weyl_decomposition(f, x, &p, &q)?,
        );
    }

    // the even bump makes the two one-sided derivatives mirror images
    let x = 0.7;
    let gap = weyl_plus_tempered(f, x, &p, &q)? - weyl_minus_tempered(f, -x, &p, &q)?;
    println!("\nweyl+(x) - weyl-(-x) at x = {x}: {gap:.2e}");
    Ok(())
}
