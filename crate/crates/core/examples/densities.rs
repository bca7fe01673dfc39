//! Densities of drifted and folded drifted Brownian motion (Var B(t) = 2t),
//! the folded distribution function and the boundary value on y = x.

use std::f64::consts::PI;

use tempered::processes::{drifted_density, folded_drifted_cdf, folded_drifted_density, heat_kernel, EvalPoint};
use tempered::{make_grid, DriftSpec};

fn main() -> tempered::Result<()> {
    let d = DriftSpec::new(1.0, 0.5)?;
    let (x, t) = (0.5, 0.8);
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "y", "g", "u", "v", "P(Y<=y)");
    for y in make_grid(0.5, 4.5, 9)?.points() {
        let pt = EvalPoint::new(x, y, t)?;
        println!(
            "{y:>6.2} {:>12.8} {:>12.8} {:>12.8} {:>12.8}",
            heat_kernel(pt)?,
            drifted_density(pt, &d)?,
            folded_drifted_density(pt, &d)?,
            folded_drifted_cdf(x, y, t, &d)
        );
    }
    let edge = folded_drifted_density(EvalPoint::new(x, x, t)?, &d)?;
    println!("\nv(x, x, t) = {edge:.15}, e^(-eta t)/sqrt(pi t) = {:.15}", (-d.eta() * t).exp() / (PI * t).sqrt());
    Ok(())
}
