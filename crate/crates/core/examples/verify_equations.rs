//! Residuals of the time-fractional equations solved by the heat kernel, the
//! drifted density and the folded density, with initial concentration.

use tempered::processes::{drifted_density, folded_drifted_density};
use tempered::verify::{
    check_g_half_derivative, check_initial_concentration, residual_theorem1, residual_theorem2,
    G_HALF_THRESHOLD, THM1_THRESHOLD, THM2_THRESHOLD,
};
use tempered::{make_grid, DriftSpec};

fn main() -> tempered::Result<()> {
    let t = make_grid(0.2, 2.0, 256)?;

    let g = check_g_half_derivative(0.0, &make_grid(0.5, 3.0, 64)?, &t)?;
    println!("heat kernel:  max {:.3e} (threshold {G_HALF_THRESHOLD:e}), halved {:.3e}", g.max_abs, g.refined_max_abs);

    let xy = make_grid(-1.0, 1.0, 64)?;
    let r1 = residual_theorem1(&DriftSpec::new(2.0, 0.0)?, &xy, &xy, &t)?;
    println!("drifted:      max {:.3e} (threshold {THM1_THRESHOLD:e}), halved {:.3e}", r1.max_abs, r1.refined_max_abs);

    let d2 = DriftSpec::new(1.0, 0.5)?;
    let r2 = residual_theorem2(&d2, 0.5, &make_grid(0.6 + 3.4 / 64.0, 4.0, 64)?, &make_grid(0.2, 2.0, 511)?)?;
    println!("folded:       max {:.3e} (threshold {THM2_THRESHOLD:e}), halved {:.3e}", r2.max_abs, r2.refined_max_abs);
    println!("              wrong tanh sign is {:.0}x worse", r2.diagnostics["sign_ratio"]);

    for time in [1e-4, 1e-2, 1.0] {
        println!(
            "mass within 0.1 at t = {time:e}: u {:.6}, v {:.6}",
            check_initial_concentration(drifted_density, &DriftSpec::new(2.0, 0.0)?, time)?,
            check_initial_concentration(folded_drifted_density, &d2, time)?
        );
    }
    Ok(())
}
