//! Residuals of the three time-fractional equations on the reference grids
//! and on halved grids. The thresholds and reference grids in `verify` come
//! from this table.
//!
//! cargo run --release --example convergence_study

use tempered::verify::{
    check_g_half_derivative, residual_theorem1, residual_theorem2, ResidualReport, G_HALF_REFERENCE,
    THM1_REFERENCE, THM2_REFERENCE,
};
use tempered::{make_grid, DriftSpec, Grid1D};

fn grid((lo, hi, n): (f64, f64, usize)) -> tempered::Result<Grid1D> {
    make_grid(lo, hi, n)
}

fn halve(g: &Grid1D, k: u32) -> Grid1D {
    (0..k).fold(*g, |g, _| g.refined())
}

fn row(level: u32, r: &ResidualReport) {
    println!(
        "{:<18} {:>5} {:>12.4e} {:>12.4e} {:>12.4e} {:>7.3}  at {:?}",
        r.tag,
        level,
        r.max_abs,
        r.l2,
        r.refined_max_abs,
        r.reduction(),
        r.argmax
    );
    for (k, v) in &r.diagnostics {
        println!("{:>24} {v:.4e}", k);
    }
}

fn main() -> tempered::Result<()> {
    println!("{:<18} {:>5} {:>12} {:>12} {:>12} {:>7}", "check", "level", "max_abs", "l2", "halved", "ratio");

    let [y, t] = G_HALF_REFERENCE.map(grid);
    let (y, t) = (y?, t?);
    for k in 0..2 {
        row(k, &check_g_half_derivative(0.0, &halve(&y, k), &halve(&t, k))?);
    }

    // one level only: the report already holds the halved grid, and the next
    // level costs 16 times as much
    let [x, y, t] = THM1_REFERENCE.map(grid);
    row(0, &residual_theorem1(&DriftSpec::new(2.0, 0.0)?, &x?, &y?, &t?)?);

    let d2 = DriftSpec::new(1.0, 0.5)?;
    let [y, t] = THM2_REFERENCE.map(grid);
    let (y, t) = (y?, t?);
    for k in 0..2 {
        row(k, &residual_theorem2(&d2, 0.5, &halve(&y, k), &halve(&t, k))?);
    }
    println!("\nsign discrimination against the time resolution:");
    for nt in [128, 256, 511, 1021] {
        let r = residual_theorem2(&d2, 0.5, &y, &make_grid(0.2, 2.0, nt)?)?;
        println!("  t nodes {nt:>5}: max_abs {:.4e}, wrong-sign ratio {:.1}", r.max_abs, r.diagnostics["sign_ratio"]);
    }
    Ok(())
}
