//! Caputo, Riemann-Liouville and tempered Riemann-Liouville derivatives of
//! order 1/2 on a time grid, against closed forms.

use std::f64::consts::PI;

use tempered::operators::{caputo_half, rl_half, tempered_rl_half, TimeSeries};
use tempered::make_grid;

fn main() -> tempered::Result<()> {
    let grid = make_grid(0.0, 2.0, 2001)?;

    // D^{1/2} t = 2 sqrt(t / pi); D^{1/2} 1 = 1 / sqrt(pi t) (zero for Caputo)
    let lin = TimeSeries::from_fn(grid, |t| t)?;
    let one = TimeSeries::from_fn(grid, |_| 1.0)?;
    let rl_lin = rl_half(&lin)?;
    let rl_one = rl_half(&one)?;
    let cap_one = caputo_half(&one)?;

    // tempered: e^{-eta t} f with f = 1 gives e^{-eta t} / sqrt(pi t) - sqrt(eta) e^{-eta t}
    let eta = 2.0;
    let damped = TimeSeries::from_fn(grid, |t| (-eta * t).exp())?;
    let tr = tempered_rl_half(&damped, eta)?;

    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "t", "rl(t) err", "rl(1) err", "caputo(1)", "tempered err");
    for i in (200..=2000).step_by(300) {
        let t = grid.point(i);
        let e_lin = rl_lin.at_node(i) - 2.0 * (t / PI).sqrt();
        let e_one = rl_one.at_node(i) - 1.0 / (PI * t).sqrt();
        let want = (-eta * t).exp() * (1.0 / (PI * t).sqrt() - eta.sqrt());
        println!(
            "{t:>6.2} {e_lin:>12.2e} {e_one:>12.2e} {:>12.2e} {:>12.2e}",
            cap_one.at_node(i),
            tr.at_node(i) - want
        );
    }
    Ok(())
}
