//! Endpoints of reflected drifted Brownian motion and of the inverse
//! 1/2-stable subordinator, tested against their distribution functions.

use tempered::montecarlo::{inverse_stable_batch, ks_critical_1pct, ks_statistic, reflected_batch};
use tempered::processes::{folded_drifted_cdf, normal_cdf};
use tempered::DriftSpec;

fn main() -> tempered::Result<()> {
    let n = 100_000;
    for (mu, x, t) in [(1.0, 0.5, 1.0), (2.0, 0.0, 0.5)] {
        let d = DriftSpec::new(mu, x)?;
        let batch = reflected_batch(&d, t, n, 11)?;
        let ks = ks_statistic(&batch, |y| folded_drifted_cdf(x, y, t, &d))?;
        println!("reflected mu={mu} x={x} t={t}: KS {ks:.5}, 1% critical {:.5}", ks_critical_1pct(n));
    }

    // the inverse subordinator at t has the law of |B(t)|
    let t = 1.5;
    let batch = inverse_stable_batch(t, n, 5)?;
    let s = (2.0 * t).sqrt();
    let ks = ks_statistic(&batch, |y| if y <= 0.0 { 0.0 } else { 2.0 * normal_cdf(y / s) - 1.0 })?;
    println!("inverse 1/2-stable t={t}: KS against |B(t)| {ks:.5}");
    Ok(())
}
