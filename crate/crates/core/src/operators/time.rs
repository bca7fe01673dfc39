//! Order-1/2 time derivatives on uniform grids starting at `t = 0`.
//!
//! The Caputo derivative uses the L1 product-integration scheme: `f` is
//! interpolated piecewise linearly and the kernel `(t-s)^{-1/2}` is integrated
//! exactly on every panel. The Riemann-Liouville derivative adds the
//! initial-value term `f(0) t^{-1/2} / sqrt(pi)` analytically.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::grid::Grid1D;

/// `eta * t_max` above this would overflow `e^{eta t}` in double precision.
pub const MAX_TEMPER_EXPONENT: f64 = 700.0;

/// Samples `f(t_i)` on a grid with `t_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    grid: Grid1D,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if grid.lo() != 0.0 {
            return Err(invalid(format!("time grid must start at 0, got {}", grid.lo())));
        }
        if values.len() != grid.len() {
            return Err(invalid(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                at: grid.point(i),
                value: *v,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Grid1D, f: F) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `f(0)`.
    pub fn f0(&self) -> f64 {
        self.values[0]
    }
}

/// A time derivative at the interior nodes `t_1, ..., t_{n-1}`; the value at
/// `t = 0` is singular and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeSeries {
    grid: Grid1D,
    values: Vec<f64>,
}

impl DerivativeSeries {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// `values()[k]` belongs to node `k + 1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at grid node `i >= 1`.
    pub fn at_node(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (1..self.grid.len()).map(move |i| self.grid.point(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times().zip(self.values.iter().copied())
    }
}

fn check_len(ts: &TimeSeries) -> Result<()> {
    if ts.grid.len() < 3 {
        return Err(invalid(format!("need at least 3 time nodes, got {}", ts.grid.len())));
    }
    Ok(())
}

/// L1 weights `sqrt(j+1) - sqrt(j)`, written to avoid cancellation.
fn l1_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let j = j as f64;
            1.0 / ((j + 1.0).sqrt() + j.sqrt())
        })
        .collect()
}

fn caputo_values(ts: &TimeSeries) -> Vec<f64> {
    let n = ts.grid.len();
    let h = ts.grid.step();
    // 1 / (Gamma(3/2) sqrt(h))
    let scale = 2.0 / (PI * h).sqrt();
    let b = l1_weights(n);
    let incr: Vec<f64> = ts.values.windows(2).map(|w| w[1] - w[0]).collect();
    (1..n)
        .map(|m| {
            let s: f64 = incr[..m].iter().zip(b[..m].iter().rev()).map(|(d, w)| d * w).sum();
            scale * s
        })
        .collect()
}

/// Dzherbashyan-Caputo derivative of order 1/2,
/// `(1/sqrt(pi)) integral_0^t f'(s) (t-s)^{-1/2} ds`.
pub fn caputo_half(ts: &TimeSeries) -> Result<DerivativeSeries> {
    check_len(ts)?;
    Ok(DerivativeSeries {
        grid: ts.grid,
        values: caputo_values(ts),
    })
}

/// Riemann-Liouville derivative of order 1/2: the Caputo value plus
/// `f(0) t^{-1/2} / sqrt(pi)`.
pub fn rl_half(ts: &TimeSeries) -> Result<DerivativeSeries> {
    check_len(ts)?;
    let f0 = ts.f0();
    let values = caputo_values(ts)
        .into_iter()
        .enumerate()
        .map(|(k, c)| c + f0 / (PI * ts.grid.point(k + 1)).sqrt())
        .collect();
    Ok(DerivativeSeries { grid: ts.grid, values })
}

/// Tempered Riemann-Liouville derivative of order 1/2,
/// `e^{-eta t} D^{1/2}(e^{eta t} f) - sqrt(eta) f`.
pub fn tempered_rl_half(ts: &TimeSeries, eta: f64) -> Result<DerivativeSeries> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(invalid(format!("eta must be finite and >= 0, got {eta}")));
    }
    check_len(ts)?;
    let t_max = ts.grid.hi();
    if eta * t_max > MAX_TEMPER_EXPONENT {
        return Err(Error::Overflow(format!(
            "e^(eta t) with eta*t_max = {} exceeds {MAX_TEMPER_EXPONENT}",
            eta * t_max
        )));
    }
    if eta == 0.0 {
        return rl_half(ts);
    }
    let grid = ts.grid;
    let lifted: Vec<f64> = grid.points().zip(&ts.values).map(|(t, f)| (eta * t).exp() * f).collect();
    let lifted = TimeSeries::new(grid, lifted)?;
    let root = eta.sqrt();
    let values = rl_half(&lifted)?
        .values
        .into_iter()
        .enumerate()
        .map(|(k, d)| {
            let i = k + 1;
            (-eta * grid.point(i)).exp() * d - root * ts.values[i]
        })
        .collect();
    Ok(DerivativeSeries { grid, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn series<F: Fn(f64) -> f64>(t_max: f64, n: usize, f: F) -> TimeSeries {
        TimeSeries::from_fn(Grid1D::new(0.0, t_max, n).unwrap(), f).unwrap()
    }

    #[test]
    fn constant_function() {
        let ts = series(2.0, 41, |_| 3.0);
        let rl = rl_half(&ts).unwrap();
        for (t, v) in rl.iter() {
            assert_abs_diff_eq!(v, 3.0 / (PI * t).sqrt(), epsilon = 1e-13);
        }
        assert!(caputo_half(&ts).unwrap().values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn linear_function_is_exact() {
        let ts = series(3.0, 31, |t| t);
        let want = |t: f64| 2.0 * (t / PI).sqrt();
        for (t, v) in rl_half(&ts).unwrap().iter() {
            assert_abs_diff_eq!(v, want(t), epsilon = 1e-13);
        }
        for (t, v) in caputo_half(&ts).unwrap().iter() {
            assert_abs_diff_eq!(v, want(t), epsilon = 1e-13);
        }
    }

    #[test]
    fn square_root_has_constant_derivative() {
        // sqrt(t) is not resolved by linear panels near 0; accuracy is checked away from it
        let ts = series(1.0, 4001, f64::sqrt);
        let rl = rl_half(&ts).unwrap();
        for (t, v) in rl.iter().filter(|(t, _)| *t >= 0.25) {
            assert!((v - PI.sqrt() / 2.0).abs() < 2e-3, "t={t}: {v}");
        }
    }

    #[test]
    fn exponential_rl_minus_caputo() {
        let ts = series(1.0, 201, f64::exp);
        let rl = rl_half(&ts).unwrap();
        let cap = caputo_half(&ts).unwrap();
        let last = ts.grid().len() - 1;
        let diff = rl.at_node(last) - 1.0 / PI.sqrt();
        assert_abs_diff_eq!(cap.at_node(last), diff, epsilon = 1e-4);
        for ((t, r), c) in rl.iter().zip(cap.values()) {
            assert_abs_diff_eq!(r - c, 1.0 / (PI * t).sqrt(), epsilon = 1e-10);
        }
    }

    #[test]
    fn tempered_of_decaying_exponential() {
        let eta = 1.0;
        let ts = series(2.0, 51, |t: f64| (-eta * t).exp());
        let out = tempered_rl_half(&ts, eta).unwrap();
        for (t, v) in out.iter() {
            let want = (-t).exp() / (PI * t).sqrt() - (-t).exp();
            assert_abs_diff_eq!(v, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn tempered_reduces_to_rl_at_zero_eta() {
        let ts = series(1.5, 37, |t: f64| (2.0 * t).sin() + 1.0);
        assert_eq!(tempered_rl_half(&ts, 0.0).unwrap(), rl_half(&ts).unwrap());
    }

    #[test]
    fn tempered_overflow_guard() {
        let ts = series(10.0, 11, |_| 1.0);
        assert!(matches!(tempered_rl_half(&ts, 71.0), Err(Error::Overflow(_))));
        assert!(tempered_rl_half(&ts, 69.0).is_ok());
        assert!(tempered_rl_half(&ts, -1.0).is_err());
    }

    #[test]
    fn rejects_short_or_shifted_series() {
        assert!(rl_half(&series(1.0, 2, |t| t)).is_err());
        assert!(TimeSeries::from_fn(Grid1D::new(0.1, 1.0, 5).unwrap(), |t| t).is_err());
        assert!(TimeSeries::from_fn(Grid1D::new(0.0, 1.0, 5).unwrap(), |t| 1.0 / t).is_err());
    }

    /// `integral_0^inf e^{-lambda t} out(t) dt` for `out(t) = w(t) / sqrt(t)`
    /// with `w` smooth in `s = sqrt(t)`: after `t = s^2` the integrand is
    /// `2 e^{-lambda t} w`, integrated by trapezoids on the nodes `sqrt(t_k)`,
    /// with the `s = 0` value extrapolated quadratically from nodes 1..=3.
    fn laplace_of_singular(out: &DerivativeSeries, lambda: f64) -> f64 {
        let mut pts: Vec<(f64, f64)> = out
            .iter()
            .map(|(t, v)| (t.sqrt(), 2.0 * (-lambda * t).exp() * v * t.sqrt()))
            .collect();
        let (s1, s2, s3) = (pts[0].0, pts[1].0, pts[2].0);
        let (w1, w2, w3) = (pts[0].1, pts[1].1, pts[2].1);
        let w0 = w1 * s2 * s3 / ((s1 - s2) * (s1 - s3))
            + w2 * s1 * s3 / ((s2 - s1) * (s2 - s3))
            + w3 * s1 * s2 / ((s3 - s1) * (s3 - s2));
        pts.insert(0, (0.0, w0));
        pts.windows(2).map(|p| 0.5 * (p[1].0 - p[0].0) * (p[0].1 + p[1].1)).sum()
    }

    #[test]
    fn tempered_laplace_spot_check() {
        let (eta, lambda) = (1.0, 3.0);
        let ts = series(8.0, 8_001, |t: f64| (-t).exp());
        let out = tempered_rl_half(&ts, eta).unwrap();
        let got = laplace_of_singular(&out, lambda);
        let want = ((lambda + eta).sqrt() - eta.sqrt()) / (lambda + eta);
        assert_abs_diff_eq!(want, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(got, want, epsilon = 1e-4);
    }

    #[test]
    fn tempered_laplace_of_nontrivial_function() {
        // f(t) = t e^{-2t}: Laplace of the tempered derivative is
        // (sqrt(lambda+eta) - sqrt(eta)) / (lambda+2)^2
        // the L1 scheme is O(h^{3/2}) for smooth data
        let (eta, lambda) = (0.5f64, 1.0f64);
        let want = ((lambda + eta).sqrt() - eta.sqrt()) / (lambda + 2.0f64).powi(2);
        let err = |n: usize| {
            let ts = series(12.0, n, |t: f64| t * (-2.0 * t).exp());
            laplace_of_singular(&tempered_rl_half(&ts, eta).unwrap(), lambda) - want
        };
        let (coarse, fine) = (err(6_001), err(12_001));
        assert!(fine.abs() < 3e-5, "{fine}");
        assert!(coarse.abs() / fine.abs() > 2.0, "{coarse} {fine}");
    }
}
