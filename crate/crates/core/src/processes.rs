//! Closed-form transition densities of drifted and folded drifted Brownian
//! motion, plus the transforms used when checking their governing equations.
//!
//! Brownian motion here has generator `d^2/dx^2`, i.e. `Var B(t) = 2t`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::params::DriftSpec;

/// Source `x`, target `y`, time `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl EvalPoint {
    pub fn new(x: f64, y: f64, t: f64) -> Result<Self> {
        let pt = Self { x, y, t };
        pt.check()?;
        Ok(pt)
    }

    fn check(&self) -> Result<()> {
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(invalid(format!("t must be finite and > 0, got {}", self.t)));
        }
        if !self.x.is_finite() || !self.y.is_finite() {
            return Err(invalid(format!("x, y must be finite, got ({}, {})", self.x, self.y)));
        }
        Ok(())
    }
}

/// Heat kernel `g(x, y, t) = e^{-(y-x)^2/4t} / sqrt(4 pi t)`.
pub fn heat_kernel(pt: EvalPoint) -> Result<f64> {
    pt.check()?;
    Ok(gauss(pt.y - pt.x, pt.t))
}

fn gauss(d: f64, t: f64) -> f64 {
    (-d * d / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// Density of `B(t) + mu t + x` at `y`, in the factorized form
/// `g(x, y, t) e^{-mu^2 t/4 + (mu/2)(y-x)}`.
pub fn drifted_density(pt: EvalPoint, d: &DriftSpec) -> Result<f64> {
    pt.check()?;
    let mu = d.mu();
    Ok(gauss(pt.y - pt.x, pt.t) * (-mu * mu * pt.t / 4.0 + 0.5 * mu * (pt.y - pt.x)).exp())
}

/// Density of `|B(t) + mu t| + x` at `y >= x >= 0`:
/// `g e^{-mu^2 t/4} (e^{-(mu/2)(y-x)} + e^{(mu/2)(y-x)})`.
pub fn folded_drifted_density(pt: EvalPoint, d: &DriftSpec) -> Result<f64> {
    pt.check()?;
    if pt.x < 0.0 {
        return Err(invalid(format!("folded density needs x >= 0, got {}", pt.x)));
    }
    if pt.y < pt.x {
        return Err(invalid(format!("folded density needs y >= x, got y={} < x={}", pt.y, pt.x)));
    }
    let mu = d.mu();
    let r = pt.y - pt.x;
    let g = gauss(r, pt.t);
    let decay = -mu * mu * pt.t / 4.0;
    Ok(g * ((decay - 0.5 * mu * r).exp() + (decay + 0.5 * mu * r).exp()))
}

/// `P(|B(t) + mu t| + x <= y)`, the distribution function of
/// [`folded_drifted_density`]. Zero for `y < x`.
pub fn folded_drifted_cdf(x: f64, y: f64, t: f64, d: &DriftSpec) -> f64 {
    if y <= x {
        return 0.0;
    }
    let s = (2.0 * t).sqrt();
    let r = y - x;
    let mt = d.mu() * t;
    normal_cdf((r - mt) / s) - normal_cdf((-r - mt) / s)
}

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// `a(x, y) = 1` for `x <= y`, `-1` for `x > y`.
pub fn sign_weight(x: f64, y: f64) -> f64 {
    if x <= y {
        1.0
    } else {
        -1.0
    }
}

/// Laplace transform in `t` of the heat kernel, `e^{-|y-x| sqrt(lambda)} / (2 sqrt(lambda))`.
pub fn g_laplace(x: f64, y: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("lambda must be > 0, got {lambda}")));
    }
    let r = lambda.sqrt();
    Ok((-(y - x).abs() * r).exp() / (2.0 * r))
}

/// Switch point between `e^{z^2} erfc(z)` and the continued fraction.
const ML_CF_SWITCH: f64 = 5.0;

/// Mittag-Leffler function of order 1/2 at `-z`, `E_{1/2}(-z) = e^{z^2} erfc(z)`, `z >= 0`.
pub fn mittag_leffler_half(z: f64) -> Result<f64> {
    if !(z >= 0.0) || z.is_infinite() {
        return Err(invalid(format!("mittag_leffler_half needs finite z >= 0, got {z}")));
    }
    if z <= ML_CF_SWITCH {
        Ok((z * z).exp() * libm::erfc(z))
    } else {
        Ok(erfcx_continued_fraction(z))
    }
}

/// Scaled complementary error function for large `z` from
/// `sqrt(pi) erfcx(z) = 1 / (z + (1/2) / (z + 1 / (z + (3/2) / (z + ...))))`,
/// evaluated by the modified Lentz method.
fn erfcx_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / (PI.sqrt() * f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use statrs::function::gamma::gamma;

    fn pt(x: f64, y: f64, t: f64) -> EvalPoint {
        EvalPoint::new(x, y, t).unwrap()
    }

    fn drift(mu: f64) -> DriftSpec {
        DriftSpec::new(mu, 0.0).unwrap()
    }

    #[test]
    fn heat_kernel_examples() {
        assert_abs_diff_eq!(heat_kernel(pt(0.3, 0.3, 1.0 / (4.0 * PI))).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(heat_kernel(pt(0.0, 2.0, 1.0)).unwrap(), (-1f64).exp() / (4.0 * PI).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(heat_kernel(pt(0.0, 2.0, 1.0)).unwrap(), 0.103_777, epsilon = 1e-6);
        let mass = integrate(|y| heat_kernel(pt(0.5, y, 0.7)).unwrap(), -40.0, 40.0, 80, 1e-12, 1000).unwrap().value;
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
        assert!(EvalPoint::new(0.0, 1.0, 0.0).is_err());
        assert!(heat_kernel(EvalPoint { x: 0.0, y: 0.0, t: -1.0 }).is_err());
    }

    #[test]
    fn drifted_density_examples() {
        let p = pt(-0.4, 1.3, 0.8);
        assert_eq!(drifted_density(p, &drift(0.0)).unwrap(), heat_kernel(p).unwrap());
        let (mu, t) = (1.7, 0.6);
        assert_relative_eq!(drifted_density(pt(0.0, mu * t, t), &drift(mu)).unwrap(), 1.0 / (4.0 * PI * t).sqrt(), max_relative = 1e-14);
        assert_abs_diff_eq!(drifted_density(pt(0.0, 0.0, 1.0), &drift(2.0)).unwrap(), 0.103_777, epsilon = 1e-6);
    }

    #[test]
    fn folded_density_examples() {
        let t = 0.9;
        for mu in [0.5, 1.0, 2.0] {
            let d = drift(mu);
            let eta = d.eta();
            assert_relative_eq!(
                folded_drifted_density(pt(0.7, 0.7, t), &d).unwrap(),
                (-eta * t).exp() / (PI * t).sqrt(),
                max_relative = 1e-14
            );
        }
        let p = pt(0.2, 1.1, t);
        assert_relative_eq!(folded_drifted_density(p, &drift(0.0)).unwrap(), 2.0 * heat_kernel(p).unwrap(), max_relative = 1e-15);
        let d = drift(1.0);
        let mass = integrate(|y| folded_drifted_density(pt(0.5, y, 1.0), &d).unwrap(), 0.5, 40.0, 80, 1e-12, 1000)
            .unwrap()
            .value;
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
        assert!(folded_drifted_density(pt(1.0, 0.5, 1.0), &d).is_err());
        assert!(folded_drifted_density(pt(-0.1, 0.5, 1.0), &d).is_err());
    }

    #[test]
    fn folded_cdf_integrates_density() {
        let d = drift(1.3);
        let (x, t) = (0.4, 0.8);
        for y in [0.4, 0.5, 1.0, 2.5, 6.0] {
            let num = if y == x {
                0.0
            } else {
                integrate(|s| folded_drifted_density(pt(x, s, t), &d).unwrap(), x, y, 8, 1e-13, 500).unwrap().value
            };
            assert_abs_diff_eq!(folded_drifted_cdf(x, y, t, &d), num, epsilon = 1e-10);
        }
        assert_eq!(folded_drifted_cdf(x, 0.0, t, &d), 0.0);
    }

    #[test]
    fn sign_weight_examples() {
        assert_eq!(sign_weight(0.0, 1.0), 1.0);
        assert_eq!(sign_weight(1.0, 0.0), -1.0);
        assert_eq!(sign_weight(2.5, 2.5), 1.0);
    }

    #[test]
    fn g_laplace_examples() {
        assert_eq!(g_laplace(1.0, 1.0, 1.0).unwrap(), 0.5);
        assert_abs_diff_eq!(g_laplace(0.0, 1.0, 4.0).unwrap(), (-2f64).exp() / 4.0, epsilon = 1e-16);
        assert_abs_diff_eq!(g_laplace(0.0, 1.0, 4.0).unwrap(), 0.033_833_8, epsilon = 1e-7);
        // numeric time integral of e^{-lambda t} g; t = s^2 smooths the origin
        let num = integrate(
            |s: f64| {
                if s == 0.0 {
                    return 0.0;
                }
                let t = s * s;
                (-4.0 * t).exp() * heat_kernel(pt(0.0, 1.0, t)).unwrap() * 2.0 * s
            },
            0.0,
            8.0,
            16,
            1e-14,
            1000,
        )
        .unwrap()
        .value;
        assert_abs_diff_eq!(num, g_laplace(0.0, 1.0, 4.0).unwrap(), epsilon = 1e-12);
        assert!(g_laplace(0.0, 1.0, 0.0).is_err());
    }

    /// Direct series `sum_k (-z)^k / Gamma(k/2 + 1)`.
    fn ml_series(z: f64) -> f64 {
        (0..200).map(|k| (-z).powi(k) / gamma(k as f64 / 2.0 + 1.0)).sum()
    }

    #[test]
    fn mittag_leffler_examples() {
        assert_eq!(mittag_leffler_half(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(mittag_leffler_half(1.0).unwrap(), ml_series(1.0), epsilon = 1e-14);
        assert_abs_diff_eq!(mittag_leffler_half(1.0).unwrap(), 0.427_584, epsilon = 1e-6);
        // erfcx(10) = 0.0561409927438226
        assert_abs_diff_eq!(mittag_leffler_half(10.0).unwrap(), 0.056_140_992_743_822_6, epsilon = 1e-15);
        let z: f64 = 10.0;
        let asym = 1.0 / (z * PI.sqrt())
            * (1.0 - 1.0 / (2.0 * z * z) + 3.0 / (4.0 * z.powi(4)) - 15.0 / (8.0 * z.powi(6)));
        assert_abs_diff_eq!(mittag_leffler_half(10.0).unwrap(), asym, epsilon = 1e-8);
        assert!(mittag_leffler_half(-0.1).is_err());
    }

    #[test]
    fn mittag_leffler_branches_join() {
        let below = mittag_leffler_half(ML_CF_SWITCH).unwrap();
        let above = erfcx_continued_fraction(ML_CF_SWITCH);
        assert_relative_eq!(below, above, max_relative = 1e-13);
        for z in [0.3, 0.8, 1.7] {
            assert_relative_eq!(mittag_leffler_half(z).unwrap(), ml_series(z), max_relative = 1e-12);
        }
        // the series cancels terms of size e^{z^2} here; 40-digit reference value
        assert_relative_eq!(mittag_leffler_half(2.5).unwrap(), 0.210_806_364_061_143_58, max_relative = 1e-14);
    }

    #[test]
    fn mittag_leffler_monotone() {
        let vals: Vec<f64> = (0..4000).map(|i| mittag_leffler_half(i as f64 * 0.01).unwrap()).collect();
        assert!(vals.iter().all(|v| *v > 0.0 && *v <= 1.0));
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn mittag_leffler_laplace_identity() {
        // integral_0^T e^{-lambda t} E(-xi sqrt t) dt with t = s^2
        for lambda in [1.0, 2.0] {
            for xi in [0.5, 1.0, 2.0] {
                let f = |s: f64| 2.0 * s * (-lambda * s * s).exp() * mittag_leffler_half(xi * s).unwrap();
                let num = integrate(f, 0.0, 200f64.sqrt(), 64, 1e-13, 2000).unwrap().value;
                let want = lambda.powf(-0.5) / (xi + lambda.sqrt());
                assert_abs_diff_eq!(num, want, epsilon = 1e-6);
            }
        }
    }

    proptest! {
        #[test]
        fn factorized_equals_completed_square(x in -5.0f64..5.0, y in -5.0f64..5.0, t in 0.05f64..5.0, mu in -3.0f64..3.0) {
            let d = drift(mu);
            let direct = (-(y - x - mu * t).powi(2) / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
            let v = drifted_density(pt(x, y, t), &d).unwrap();
            prop_assert!((v - direct).abs() <= 1e-12 * direct.max(1e-300) || (v - direct).abs() < 1e-300);
        }

        #[test]
        fn folded_is_two_gaussians(x in 0.0f64..3.0, r in 0.0f64..6.0, t in 0.05f64..5.0, mu in -3.0f64..3.0) {
            let d = drift(mu);
            let y = x + r;
            let v = folded_drifted_density(pt(x, y, t), &d).unwrap();
            let a = drifted_density(pt(x, y, t), &d).unwrap();
            let b = drifted_density(pt(x, 2.0 * x - y, t), &d).unwrap();
            prop_assert!((v - (a + b)).abs() <= 1e-12 * v.max(1e-300));
        }

        #[test]
        fn g_laplace_symmetric(x in -4.0f64..4.0, y in -4.0f64..4.0, l in 0.01f64..20.0) {
            prop_assert_eq!(g_laplace(x, y, l).unwrap(), g_laplace(y, x, l).unwrap());
        }
    }

    #[test]
    fn chapman_kolmogorov() {
        let d = drift(1.2);
        let (x, y, s, t) = (-0.3, 0.9, 0.4, 1.1);
        let conv = integrate(
            |z| drifted_density(pt(x, z, s), &d).unwrap() * drifted_density(pt(z, y, t - s), &d).unwrap(),
            -30.0,
            30.0,
            60,
            1e-12,
            1000,
        )
        .unwrap()
        .value;
        assert_abs_diff_eq!(conv, drifted_density(pt(x, y, t), &d).unwrap(), epsilon = 1e-6);
    }
}
