//! Space-fractional tempered operators evaluated pointwise by quadrature of
//! their increment (Marchaud) forms.
//!
//! Every operator integrates an increment `D(w)` of `f` against the Levy
//! density `alpha e^{-eta w} / (Gamma(1-alpha) w^{alpha+1})`, and the Weyl and
//! Riesz operators add `eta` times the same increment against
//! `e^{-eta w} / (Gamma(1-alpha) w^alpha)`.

use crate::error::Result;
use crate::params::{QuadConfig, TemperParams};
#[cfg(test)]
use crate::params::TailModel;
use crate::quad::{increment_integral, Increment, Kernel};
use crate::spectral::riesz_constant;

/// First and second derivatives of `f` at `x` by central differences with step
/// `eps / 10`. They only feed the Taylor head on `[0, eps]`.
fn local_derivatives<F: Fn(f64) -> f64>(f: &F, x: f64, eps: f64) -> (f64, f64, f64) {
    let d = eps / 10.0;
    let (fm, f0, fp) = (f(x - d), f(x), f(x + d));
    (f0, (fp - fm) / (2.0 * d), (fp - 2.0 * f0 + fm) / (d * d))
}

fn backward<F: Fn(f64) -> f64>(f: &F, x: f64, kernels: &[(f64, Kernel)], q: &QuadConfig) -> Result<f64> {
    q.validate()?;
    let (f0, d1, d2) = local_derivatives(f, x, q.eps);
    let diff = |w: f64| f0 - f(x - w);
    let inc = Increment {
        diff: &diff,
        c1: d1,
        c2: -0.5 * d2,
        base: f0,
    };
    Ok(increment_integral(&inc, kernels, q)?.value)
}

fn forward<F: Fn(f64) -> f64>(f: &F, x: f64, kernels: &[(f64, Kernel)], q: &QuadConfig) -> Result<f64> {
    q.validate()?;
    let (f0, d1, d2) = local_derivatives(f, x, q.eps);
    let diff = |w: f64| f0 - f(x + w);
    let inc = Increment {
        diff: &diff,
        c1: -d1,
        c2: -0.5 * d2,
        base: f0,
    };
    Ok(increment_integral(&inc, kernels, q)?.value)
}

fn weyl_kernels(p: &TemperParams) -> [(f64, Kernel); 2] {
    [(1.0, Kernel::levy(p)), (p.eta(), Kernel::tilted(p))]
}

/// Tempered Marchaud derivative `integral_0^inf (f(x) - f(x-y)) Pi(dy)`.
///
/// On `f(x) = e^{sx}` it returns `((eta+s)^alpha - eta^alpha) e^{sx}`.
pub fn marchaud_tempered<F: Fn(f64) -> f64>(f: F, x: f64, p: &TemperParams, q: &QuadConfig) -> Result<f64> {
    backward(&f, x, &[(1.0, Kernel::levy(p))], q)
}

/// `integral_0^inf (f(x) - f(x-w)) e^{-eta w} / (Gamma(1-alpha) w^alpha) dw`,
/// the order `alpha - 1` term in the Weyl decomposition.
pub(crate) fn weyl_correction<F: Fn(f64) -> f64>(f: F, x: f64, p: &TemperParams, q: &QuadConfig) -> Result<f64> {
    backward(&f, x, &[(1.0, Kernel::tilted(p))], q)
}

/// Tempered upper Weyl derivative in Marchaud form (backward increments),
/// integrated against the combined kernel in a single quadrature.
///
/// On `f(x) = e^{sx}` it returns `s (eta+s)^{alpha-1} e^{sx}`.
pub fn weyl_plus_tempered<F: Fn(f64) -> f64>(f: F, x: f64, p: &TemperParams, q: &QuadConfig) -> Result<f64> {
    backward(&f, x, &weyl_kernels(p), q)
}

/// Tempered lower Weyl derivative, the mirror image of [`weyl_plus_tempered`]:
/// `weyl_minus(f)(x) = weyl_plus(f(-.))(-x)`. Uses forward increments
/// `f(x) - f(x+w)`.
///
/// On `f(x) = e^{sx}` with `s < eta` it returns `-s (eta-s)^{alpha-1} e^{sx}`.
pub fn weyl_minus_tempered<F: Fn(f64) -> f64>(f: F, x: f64, p: &TemperParams, q: &QuadConfig) -> Result<f64> {
    forward(&f, x, &weyl_kernels(p), q)
}

/// Tempered Riesz derivative from symmetric second differences
/// `2f(x) - f(x-w) - f(x+w)`, scaled by [`riesz_constant`].
pub fn riesz_tempered_pointwise<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    p: &TemperParams,
    q: &QuadConfig,
) -> Result<f64> {
    q.validate()?;
    let c = riesz_constant(p)?;
    let (f0, _, d2) = local_derivatives(&f, x, q.eps);
    let diff = |w: f64| 2.0 * f0 - f(x - w) - f(x + w);
    let inc = Increment {
        diff: &diff,
        c1: 0.0,
        c2: -d2,
        base: 2.0 * f0,
    };
    Ok(c * increment_integral(&inc, &weyl_kernels(p), q)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use approx::assert_abs_diff_eq;

    fn tp(alpha: f64, eta: f64) -> TemperParams {
        TemperParams::new(alpha, eta).unwrap()
    }

    fn decaying() -> QuadConfig {
        QuadConfig::with_wmax(80.0).unwrap()
    }

    fn symbol(p: &TemperParams, s: f64) -> f64 {
        (p.eta() + s).powf(p.alpha()) - p.eta().powf(p.alpha())
    }

    #[test]
    fn marchaud_exponential_eigenfunction() {
        let v = marchaud_tempered(f64::exp, 0.0, &tp(0.5, 0.0), &decaying()).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-7);
        let v = marchaud_tempered(|x| (3.0 * x).exp(), 0.0, &tp(0.5, 1.0), &decaying()).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn constants_map_to_zero() {
        let q = decaying();
        for p in [tp(0.3, 0.0), tp(0.5, 1.0), tp(0.8, 2.0)] {
            for x in [-2.0, 0.0, 3.5] {
                assert_abs_diff_eq!(marchaud_tempered(|_| 4.2, x, &p, &q).unwrap(), 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(weyl_plus_tempered(|_| 4.2, x, &p, &q).unwrap(), 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(weyl_minus_tempered(|_| 4.2, x, &p, &q).unwrap(), 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(riesz_tempered_pointwise(|_| 4.2, x, &p, &q).unwrap(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn symbol_identity_grid() {
        let q = decaying();
        for alpha in [0.3, 0.5, 0.8] {
            for eta in [0.0, 0.5, 2.0] {
                let p = tp(alpha, eta);
                for x in [-1.0, 0.0, 1.0] {
                    let s = 1.0;
                    let got = marchaud_tempered(|y| (s * y).exp(), x, &p, &q).unwrap();
                    let want = symbol(&p, s) * (s * x).exp();
                    assert!((got - want).abs() <= 10.0 * q.abs_tol, "alpha={alpha} eta={eta} x={x}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn weyl_plus_closed_form() {
        let q = decaying();
        let v = weyl_plus_tempered(f64::exp, 0.0, &tp(0.5, 0.0), &q).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-7);
        let v = weyl_plus_tempered(f64::exp, 0.0, &tp(0.5, 1.0), &q).unwrap();
        assert_abs_diff_eq!(v, 2f64.powf(-0.5), epsilon = 1e-7);
        let p = tp(0.7, 0.4);
        let v = weyl_plus_tempered(|y| (2.0 * y).exp(), 0.5, &p, &q).unwrap();
        assert_abs_diff_eq!(v, 2.0 * 2.4f64.powf(-0.3) * 1f64.exp(), epsilon = 1e-7);
    }

    #[test]
    fn weyl_minus_examples() {
        let q = decaying();
        let v = weyl_minus_tempered(|y: f64| (-y).exp(), 0.0, &tp(0.5, 0.0), &q).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-7);
        // s < eta keeps f(x+w) e^{-eta w} integrable
        let v = weyl_minus_tempered(|y: f64| (0.5 * y).exp(), 0.0, &tp(0.5, 1.0), &q).unwrap();
        assert_abs_diff_eq!(v, -0.5 * 0.5f64.powf(-0.5), epsilon = 1e-6);
    }

    #[test]
    fn weyl_minus_is_reflected_weyl_plus() {
        let q = decaying();
        let f = |y: f64| (-(y - 0.3).powi(2)).exp() * (1.0 + 0.5 * y);
        for p in [tp(0.4, 0.0), tp(0.6, 1.5)] {
            for x in [-0.7, 0.2, 1.1] {
                let minus = weyl_minus_tempered(f, x, &p, &q).unwrap();
                let plus = weyl_plus_tempered(|y| f(-y), -x, &p, &q).unwrap();
                assert_abs_diff_eq!(minus, plus, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn riesz_cosine_is_multiplier() {
        let p = tp(0.5, 1.0);
        let q = QuadConfig::for_function(&p, 2.0).unwrap();
        let v = riesz_tempered_pointwise(f64::cos, 0.0, &p, &q).unwrap();
        assert_abs_diff_eq!(v, -0.455_09, epsilon = 1e-5);
        assert_abs_diff_eq!(v, crate::spectral::riesz_multiplier(1.0, &p), epsilon = 1e-8);
    }

    #[test]
    fn riesz_vanishing_tempering_limit() {
        let p = tp(0.5, 1e-6);
        // zero-mean oscillation beyond wmax leaves O(k(wmax) / gamma); tolerance is loose
        let q = QuadConfig::new(1e-6, 4000.0, 1e-7, 20_000).unwrap().with_tail(TailModel::Vanishing);
        let v = riesz_tempered_pointwise(|y: f64| (4.0 * y).cos(), 0.0, &p, &q).unwrap();
        assert_abs_diff_eq!(v, -2.0, epsilon = 1e-3);
    }

    #[test]
    fn riesz_reflection_symmetry() {
        let p = tp(0.6, 0.8);
        let q = QuadConfig::for_function(&p, 2.0).unwrap();
        let f = |y: f64| (-(y - 0.4).powi(2)).exp() + 0.3 * (-(y + 1.0).powi(2) * 2.0).exp();
        for x in [-0.5, 0.0, 0.9] {
            let a = riesz_tempered_pointwise(f, x, &p, &q).unwrap();
            let b = riesz_tempered_pointwise(|y| f(-y), -x, &p, &q).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn operators_are_linear() {
        let p = tp(0.45, 0.7);
        let q = QuadConfig::for_function(&p, 3.0).unwrap();
        let f = |y: f64| (-y * y).exp();
        let g = |y: f64| (-(y - 1.0).powi(2) / 2.0).exp() * y.sin();
        let (a, b) = (1.7, -0.6);
        let h = |y: f64| a * f(y) + b * g(y);
        let x = 0.25;
        type Op = fn(&dyn Fn(f64) -> f64, f64, &TemperParams, &QuadConfig) -> Result<f64>;
        let ops: [Op; 4] = [
            |f, x, p, q| marchaud_tempered(f, x, p, q),
            |f, x, p, q| weyl_plus_tempered(f, x, p, q),
            |f, x, p, q| weyl_minus_tempered(f, x, p, q),
            |f, x, p, q| riesz_tempered_pointwise(f, x, p, q),
        ];
        for op in ops {
            let lhs = op(&h, x, &p, &q).unwrap();
            let rhs = a * op(&f, x, &p, &q).unwrap() + b * op(&g, x, &p, &q).unwrap();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 10.0 * q.abs_tol);
        }
    }

    #[test]
    fn overflowing_function_is_rejected() {
        let q = decaying();
        let err = marchaud_tempered(|y: f64| (-y * 20.0).exp(), 0.0, &tp(0.5, 0.0), &q).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. } | Error::Overflow(_)), "{err:?}");
    }
}
