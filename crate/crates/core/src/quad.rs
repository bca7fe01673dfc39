//! Adaptive Gauss-Kronrod quadrature and the power-exponential kernels
//! `c * w^(b-1) * exp(-eta*w)` on `(0, inf)` used by the tempered operators.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use statrs::function::gamma::{gamma, gamma_lr, gamma_ur};

use crate::error::{Error, Result};
use crate::params::{QuadConfig, TailModel, TemperParams};

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Kronrod panel: (estimate, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = r * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kron * r, ((kron - gauss) * r).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_err: f64,
}

/// Globally adaptive G7/K15 integration of `f` over `[a, b]`, starting from
/// `initial` equal panels and bisecting the worst panel until the summed error
/// estimate drops below `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    initial: usize,
    abs_tol: f64,
    max_subdiv: usize,
) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_err: 0.0,
        });
    }
    let initial = initial.max(1);
    let width = (b - a) / initial as f64;
    let mut heap = BinaryHeap::with_capacity(initial + max_subdiv);
    for i in 0..initial {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == initial { b } else { lo + width };
        let (value, err) = gk15(&f, lo, hi);
        heap.push(Panel { a: lo, b: hi, value, err });
    }
    let mut splits = 0;
    loop {
        let (total, err): (f64, f64) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.err));
        if !total.is_finite() {
            return Err(Error::NonFinite {
                at: heap.iter().find(|p| !p.value.is_finite()).map_or(a, |p| p.a),
                value: total,
            });
        }
        // relative floor keeps roundoff from driving endless bisection
        if err <= abs_tol.max(64.0 * f64::EPSILON * total.abs()) {
            return Ok(Integral {
                value: total,
                abs_err: err,
            });
        }
        if splits >= max_subdiv {
            return Err(Error::QuadratureNonConvergence {
                estimate: err,
                tol: abs_tol,
                subdivisions: splits,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel collapsed to adjacent floats
            heap.push(Panel { err: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
        splits += 1;
    }
}

/// `integral_0^x w^(a-1) exp(-eta w) dw`, `a > 0`.
pub(crate) fn lower_incomplete(a: f64, eta: f64, x: f64) -> f64 {
    let z = eta * x;
    if z < 1.0 {
        // sum_k (-eta)^k x^(a+k) / (k! (a+k))
        let mut term = 1.0;
        let mut sum = 1.0 / a;
        for k in 1..60 {
            term *= -z / k as f64;
            let add = term / (a + k as f64);
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        x.powf(a) * sum
    } else {
        gamma(a) * gamma_lr(a, z) / eta.powf(a)
    }
}

/// `integral_x^inf w^(a-1) exp(-eta w) dw` for `a > -1`, `a != 0`, `x > 0`. Infinite
/// when `eta = 0` and `a >= 0`.
pub(crate) fn upper_incomplete(a: f64, eta: f64, x: f64) -> f64 {
    if eta == 0.0 {
        return if a < 0.0 { x.powf(a) / -a } else { f64::INFINITY };
    }
    debug_assert!(a > -1.0 && a != 0.0);
    if a > 0.0 {
        gamma(a) * gamma_ur(a, eta * x) / eta.powf(a)
    } else {
        // Gamma(a, z) = (Gamma(a+1, z) - z^a e^-z) / a
        (upper_incomplete(a + 1.0, eta, x) * eta - x.powf(a) * (-eta * x).exp()) / a
    }
}

/// Kernel `scale * w^(power-1) * exp(-eta w)` on `(0, inf)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernel {
    scale: f64,
    power: f64,
    eta: f64,
}

impl Kernel {
    /// Levy density `alpha e^{-eta w} / (Gamma(1-alpha) w^{alpha+1})`.
    pub fn levy(p: &TemperParams) -> Self {
        Self {
            scale: p.alpha() / gamma(1.0 - p.alpha()),
            power: -p.alpha(),
            eta: p.eta(),
        }
    }

    /// `e^{-eta w} / (Gamma(1-alpha) w^alpha)`, the kernel of the order
    /// `alpha - 1` correction in the Weyl operators.
    pub fn tilted(p: &TemperParams) -> Self {
        Self {
            scale: 1.0 / gamma(1.0 - p.alpha()),
            power: 1.0 - p.alpha(),
            eta: p.eta(),
        }
    }

    pub fn eval(&self, w: f64) -> f64 {
        self.scale * w.powf(self.power - 1.0) * (-self.eta * w).exp()
    }

    /// `integral_0^eps w^j k(w) dw`.
    pub fn moment(&self, j: u32, eps: f64) -> f64 {
        self.scale * lower_incomplete(self.power + j as f64, self.eta, eps)
    }

    /// `integral_W^inf k(w) dw`.
    pub fn tail(&self, w: f64) -> f64 {
        self.scale * upper_incomplete(self.power, self.eta, w)
    }
}

/// Kernel mass beyond `w` that the truncated quadrature drops, per unit
/// sup-norm: Levy tail plus `eta` times the tilted tail.
pub fn tail_mass(p: &TemperParams, w: f64) -> f64 {
    let levy = Kernel::levy(p).tail(w);
    if p.eta() == 0.0 {
        levy
    } else {
        levy + p.eta() * Kernel::tilted(p).tail(w)
    }
}

/// An increment `D(w)` of a test function, e.g. `f(x) - f(x-w)`.
///
/// Near the origin `D(w) ~ c1 w + c2 w^2`; `base` is the part made of `f(x)`
/// alone, used by [`TailModel::Vanishing`].
pub(crate) struct Increment<'a> {
    pub diff: &'a dyn Fn(f64) -> f64,
    pub c1: f64,
    pub c2: f64,
    pub base: f64,
}

/// `integral_0^inf D(w) sum_i c_i k_i(w) dw` split into Taylor head, adaptive
/// body on a logarithmic scale, and analytic constant tail. Kernels with a
/// zero weight are skipped entirely.
pub(crate) fn increment_integral(
    inc: &Increment<'_>,
    kernels: &[(f64, Kernel)],
    cfg: &QuadConfig,
) -> Result<Integral> {
    let active: Vec<(f64, Kernel)> = kernels.iter().copied().filter(|(c, _)| *c != 0.0).collect();
    let head: f64 = active
        .iter()
        .map(|(c, k)| c * (inc.c1 * k.moment(1, cfg.eps) + inc.c2 * k.moment(2, cfg.eps)))
        .sum();
    let weight = |w: f64| active.iter().map(|(c, k)| c * k.eval(w)).sum::<f64>();
    let (ua, ub) = (cfg.eps.ln(), cfg.wmax.ln());
    let body = integrate(
        |u: f64| {
            let w = u.exp();
            (inc.diff)(w) * weight(w) * w
        },
        ua,
        ub,
        (ub - ua).ceil() as usize,
        cfg.abs_tol,
        cfg.max_subdiv,
    )?;
    let far = match cfg.tail {
        TailModel::Frozen => (inc.diff)(cfg.wmax),
        TailModel::Vanishing => inc.base,
    };
    let tail: f64 = if far == 0.0 {
        0.0
    } else {
        active.iter().map(|(c, k)| c * far * k.tail(cfg.wmax)).sum()
    };
    let value = head + body.value + tail;
    if !value.is_finite() {
        return Err(Error::Overflow(format!("increment integral evaluated to {value}")));
    }
    Ok(Integral {
        value,
        abs_err: body.abs_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gk_integrates_polynomials_exactly() {
        let r = integrate(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0, 1, 1e-14, 10).unwrap();
        assert_relative_eq!(r.value, 13.5, epsilon = 1e-13);
    }

    #[test]
    fn gk_adapts_to_endpoint_singularity() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1, 1e-10, 500).unwrap();
        assert_relative_eq!(r.value, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn gk_reports_non_convergence() {
        let err = integrate(|x: f64| (1.0 / x).sin() / x, 0.0, 1.0, 1, 1e-12, 5).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn incomplete_gammas_match_quadrature() {
        for &(a, eta, x) in &[(0.5, 1.0, 0.3), (0.7, 2.0, 3.0), (1.5, 0.0, 2.0), (0.2, 5.0, 1e-6)] {
            let direct = integrate(|w: f64| w.powf(a - 1.0) * (-eta * w).exp(), 0.0, x, 4, 1e-13, 2000)
                .unwrap()
                .value;
            assert_relative_eq!(lower_incomplete(a, eta, x), direct, max_relative = 1e-9);
        }
        for &(a, eta, x) in &[(0.5, 1.0, 0.3), (-0.5, 1.0, 0.3), (-0.3, 0.5, 2.0), (-0.8, 2.0, 1.0)] {
            // w = x / u maps [x, inf) onto (0, 1]
            let direct = integrate(
                |u: f64| {
                    if u == 0.0 {
                        return 0.0;
                    }
                    let w = x / u;
                    w.powf(a - 1.0) * (-eta * w).exp() * x / (u * u)
                },
                0.0,
                1.0,
                8,
                1e-13,
                2000,
            )
            .unwrap()
            .value;
            assert_relative_eq!(upper_incomplete(a, eta, x), direct, max_relative = 1e-9);
        }
        assert_relative_eq!(upper_incomplete(-0.5, 0.0, 4.0), 1.0, epsilon = 1e-15);
        assert!(upper_incomplete(0.5, 0.0, 4.0).is_infinite());
    }

    #[test]
    fn levy_kernel_laplace_exponent() {
        // integral (1 - e^{-lambda w}) Pi(dw) = (eta + lambda)^alpha - eta^alpha
        let p = TemperParams::new(0.5, 1.0).unwrap();
        let cfg = QuadConfig::new(1e-6, 60.0, 1e-11, 2000).unwrap();
        let lambda = 3.0;
        let diff = |w: f64| 1.0 - (-lambda * w).exp();
        let inc = Increment {
            diff: &diff,
            c1: lambda,
            c2: -lambda * lambda / 2.0,
            base: 1.0,
        };
        let r = increment_integral(&inc, &[(1.0, Kernel::levy(&p))], &cfg).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-9);
    }
}
