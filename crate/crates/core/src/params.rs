//! Parameter types shared by every tempered operator.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Fractional order and tempering rate of a tempered operator.
///
/// `alpha` lies in the open interval (0, 1); `eta >= 0`, with `eta = 0`
/// giving back the untempered (classical) operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperParams {
    alpha: f64,
    eta: f64,
}

impl TemperParams {
    pub fn new(alpha: f64, eta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(invalid(format!("eta must be finite and >= 0, got {eta}")));
        }
        Ok(Self { alpha, eta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Drift `mu` and start point `x0` of a drifted Brownian motion.
///
/// The tempering rate `eta = mu^2 / 4` is always derived from `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    mu: f64,
    x0: f64,
}

impl DriftSpec {
    pub fn new(mu: f64, x0: f64) -> Result<Self> {
        if !mu.is_finite() || !x0.is_finite() {
            return Err(invalid(format!("drift and start must be finite, got mu={mu}, x0={x0}")));
        }
        Ok(Self { mu, x0 })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn eta(&self) -> f64 {
        self.mu * self.mu / 4.0
    }

    /// Same drift, different start point.
    pub fn with_start(&self, x0: f64) -> Self {
        Self { mu: self.mu, x0 }
    }
}

/// How the increment `D(w)` is continued beyond `wmax`, where its kernel mass
/// is integrated analytically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailModel {
    /// `D(w) = D(wmax)`: exact for constants and for functions that have
    /// settled to a limit (including decay to zero).
    #[default]
    Frozen,
    /// Only the `f(x)` terms of `D` survive: suited to zero-mean oscillatory
    /// functions whose shifted values average out.
    Vanishing,
}

/// Accuracy controls for the improper integrals defining the space-fractional
/// operators.
///
/// The integration variable `w` is split into `[0, eps]` (Taylor expansion,
/// integrated analytically), `[eps, wmax]` (adaptive Gauss-Kronrod on a log
/// scale) and `[wmax, inf)` (the increment continued per [`TailModel`] and
/// integrated analytically). Whatever the tail model, the tail error is at
/// most `2 sup|f|` times the kernel mass beyond `wmax`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub eps: f64,
    pub wmax: f64,
    pub abs_tol: f64,
    pub max_subdiv: usize,
    pub tail: TailModel,
}

/// Largest truncation point picked automatically.
pub const WMAX_CAP: f64 = 1.0e6;

impl QuadConfig {
    pub const DEFAULT_EPS: f64 = 1.0e-6;
    pub const DEFAULT_ABS_TOL: f64 = 1.0e-8;
    pub const DEFAULT_MAX_SUBDIV: usize = 2000;

    pub fn new(eps: f64, wmax: f64, abs_tol: f64, max_subdiv: usize) -> Result<Self> {
        let cfg = Self {
            eps,
            wmax,
            abs_tol,
            max_subdiv,
            tail: TailModel::Frozen,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Default accuracy with `wmax` chosen so that the tail error bound,
    /// `2 sup_norm` times the kernel mass beyond `wmax` (Levy kernel plus the
    /// `eta`-weighted kernel), stays below `abs_tol / 10`.
    ///
    /// For `eta = 0` the tail decays only like `wmax^{-alpha}`; if the required
    /// `wmax` exceeds [`WMAX_CAP`] an error is returned and the caller must set
    /// `wmax` explicitly (e.g. when `f` is known to decay).
    pub fn for_function(p: &TemperParams, sup_norm: f64) -> Result<Self> {
        Self::with_tail_bound(p, sup_norm, Self::DEFAULT_ABS_TOL)
    }

    pub fn with_tail_bound(p: &TemperParams, sup_norm: f64, abs_tol: f64) -> Result<Self> {
        if !(sup_norm >= 0.0) || !sup_norm.is_finite() {
            return Err(invalid(format!("sup_norm must be finite and >= 0, got {sup_norm}")));
        }
        let target = abs_tol / 10.0;
        let bound = |w: f64| 2.0 * sup_norm * crate::quad::tail_mass(p, w);
        let mut wmax = 1.0;
        while bound(wmax) >= target {
            wmax *= 2.0;
            if wmax > WMAX_CAP {
                return Err(invalid(format!(
                    "tail bound needs wmax > {WMAX_CAP:e} for alpha={}, eta={}; set wmax explicitly",
                    p.alpha(),
                    p.eta()
                )));
            }
        }
        Self::new(Self::DEFAULT_EPS, wmax.max(10.0 * Self::DEFAULT_EPS), abs_tol, Self::DEFAULT_MAX_SUBDIV)
    }

    pub fn with_tail(self, tail: TailModel) -> Self {
        Self { tail, ..self }
    }

    /// Default accuracy with a caller-chosen truncation point.
    pub fn with_wmax(wmax: f64) -> Result<Self> {
        Self::new(Self::DEFAULT_EPS, wmax, Self::DEFAULT_ABS_TOL, Self::DEFAULT_MAX_SUBDIV)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < self.wmax) || !self.wmax.is_finite() {
            return Err(invalid(format!(
                "need 0 < eps < wmax < inf, got eps={}, wmax={}",
                self.eps, self.wmax
            )));
        }
        if !(self.abs_tol > 0.0) {
            return Err(invalid(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        if self.max_subdiv == 0 {
            return Err(invalid("max_subdiv must be >= 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn temper_params_domain() {
        assert!(TemperParams::new(0.5, 0.0).is_ok());
        assert!(TemperParams::new(0.0, 1.0).is_err());
        assert!(TemperParams::new(1.0, 1.0).is_err());
        assert!(TemperParams::new(0.5, -1e-3).is_err());
        assert!(TemperParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn drift_eta_is_derived() {
        let d = DriftSpec::new(2.0, 0.3).unwrap();
        assert_eq!(d.eta(), 1.0);
        let d = DriftSpec::new(-1.0, 0.0).unwrap();
        assert_eq!(d.eta(), 0.25);
        assert_eq!(d.with_start(4.0).eta(), 0.25);
    }

    #[test]
    fn quad_config_rejects_bad_bounds() {
        assert!(QuadConfig::new(1e-6, 1e-7, 1e-8, 10).is_err());
        assert!(QuadConfig::new(1e-6, 10.0, 0.0, 10).is_err());
        assert!(QuadConfig::new(1e-6, 10.0, 1e-8, 0).is_err());
    }

    #[test]
    fn tail_bound_picks_wmax() {
        let p = TemperParams::new(0.5, 1.0).unwrap();
        let q = QuadConfig::for_function(&p, 1.0).unwrap();
        assert!(2.0 * crate::quad::tail_mass(&p, q.wmax) < q.abs_tol / 10.0);
        assert!(2.0 * crate::quad::tail_mass(&p, q.wmax / 2.0) >= q.abs_tol / 10.0);
        assert_eq!(q.tail, TailModel::Frozen);
        // untempered power tail is too slow for the default tolerance
        let p0 = TemperParams::new(0.5, 0.0).unwrap();
        assert!(QuadConfig::for_function(&p0, 1.0).is_err());
    }
}
