//! Transform-domain side of the tempered operators: the Laplace symbol of the
//! Marchaud derivative, the Fourier multiplier of the tempered Riesz
//! derivative, FFT application of that multiplier, and the exact Fourier
//! solution of the tempered Riesz diffusion `du/dt = D^{alpha,eta}_{|x|} u`.
//!
//! Transform convention: `F(gamma) = integral e^{+i gamma x} f(x) dx`. A grid of
//! `n` nodes with step `h` is treated as one period of length `L = n h`, so the
//! lattice is `gamma_k = 2 pi k / L` with `k` in `-n/2 .. n/2`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Error, Result};
use crate::grid::{Grid1D, SampledField};
use crate::params::TemperParams;

/// Largest order accepted by [`riesz_constant`]; the constant diverges at 1.
pub const MAX_RIESZ_ALPHA: f64 = 0.999;

/// Laplace exponent `(eta + lambda)^alpha - eta^alpha` of the tempered stable
/// subordinator.
pub fn laplace_symbol(lambda: f64, p: &TemperParams) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(invalid(format!("lambda must be >= 0, got {lambda}")));
    }
    Ok((p.eta() + lambda).powf(p.alpha()) - p.eta().powf(p.alpha()))
}

/// Normalization `-(2 cos(pi alpha / 2))^{-1}` of the Riesz derivative, used
/// for every `eta`.
pub fn riesz_constant(p: &TemperParams) -> Result<f64> {
    if p.alpha() > MAX_RIESZ_ALPHA {
        return Err(invalid(format!(
            "Riesz constant diverges as alpha -> 1; alpha = {} > {MAX_RIESZ_ALPHA}",
            p.alpha()
        )));
    }
    Ok(-1.0 / (2.0 * (PI * p.alpha() / 2.0).cos()))
}

fn constant_or_nan(p: &TemperParams) -> f64 {
    riesz_constant(p).unwrap_or(f64::NAN)
}

/// Fourier multiplier of the tempered Riesz derivative,
/// `C 2|gamma| (eta^2 + gamma^2)^{-(1-alpha)/2} sin((1-alpha) atan(|gamma|/eta))`.
///
/// `eta = 0` returns the untempered limit `-|gamma|^alpha`. NaN when
/// `alpha > MAX_RIESZ_ALPHA`.
pub fn riesz_multiplier(gamma: f64, p: &TemperParams) -> f64 {
    let g = gamma.abs();
    if g == 0.0 {
        return 0.0;
    }
    let (alpha, eta) = (p.alpha(), p.eta());
    if eta == 0.0 {
        return -g.powf(alpha);
    }
    let theta = g.atan2(eta);
    constant_or_nan(p) * 2.0 * g * (eta * eta + g * g).powf(-(1.0 - alpha) / 2.0) * ((1.0 - alpha) * theta).sin()
}

/// The same multiplier written as
/// `C 2|gamma| (eta^2+gamma^2)^{-(1-alpha/2)} (|gamma| cos(alpha th) - eta sin(alpha th))`,
/// `th = atan(|gamma|/eta)`.
pub fn riesz_multiplier_expanded(gamma: f64, p: &TemperParams) -> f64 {
    let g = gamma.abs();
    if g == 0.0 {
        return 0.0;
    }
    let (alpha, eta) = (p.alpha(), p.eta());
    let theta = g.atan2(eta);
    let bracket = g * (alpha * theta).cos() - eta * (alpha * theta).sin();
    constant_or_nan(p) * 2.0 * g * (eta * eta + g * g).powf(-(1.0 - alpha / 2.0)) * bracket
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Plans {
    let mut planner = FftPlanner::new();
    Plans {
        forward: planner.plan_fft_forward(n),
        inverse: planner.plan_fft_inverse(n),
    }
}

/// Signed angular frequencies of the lattice for `grid`.
pub fn frequency_lattice(grid: &Grid1D) -> Vec<f64> {
    let n = grid.len();
    let period = n as f64 * grid.step();
    (0..n)
        .map(|k| {
            let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            2.0 * PI * signed / period
        })
        .collect()
}

/// `F(gamma_k) ~ h sum_j f_j e^{i gamma_k x_j}`.
fn forward_transform(grid: &Grid1D, values: &[f64], freqs: &[f64], plans: &Plans) -> Vec<Complex64> {
    let h = grid.step();
    let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    // sum_j f_j e^{+2 pi i jk/n}
    plans.inverse.process(&mut buf);
    buf.iter()
        .zip(freqs)
        .map(|(c, g)| c * Complex64::from_polar(h, g * grid.lo()))
        .collect()
}

/// `f_j = (1/L) sum_k F_k e^{-i gamma_k x_j}`; returns complex samples.
fn inverse_transform(grid: &Grid1D, coeffs: &[Complex64], freqs: &[f64], plans: &Plans) -> Vec<Complex64> {
    let period = grid.len() as f64 * grid.step();
    let mut buf: Vec<Complex64> = coeffs
        .iter()
        .zip(freqs)
        .map(|(c, g)| c * Complex64::from_polar(1.0 / period, -g * grid.lo()))
        .collect();
    plans.forward.process(&mut buf);
    buf
}

/// Samples together with their discrete Fourier coefficients.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid1D,
    values: Vec<f64>,
    freqs: Vec<f64>,
    coeffs: Vec<Complex64>,
    periodic: bool,
}

/// Edge magnitude below which a field counts as compactly supported.
pub const EDGE_TOL: f64 = 1e-10;

impl SpectralField {
    /// Transform a field that decays to (numerically) zero at both ends.
    /// The edge condition is checked when an operator is applied.
    pub fn from_field(field: &SampledField) -> Self {
        Self::build(field, false)
    }

    /// Transform a field that is genuinely periodic with period `n h`
    /// (e.g. `cos(gamma_0 x)` with `gamma_0` on the lattice); no edge check.
    pub fn periodic(field: &SampledField) -> Self {
        Self::build(field, true)
    }

    fn build(field: &SampledField, periodic: bool) -> Self {
        let grid = *field.grid();
        let freqs = frequency_lattice(&grid);
        let coeffs = forward_transform(&grid, field.values(), &freqs, &plans(grid.len()));
        Self {
            grid,
            values: field.values().to_vec(),
            freqs,
            coeffs,
            periodic,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn to_field(&self) -> Result<SampledField> {
        SampledField::new(self.grid, self.values.clone())
    }

    /// Samples recovered from the coefficients; the round trip is exact up to
    /// FFT rounding.
    pub fn reconstruct(&self) -> Vec<f64> {
        inverse_transform(&self.grid, &self.coeffs, &self.freqs, &plans(self.grid.len()))
            .into_iter()
            .map(|c| c.re)
            .collect()
    }

    fn edge_magnitude(&self) -> f64 {
        self.values[0].abs().max(self.values[self.values.len() - 1].abs())
    }
}

/// Largest tolerated `max|Im| / max|Re|` after an inverse transform.
pub const IMAG_RESIDUE_TOL: f64 = 1e-9;

/// Apply the tempered Riesz derivative by multiplying the coefficients with
/// [`riesz_multiplier`] and transforming back.
pub fn riesz_apply(field: &SpectralField, p: &TemperParams) -> Result<SpectralField> {
    riesz_constant(p)?;
    if !field.periodic && field.edge_magnitude() >= EDGE_TOL {
        return Err(Error::Periodization {
            value: field.edge_magnitude(),
        });
    }
    let coeffs: Vec<Complex64> = field
        .coeffs
        .iter()
        .zip(&field.freqs)
        .map(|(c, g)| c * riesz_multiplier(*g, p))
        .collect();
    let back = inverse_transform(&field.grid, &coeffs, &field.freqs, &plans(field.grid.len()));
    let values = real_part(&back)?;
    Ok(SpectralField {
        grid: field.grid,
        values,
        freqs: field.freqs.clone(),
        coeffs,
        periodic: field.periodic,
    })
}

fn real_part(samples: &[Complex64]) -> Result<Vec<f64>> {
    let re_max = samples.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    let im_max = samples.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if re_max > 0.0 && im_max > IMAG_RESIDUE_TOL * re_max {
        return Err(Error::Overflow(format!(
            "imaginary residue {im_max:e} relative to {re_max:e} after inverse transform"
        )));
    }
    Ok(samples.iter().map(|c| c.re).collect())
}

/// Largest node count [`diffusion_grid`] will use.
pub const MAX_DIFFUSION_NODES: usize = 1 << 22;

/// Spectral weight `exp(t psi)` allowed at the Nyquist frequency.
pub const DIFFUSION_SPECTRAL_TAIL: f64 = 1e-12;

/// Grid for [`solve_riesz_diffusion`]: half-width `10 (1 + t^{1/alpha})`,
/// `n = 2^k >= 1024` nodes with `x = 0` at node `n/2`, refined until
/// `exp(t psi)` at the Nyquist frequency is below [`DIFFUSION_SPECTRAL_TAIL`].
/// The node at `+half_width` is the periodic image of `-half_width` and is
/// not stored.
///
/// Small `t` with small `alpha` needs resolution `gamma ~ (30 / t)^{1/alpha}`;
/// beyond [`MAX_DIFFUSION_NODES`] this fails with `SpectrumUnresolved`.
pub fn diffusion_grid(t: f64, p: &TemperParams) -> Result<Grid1D> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("t must be finite and > 0, got {t}")));
    }
    riesz_constant(p)?;
    let half = 10.0 * (1.0 + t.powf(1.0 / p.alpha()));
    let tail = |n: usize| (t * riesz_multiplier(PI * n as f64 / (2.0 * half), p)).exp();
    let mut n = 1024usize;
    while tail(n) > DIFFUSION_SPECTRAL_TAIL {
        if n >= MAX_DIFFUSION_NODES {
            return Err(Error::SpectrumUnresolved {
                detail: format!("exp(t psi) = {:e} at Nyquist with {n} nodes", tail(n)),
            });
        }
        n *= 2;
    }
    let h = 2.0 * half / n as f64;
    Grid1D::new(-half, half - h, n)
}

/// Most negative value [`solve_riesz_diffusion`] accepts.
pub const NEGATIVITY_TOL: f64 = 1e-8;

/// Mass tolerance of the diffusion solver.
pub const MASS_TOL: f64 = 1e-4;

/// Solution of `du/dt = D^{alpha,eta}_{|x|} u`, `u(x, 0) = delta(x)`, at time
/// `t`: the inverse transform of `exp(t psi(gamma_k))` sampled on `grid`.
///
/// Mass is the periodic rectangle sum `h sum_j u_j`.
pub fn solve_riesz_diffusion(t: f64, grid: &Grid1D, p: &TemperParams) -> Result<SampledField> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("t must be finite and > 0, got {t}")));
    }
    riesz_constant(p)?;
    let freqs = frequency_lattice(grid);
    let coeffs: Vec<Complex64> = freqs
        .iter()
        .map(|g| Complex64::new((t * riesz_multiplier(*g, p)).exp(), 0.0))
        .collect();
    let back = inverse_transform(grid, &coeffs, &freqs, &plans(grid.len()));
    let values = real_part(&back)?;
    let mass = grid.step() * values.iter().sum::<f64>();
    if !((mass - 1.0).abs() <= MASS_TOL) {
        return Err(Error::MassCheck { mass, tol: MASS_TOL });
    }
    let low = values.iter().copied().fold(f64::INFINITY, f64::min);
    if low < -NEGATIVITY_TOL {
        return Err(Error::SpectrumUnresolved {
            detail: format!("solution dips to {low:e}; refine the grid"),
        });
    }
    SampledField::new(*grid, values)
}
