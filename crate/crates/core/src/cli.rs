//! The `tempered` command line: every library operation as a subcommand that
//! writes a numeric table as CSV or JSON.
//!
//! Exit codes: 0 success, 2 invalid input (flags, parameters, output path),
//! 3 numerical failure (non-convergence, failed mass or residual checks).

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{invalid, Error, Result};
use crate::grid::{make_grid, Grid1D};
use crate::montecarlo::{
    drifted_batch, empirical_laplace, inverse_stable_batch, ks_critical_1pct, ks_statistic, reflected_batch,
    tempered_batch, EstimateWithError, SampleBatch,
};
use crate::operators::{
    caputo_half, marchaud_tempered, riesz_tempered_pointwise, rl_half, tempered_rl_half, weyl_minus_tempered,
    weyl_plus_tempered, DerivativeSeries, TimeSeries,
};
use crate::params::{DriftSpec, QuadConfig, TailModel, TemperParams};
use crate::processes::{
    drifted_density, folded_drifted_cdf, folded_drifted_density, heat_kernel, mittag_leffler_half, normal_cdf,
    EvalPoint,
};
use crate::spectral::{
    diffusion_grid, laplace_symbol, riesz_multiplier, riesz_multiplier_expanded, solve_riesz_diffusion,
};
use crate::verify::{
    check_g_half_derivative, check_initial_concentration, check_weyl_decomposition, residual_theorem1,
    residual_theorem2, ResidualReport, G_HALF_THRESHOLD, THM1_THRESHOLD, THM2_THRESHOLD,
};

const UNITS: &str = "Units: x, y in space units; t in time units; alpha dimensionless in (0,1); \
eta a tempering rate (1/space for space operators, 1/time for time operators); \
mu a drift (space/time); lambda a Laplace variable (1/time); gamma an angular frequency (1/space). \
Brownian motion has Var B(t) = 2t.";

/// One run: subcommand with its parameters, output destination and format.
#[derive(Debug, Parser, Serialize)]
#[command(
    name = "tempered",
    version,
    about = "Tempered fractional derivatives, subordinators and drifted Brownian densities",
    after_help = UNITS,
    args_override_self = true
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for Monte Carlo and residual sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// `v` or `lo:hi:n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Points {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Points {
    fn single(v: f64) -> Self {
        Self { lo: v, hi: v, n: 1 }
    }

    fn values(&self) -> Result<Vec<f64>> {
        if self.n == 1 {
            return Ok(vec![self.lo]);
        }
        Ok(self.grid()?.to_vec())
    }

    fn grid(&self) -> Result<Grid1D> {
        make_grid(self.lo, self.hi, self.n)
    }
}

impl FromStr for Points {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}"));
        match parts.as_slice() {
            [v] => Ok(Points::single(num(v)?)),
            [lo, hi, n] => {
                let n = n.trim().parse::<usize>().map_err(|e| format!("bad count {n:?}: {e}"))?;
                if n == 0 {
                    return Err("count must be >= 1".into());
                }
                Ok(Points { lo: num(lo)?, hi: num(hi)?, n })
            }
            _ => Err(format!("expected `value` or `lo:hi:n`, got {s:?}")),
        }
    }
}

impl fmt::Display for Points {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Laplace exponent of the tempered stable subordinator,
    /// (eta + lambda)^alpha - eta^alpha. Columns: lambda, value.
    Symbol(SymbolArgs),
    /// Fractional derivatives of a named test function.
    #[command(subcommand)]
    Deriv(DerivCommand),
    /// Fourier multiplier psi(gamma) of the tempered Riesz derivative, closed
    /// sine-arctangent form and the expanded form. Columns: gamma, psi, psi_expanded.
    Multiplier(MultiplierArgs),
    /// Exact tempered Riesz diffusion du/dt = D u from a point mass at 0, by
    /// inverting exp(t psi(gamma)). Columns: x, u.
    Diffusion(DiffusionArgs),
    /// Transition densities of drifted Brownian motion.
    #[command(subcommand)]
    Density(DensityCommand),
    /// Mittag-Leffler function of order 1/2 on the negative axis,
    /// E_{1/2}(-z) = e^{z^2} erfc(z). Columns: z, value.
    Ml(MlArgs),
    /// Monte Carlo samplers checked against closed forms.
    #[command(subcommand)]
    Mc(McCommand),
    /// Residual checks of the fractional equations.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct TemperArgs {
    /// Stability index alpha in (0, 1).
    #[arg(long)]
    pub alpha: f64,
    /// Tempering rate eta >= 0.
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
}

impl TemperArgs {
    fn params(&self) -> Result<TemperParams> {
        TemperParams::new(self.alpha, self.eta)
    }
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct SymbolArgs {
    #[command(flatten)]
    pub temper: TemperArgs,
    /// Laplace variable lambda >= 0: a value or lo:hi:n.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Points,
}

/// Test functions for the space and time operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Func {
    /// e^{s x}
    Exp,
    /// e^{-s x^2}
    Gauss,
    /// cos(s x)
    Cos,
    /// the constant s
    Const,
    /// x^s for x >= 0, 0 for x < 0
    Pow,
}

impl Func {
    fn eval(self, s: f64, x: f64) -> f64 {
        match self {
            Func::Exp => (s * x).exp(),
            Func::Gauss => (-s * x * x).exp(),
            Func::Cos => (s * x).cos(),
            Func::Const => s,
            Func::Pow => {
                if x >= 0.0 {
                    x.powf(s)
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct FuncArgs {
    /// Test function.
    #[arg(long, value_enum, default_value_t = Func::Exp)]
    pub func: Func,
    /// Parameter s of the test function.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub s: f64,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct QuadArgs {
    /// Radius of the analytic Taylor head on [0, eps].
    #[arg(long)]
    pub eps: Option<f64>,
    /// Truncation point of the numerical integral (default: from a tail bound).
    #[arg(long)]
    pub wmax: Option<f64>,
    /// Absolute tolerance of the adaptive quadrature.
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Subdivision budget of the adaptive quadrature.
    #[arg(long)]
    pub max_subdiv: Option<usize>,
    /// Continuation of the increment beyond wmax.
    #[arg(long, value_enum, default_value_t = TailArg::Frozen)]
    pub tail: TailArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailArg {
    /// increment frozen at its value at wmax
    Frozen,
    /// only the f(x) part survives (zero-mean oscillations)
    Vanishing,
}

impl QuadArgs {
    fn config(&self, p: &TemperParams, sup_norm: f64) -> Result<QuadConfig> {
        let abs_tol = self.abs_tol.unwrap_or(QuadConfig::DEFAULT_ABS_TOL);
        let base = match self.wmax {
            Some(w) => QuadConfig::with_wmax(w)?,
            None => QuadConfig::with_tail_bound(p, sup_norm, abs_tol)?,
        };
        let q = QuadConfig {
            eps: self.eps.unwrap_or(base.eps),
            abs_tol,
            max_subdiv: self.max_subdiv.unwrap_or(base.max_subdiv),
            tail: match self.tail {
                TailArg::Frozen => TailModel::Frozen,
                TailArg::Vanishing => TailModel::Vanishing,
            },
            ..base
        };
        q.validate()?;
        Ok(q)
    }
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct SpaceDerivArgs {
    #[command(flatten)]
    pub temper: TemperArgs,
    #[command(flatten)]
    pub func: FuncArgs,
    /// Evaluation point(s): a value or lo:hi:n.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub x: Points,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct TimeDerivArgs {
    #[command(flatten)]
    pub func: FuncArgs,
    /// Time grid 0:t_max:n on which f(t) is sampled.
    #[arg(long, default_value = "0:1:101")]
    pub t: Points,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct TemperedTimeArgs {
    #[command(flatten)]
    pub inner: TimeDerivArgs,
    /// Tempering rate eta >= 0 (1/time).
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivCommand {
    /// Tempered Marchaud derivative: integral of (f(x) - f(x-w)) against the
    /// Levy density alpha e^{-eta w} w^{-alpha-1} / Gamma(1-alpha).
    /// Columns: x, value[, exact].
    Marchaud(SpaceDerivArgs),
    /// Riemann-Liouville derivative of order 1/2 (L1 product integration plus
    /// f(0)/sqrt(pi t)). Columns: t, value.
    Rl(TimeDerivArgs),
    /// Dzherbashyan-Caputo derivative of order 1/2 (L1 scheme). Columns: t, value.
    Caputo(TimeDerivArgs),
    /// Tempered Riemann-Liouville derivative of order 1/2,
    /// e^{-eta t} D^{1/2}(e^{eta t} f) - sqrt(eta) f. Columns: t, value.
    TemperedRl(TemperedTimeArgs),
    /// Tempered upper Weyl derivative (backward increments). Columns: x, value[, exact].
    #[command(name = "weyl+")]
    #[serde(rename = "weyl+")]
    WeylPlus(SpaceDerivArgs),
    /// Tempered lower Weyl derivative (forward increments). Columns: x, value[, exact].
    #[command(name = "weyl-")]
    #[serde(rename = "weyl-")]
    WeylMinus(SpaceDerivArgs),
    /// Tempered Riesz derivative from symmetric increments, scaled by
    /// -1/(2 cos(pi alpha/2)). Columns: x, value[, exact].
    Riesz(SpaceDerivArgs),
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct MultiplierArgs {
    #[command(flatten)]
    pub temper: TemperArgs,
    /// Frequency gamma: a value or lo:hi:n.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Points,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct DiffusionArgs {
    #[command(flatten)]
    pub temper: TemperArgs,
    /// Time t > 0.
    #[arg(long)]
    pub t: f64,
    /// Solver grid lo:hi:n (default: chosen to resolve the spectrum).
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<Points>,
    /// Only nodes with |x| <= window are written.
    #[arg(long, default_value_t = 5.0)]
    pub window: f64,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct DensityArgs {
    /// Drift mu.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    /// Start point x.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    /// Target point(s) y: a value or lo:hi:n.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Points,
    /// Time t > 0.
    #[arg(long)]
    pub t: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityCommand {
    /// Density u(x, y, t) of B(t) + mu t + x; solves the tempered half-order
    /// equation with sign weight a(x, y). Columns: y, value.
    U(DensityArgs),
    /// Density v(x, y, t) of |B(t) + mu t| + x on y >= x >= 0; solves the
    /// tempered half-order equation with the tanh coefficient. Columns: y, value.
    V(DensityArgs),
    /// Heat kernel g(x, y, t) = e^{-(y-x)^2/4t} / sqrt(4 pi t). Columns: y, value.
    G(DensityArgs),
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct MlArgs {
    /// Argument z >= 0: a value or lo:hi:n.
    #[arg(long)]
    pub z: Points,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct McCommon {
    /// Time t > 0.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Number of draws.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// RNG seed; output is identical for a given seed at any thread count.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the raw draws (column: sample) instead of the summary.
    #[arg(long)]
    pub dump: bool,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct McSubordinatorArgs {
    #[command(flatten)]
    pub temper: TemperArgs,
    #[command(flatten)]
    pub common: McCommon,
    /// Laplace variables for the empirical transform, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
    pub lambda: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct McDriftArgs {
    /// Drift mu.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    /// Start point x.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    #[command(flatten)]
    pub common: McCommon,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct McInverseArgs {
    #[command(flatten)]
    pub common: McCommon,
    /// Laplace variables for the empirical transform, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
    pub lambda: Vec<f64>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum McCommand {
    /// Tempered stable subordinator by exponential rejection of stable draws.
    /// Columns: lambda, estimate, stderr, exact with exact
    /// exp(-t((eta+lambda)^alpha - eta^alpha)).
    Subordinator(McSubordinatorArgs),
    /// Endpoint of B(t) + mu t + x. Columns: statistic, value, stderr, exact
    /// (mean, KS distance against the normal CDF, 1% critical value).
    Drifted(McDriftArgs),
    /// Endpoint of |B(t) + mu t| + x. Columns as for drifted, against the
    /// folded normal CDF.
    Reflected(McDriftArgs),
    /// Inverse of the 1/2-stable subordinator, equal in law to |B(t)|.
    /// Columns: lambda, estimate, stderr, exact with exact E_{1/2}(-lambda sqrt t).
    Inverse(McInverseArgs),
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct Threshold {
    /// Fail (exit 3) when max_abs exceeds this (default: the reference threshold).
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct VerifyThm1Args {
    /// Drift mu >= 0; eta = mu^2/4.
    #[arg(long, default_value_t = 2.0)]
    pub mu: f64,
    #[arg(long, allow_hyphen_values = true, default_value = "-1:1:64")]
    pub x: Points,
    #[arg(long, allow_hyphen_values = true, default_value = "-1:1:64")]
    pub y: Points,
    /// Reported time window lo:hi:n (lo > 0).
    #[arg(long, default_value = "0.2:2:256")]
    pub t: Points,
    #[command(flatten)]
    pub threshold: Threshold,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct VerifyThm2Args {
    /// Drift mu >= 0; eta = mu^2/4.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Start point x >= 0.
    #[arg(long, default_value_t = 0.5)]
    pub x: f64,
    /// Target grid lo:hi:n with lo > x.
    #[arg(long, default_value = "0.653125:4:64")]
    pub y: Points,
    #[arg(long, default_value = "0.2:2:511")]
    pub t: Points,
    #[command(flatten)]
    pub threshold: Threshold,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct VerifyGArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, default_value = "0.5:3:64")]
    pub y: Points,
    #[arg(long, default_value = "0.2:2:256")]
    pub t: Points,
    #[command(flatten)]
    pub threshold: Threshold,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct VerifyWeylArgs {
    #[command(flatten)]
    pub inner: SpaceDerivArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitDensity {
    /// drifted density u
    U,
    /// folded drifted density v
    V,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true, after_help = UNITS)]
pub struct VerifyInitArgs {
    #[arg(long, value_enum, default_value_t = InitDensity::U)]
    pub density: InitDensity,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    /// Time(s) t > 0: a value or lo:hi:n.
    #[arg(long, default_value = "0.0001")]
    pub t: Points,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyCommand {
    /// Residual of D^{1/2,eta}_t u + sqrt(eta) u = a(x,y)(du/dx + sqrt(eta) u)
    /// = -a(x,y)(du/dy - sqrt(eta) u) for the drifted density, off the band
    /// |x - y| <= 0.1.
    Thm1(VerifyThm1Args),
    /// Residual of D^{1/2,eta}_t v = -dv/dy + sqrt(eta) tanh(sqrt(eta)(y-x)) v
    /// - (mu/2) v for the folded density, plus the boundary value
    /// v(x,x,t) = e^{-eta t}/sqrt(pi t) and the wrong-sign comparison.
    Thm2(VerifyThm2Args),
    /// Residual of D^{1/2}_t g = -dg/dy for the heat kernel on y > x.
    G(VerifyGArgs),
    /// |Weyl+ f - (Marchaud f + eta I f)| with I the order alpha-1 integral
    /// of the increments against e^{-eta w} w^{-alpha} / Gamma(1-alpha).
    Weyl(VerifyWeylArgs),
    /// Mass of the density within |y - x| < 0.1 (tends to 1 as t -> 0).
    Init(VerifyInitArgs),
}

/// A numeric result table plus an optional structured report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub report: Option<Value>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            report: None,
        }
    }

    fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal form.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn render_csv(t: &Table) -> String {
    let mut out = t.columns.join(",");
    out.push('\n');
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or_else(|| Value::String(fmt_f64(v)))
}

fn render_json(params: Value, t: &Table) -> String {
    let results: Vec<Value> = t
        .rows
        .iter()
        .map(|row| {
            let m: Map<String, Value> = t.columns.iter().cloned().zip(row.iter().map(|v| number(*v))).collect();
            Value::Object(m)
        })
        .collect();
    let doc = json!({
        "params": params,
        "results": results,
        "report": t.report.clone().unwrap_or(Value::Null),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

fn sup_hint(f: &FuncArgs, xs: &[f64]) -> f64 {
    xs.iter().map(|x| f.func.eval(f.s, *x).abs()).fold(1.0, f64::max)
}

/// Closed forms on e^{sx} (and cos(sx) for Riesz); None when not available.
fn space_exact(kind: &str, a: &SpaceDerivArgs, p: &TemperParams, x: f64) -> Option<f64> {
    let (al, eta, s) = (p.alpha(), p.eta(), a.func.s);
    match (kind, a.func.func) {
        (_, Func::Const) => Some(0.0),
        ("marchaud", Func::Exp) if eta + s > 0.0 => Some(((eta + s).powf(al) - eta.powf(al)) * (s * x).exp()),
        ("weyl+", Func::Exp) if eta + s > 0.0 => Some(s * (eta + s).powf(al - 1.0) * (s * x).exp()),
        ("weyl-", Func::Exp) if eta - s > 0.0 => Some(-s * (eta - s).powf(al - 1.0) * (s * x).exp()),
        ("riesz", Func::Cos) => Some(riesz_multiplier(s, p) * (s * x).cos()),
        _ => None,
    }
}

fn space_deriv(kind: &str, a: &SpaceDerivArgs) -> Result<Table> {
    let p = a.temper.params()?;
    let xs = a.x.values()?;
    let q = a.quad.config(&p, sup_hint(&a.func, &xs))?;
    let f = |x: f64| a.func.func.eval(a.func.s, x);
    let has_exact = space_exact(kind, a, &p, 0.0).is_some();
    let mut t = Table::new(if has_exact { &["x", "value", "exact"] } else { &["x", "value"] });
    for x in xs {
        let v = match kind {
            "marchaud" => marchaud_tempered(f, x, &p, &q)?,
            "weyl+" => weyl_plus_tempered(f, x, &p, &q)?,
            "weyl-" => weyl_minus_tempered(f, x, &p, &q)?,
            "riesz" => riesz_tempered_pointwise(f, x, &p, &q)?,
            _ => unreachable!("unknown space operator {kind}"),
        };
        let mut row = vec![x, v];
        if let Some(e) = space_exact(kind, a, &p, x) {
            row.push(e);
        }
        t.push(row);
    }
    t.report = Some(serde_json::to_value(q).expect("config serializes"));
    Ok(t)
}

fn time_series(a: &TimeDerivArgs) -> Result<TimeSeries> {
    if a.t.lo != 0.0 {
        return Err(invalid(format!("--t must start at 0, got {}", a.t)));
    }
    TimeSeries::from_fn(a.t.grid()?, |t| a.func.func.eval(a.func.s, t))
}

fn series_table(d: &DerivativeSeries) -> Table {
    let mut t = Table::new(&["t", "value"]);
    for (time, v) in d.iter() {
        t.push(vec![time, v]);
    }
    t
}

fn estimate_row(lead: f64, e: &EstimateWithError, exact: f64) -> Vec<f64> {
    vec![lead, e.value, e.stderr, exact]
}

fn dump(batch: &SampleBatch) -> Table {
    let mut t = Table::new(&["sample"]);
    for s in &batch.samples {
        t.push(vec![*s]);
    }
    t
}

/// Mean and KS rows for an endpoint batch against `cdf`.
fn endpoint_summary<F: Fn(f64) -> f64>(batch: &SampleBatch, mean_exact: f64, cdf: F) -> Result<Table> {
    let mean = EstimateWithError::from_values(&batch.samples)?;
    let ks = ks_statistic(batch, cdf)?;
    let crit = ks_critical_1pct(batch.len());
    let mut t = Table::new(&["statistic", "value", "stderr", "exact"]);
    // statistic codes: 0 = mean, 1 = KS distance (exact column holds the 1% critical value)
    t.push(vec![0.0, mean.value, mean.stderr, mean_exact]);
    t.push(vec![1.0, ks, 0.0, crit]);
    t.report = Some(json!({
        "n": batch.len(),
        "seed": batch.seed,
        "ks_rejected_at_1pct": ks > crit,
        "statistic_codes": {"0": "mean", "1": "ks"},
    }));
    Ok(t)
}

fn report_table(r: &ResidualReport) -> Table {
    let mut cols = vec![
        "max_abs", "l2", "refined_max_abs", "reduction", "argmax_x", "argmax_y", "argmax_t", "nodes",
    ];
    let keys: Vec<&str> = r.diagnostics.keys().map(|k| k.as_str()).collect();
    cols.extend(keys.iter());
    let mut t = Table::new(&cols);
    let mut row = vec![
        r.max_abs,
        r.l2,
        r.refined_max_abs,
        r.reduction(),
        r.argmax[0],
        r.argmax[1],
        r.argmax[2],
        r.nodes as f64,
    ];
    row.extend(r.diagnostics.values());
    t.push(row);
    t.report = Some(serde_json::to_value(r).expect("report serializes"));
    t
}

/// Outcome of a run: the table to write and an error that still sets the
/// exit code after writing (a failed threshold keeps its report).
pub struct Outcome {
    pub table: Table,
    pub failure: Option<Error>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self { table, failure: None }
    }
}

fn checked(r: ResidualReport, threshold: f64) -> Outcome {
    let failure = r.check_threshold(threshold).err();
    Outcome {
        table: report_table(&r),
        failure,
    }
}

fn grid_of(p: &Points, name: &str) -> Result<Grid1D> {
    if p.n < 2 {
        return Err(invalid(format!("--{name} needs lo:hi:n with n >= 2")));
    }
    p.grid()
}

/// Runs the computation selected by `cfg` without writing anything.
pub fn dispatch(cfg: &RunConfig) -> Result<Outcome> {
    Ok(match &cfg.command {
        Command::Symbol(a) => {
            let p = a.temper.params()?;
            let mut t = Table::new(&["lambda", "value"]);
            for l in a.lambda.values()? {
                t.push(vec![l, laplace_symbol(l, &p)?]);
            }
            t.into()
        }
        Command::Deriv(d) => match d {
            DerivCommand::Marchaud(a) => space_deriv("marchaud", a)?.into(),
            DerivCommand::WeylPlus(a) => space_deriv("weyl+", a)?.into(),
            DerivCommand::WeylMinus(a) => space_deriv("weyl-", a)?.into(),
            DerivCommand::Riesz(a) => space_deriv("riesz", a)?.into(),
            DerivCommand::Rl(a) => series_table(&rl_half(&time_series(a)?)?).into(),
            DerivCommand::Caputo(a) => series_table(&caputo_half(&time_series(a)?)?).into(),
            DerivCommand::TemperedRl(a) => series_table(&tempered_rl_half(&time_series(&a.inner)?, a.eta)?).into(),
        },
        Command::Multiplier(a) => {
            let p = a.temper.params()?;
            crate::spectral::riesz_constant(&p)?;
            let mut t = Table::new(&["gamma", "psi", "psi_expanded"]);
            for g in a.gamma.values()? {
                t.push(vec![g, riesz_multiplier(g, &p), riesz_multiplier_expanded(g, &p)]);
            }
            t.into()
        }
        Command::Diffusion(a) => {
            let p = a.temper.params()?;
            let grid = match &a.grid {
                Some(g) => grid_of(g, "grid")?,
                None => diffusion_grid(a.t, &p)?,
            };
            let u = solve_riesz_diffusion(a.t, &grid, &p)?;
            let mut t = Table::new(&["x", "u"]);
            for (x, v) in grid.points().zip(u.values()) {
                if x.abs() <= a.window {
                    t.push(vec![x, *v]);
                }
            }
            let mass = grid.step() * u.values().iter().sum::<f64>();
            t.report = Some(json!({"mass": mass, "grid": {"lo": grid.lo(), "hi": grid.hi(), "n": grid.len()}}));
            t.into()
        }
        Command::Density(d) => {
            let (a, which) = match d {
                DensityCommand::U(a) => (a, 'u'),
                DensityCommand::V(a) => (a, 'v'),
                DensityCommand::G(a) => (a, 'g'),
            };
            let drift = DriftSpec::new(a.mu, a.x)?;
            let mut t = Table::new(&["y", "value"]);
            for y in a.y.values()? {
                let pt = EvalPoint::new(a.x, y, a.t)?;
                let v = match which {
                    'u' => drifted_density(pt, &drift)?,
                    'v' => folded_drifted_density(pt, &drift)?,
                    _ => heat_kernel(pt)?,
                };
                t.push(vec![y, v]);
            }
            t.into()
        }
        Command::Ml(a) => {
            let mut t = Table::new(&["z", "value"]);
            for z in a.z.values()? {
                t.push(vec![z, mittag_leffler_half(z)?]);
            }
            t.into()
        }
        Command::Mc(m) => mc(m)?.into(),
        Command::Verify(v) => verify(v)?,
    })
}

fn mc(m: &McCommand) -> Result<Table> {
    match m {
        McCommand::Subordinator(a) => {
            let p = a.temper.params()?;
            let c = &a.common;
            let batch = tempered_batch(&p, c.t, c.n, c.seed)?;
            if c.dump {
                return Ok(dump(&batch));
            }
            let mut t = Table::new(&["lambda", "estimate", "stderr", "exact"]);
            for &l in &a.lambda {
                let e = empirical_laplace(&batch, l)?;
                t.push(estimate_row(l, &e, (-c.t * laplace_symbol(l, &p)?).exp()));
            }
            let rate = batch.acceptance_rate();
            let expect = (-c.t * p.eta().powf(p.alpha())).exp();
            let binom = (expect * (1.0 - expect) / batch.attempts as f64).sqrt();
            t.report = Some(json!({
                "n": batch.len(),
                "seed": batch.seed,
                "attempts": batch.attempts,
                "acceptance_rate": rate,
                "acceptance_expected": expect,
                "acceptance_stderr": binom,
            }));
            Ok(t)
        }
        McCommand::Drifted(a) => {
            let d = DriftSpec::new(a.mu, a.x)?;
            let c = &a.common;
            let batch = drifted_batch(&d, c.t, c.n, c.seed)?;
            if c.dump {
                return Ok(dump(&batch));
            }
            let s = (2.0 * c.t).sqrt();
            let m = a.x + a.mu * c.t;
            endpoint_summary(&batch, m, |y| normal_cdf((y - m) / s))
        }
        McCommand::Reflected(a) => {
            let d = DriftSpec::new(a.mu, a.x)?;
            let c = &a.common;
            let batch = reflected_batch(&d, c.t, c.n, c.seed)?;
            if c.dump {
                return Ok(dump(&batch));
            }
            let s = (2.0 * c.t).sqrt();
            let m = a.mu * c.t;
            // E|N(m, s^2)|
            let folded_mean = s * (2.0 / std::f64::consts::PI).sqrt() * (-m * m / (2.0 * s * s)).exp()
                + m * (1.0 - 2.0 * normal_cdf(-m / s));
            endpoint_summary(&batch, a.x + folded_mean, |y| folded_drifted_cdf(a.x, y, c.t, &d))
        }
        McCommand::Inverse(a) => {
            let c = &a.common;
            let batch = inverse_stable_batch(c.t, c.n, c.seed)?;
            if c.dump {
                return Ok(dump(&batch));
            }
            let mut t = Table::new(&["lambda", "estimate", "stderr", "exact"]);
            for &l in &a.lambda {
                let e = empirical_laplace(&batch, l)?;
                t.push(estimate_row(l, &e, mittag_leffler_half(l * c.t.sqrt())?));
            }
            let s = (2.0 * c.t).sqrt();
            let ks = ks_statistic(&batch, |y| if y <= 0.0 { 0.0 } else { 2.0 * normal_cdf(y / s) - 1.0 })?;
            t.report = Some(json!({
                "n": batch.len(),
                "seed": batch.seed,
                "ks_folded_normal": ks,
                "ks_critical_1pct": ks_critical_1pct(batch.len()),
            }));
            Ok(t)
        }
    }
}

fn verify(v: &VerifyCommand) -> Result<Outcome> {
    Ok(match v {
        VerifyCommand::Thm1(a) => {
            let d = DriftSpec::new(a.mu, 0.0)?;
            let r = residual_theorem1(&d, &grid_of(&a.x, "x")?, &grid_of(&a.y, "y")?, &grid_of(&a.t, "t")?)?;
            checked(r, a.threshold.threshold.unwrap_or(THM1_THRESHOLD))
        }
        VerifyCommand::Thm2(a) => {
            let d = DriftSpec::new(a.mu, a.x)?;
            let r = residual_theorem2(&d, a.x, &grid_of(&a.y, "y")?, &grid_of(&a.t, "t")?)?;
            checked(r, a.threshold.threshold.unwrap_or(THM2_THRESHOLD))
        }
        VerifyCommand::G(a) => {
            let r = check_g_half_derivative(a.x, &grid_of(&a.y, "y")?, &grid_of(&a.t, "t")?)?;
            checked(r, a.threshold.threshold.unwrap_or(G_HALF_THRESHOLD))
        }
        VerifyCommand::Weyl(w) => {
            let a = &w.inner;
            let p = a.temper.params()?;
            let xs = a.x.values()?;
            let q = a.quad.config(&p, sup_hint(&a.func, &xs))?;
            let mut t = Table::new(&["x", "discrepancy"]);
            for x in xs {
                t.push(vec![x, check_weyl_decomposition(|z| a.func.func.eval(a.func.s, z), x, &p, &q)?]);
            }
            t.into()
        }
        VerifyCommand::Init(a) => {
            let d = DriftSpec::new(a.mu, a.x)?;
            let mut t = Table::new(&["t", "mass"]);
            for time in a.t.values()? {
                let m = match a.density {
                    InitDensity::U => check_initial_concentration(drifted_density, &d, time)?,
                    InitDensity::V => check_initial_concentration(folded_drifted_density, &d, time)?,
                };
                t.push(vec![time, m]);
            }
            t.into()
        }
    })
}

/// Reads `key = value` lines (`#` comments, blank lines ignored) into flags.
fn config_flags(text: &str) -> std::result::Result<Vec<OsString>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value, got {line:?}", i + 1))?;
        let (k, v) = (k.trim().replace('_', "-"), v.trim());
        if k.is_empty() || k.starts_with('-') {
            return Err(format!("config line {}: bad key {k:?}", i + 1));
        }
        out.push(format!("--{k}").into());
        out.push(v.into());
    }
    Ok(out)
}

/// Removes `--config PATH` from `args` and splices the file's flags in front
/// of the first flag so that command-line flags override them.
fn expand_config(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().ok_or("--config needs a path")?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.into());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path:?}: {e}"))?;
    let flags = config_flags(&text)?;
    let at = rest
        .iter()
        .skip(1)
        .position(|a| a.to_string_lossy().starts_with('-'))
        .map_or(rest.len(), |p| p + 1);
    rest.splice(at..at, flags);
    Ok(rest)
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

fn write_output(cfg: &RunConfig, params: Value, table: &Table) -> std::io::Result<()> {
    let text = match cfg.format {
        Format::Csv => render_csv(table),
        Format::Json => render_json(params, table),
    };
    match &cfg.output {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// Parses `args` (program name first), runs, writes, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = match expand_config(args.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cfg.threads {
        if n == 0 {
            eprintln!("error: --threads must be >= 1");
            return 2;
        }
        // only the first pool request in a process takes effect
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = match dispatch(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let params = serde_json::to_value(&cfg.command).expect("arguments serialize");
    if let Err(e) = write_output(&cfg, params, &outcome.table) {
        eprintln!("error: cannot write output: {e}");
        return 2;
    }
    match outcome.failure {
        Some(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        None => 0,
    }
}

/// Renders a run's output as it would be written, for callers that want the
/// text without touching stdout or the filesystem.
pub fn render<I, T>(args: I) -> std::result::Result<String, String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = expand_config(args.into_iter().map(Into::into).collect())?;
    let cfg = RunConfig::try_parse_from(args).map_err(|e| e.to_string())?;
    let outcome = dispatch(&cfg).map_err(|e| e.to_string())?;
    let params = serde_json::to_value(&cfg.command).map_err(|e| e.to_string())?;
    Ok(match cfg.format {
        Format::Csv => render_csv(&outcome.table),
        Format::Json => render_json(params, &outcome.table),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn out(args: &[&str]) -> String {
        let mut v = vec!["tempered"];
        v.extend_from_slice(args);
        render(v).unwrap()
    }

    #[test]
    fn symbol_prints_one() {
        assert_eq!(out(&["symbol", "--alpha", "0.5", "--eta", "1", "--lambda", "3"]), "lambda,value\n3.0,1.0\n");
    }

    #[test]
    fn points_parse() {
        assert_eq!("2.5".parse::<Points>().unwrap(), Points::single(2.5));
        assert_eq!("-1:1:5".parse::<Points>().unwrap(), Points { lo: -1.0, hi: 1.0, n: 5 });
        assert!("1:2".parse::<Points>().is_err());
        assert!("0:1:0".parse::<Points>().is_err());
        assert_eq!("-1:1:5".parse::<Points>().unwrap().values().unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn negative_arguments_accepted() {
        let s = out(&["density", "u", "--mu", "-1", "--x", "-0.5", "--y", "-1:0:3", "--t", "1"]);
        assert_eq!(s.lines().count(), 4);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["tempered", "symbol", "--alpha", "1.5", "--lambda", "1"]), 2);
        assert_eq!(run(["tempered", "symbol", "--alpha", "0.5", "--lambda", "1", "--bogus", "1"]), 2);
        assert_eq!(run(["tempered", "nonsense"]), 2);
        assert_eq!(run(["tempered", "--help"]), 0);
        // resolution the spectrum cannot reach
        assert_eq!(run(["tempered", "diffusion", "--alpha", "0.3", "--eta", "1", "--t", "0.001"]), 3);
    }

    #[test]
    fn coarse_verification_fails_with_report() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let code = run([
            "tempered", "verify", "thm2", "--mu", "1", "--x", "0.5", "--y", "0.7:4:12", "--t", "0.2:2:24",
            "--format", "json", "--output", path.to_str().unwrap(),
        ]);
        assert_eq!(code, 3);
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(doc["report"]["max_abs"].as_f64().unwrap() > THM2_THRESHOLD);
        assert_eq!(doc["params"]["verify"]["thm2"]["mu"], 1.0);
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# symbol run\nalpha = 0.5\neta=1\nlambda = 8\n").unwrap();
        let p = path.to_str().unwrap();
        assert_eq!(out(&["symbol", "--config", p]), "lambda,value\n8.0,2.0\n");
        assert_eq!(out(&["symbol", "--config", p, "--lambda", "3"]), "lambda,value\n3.0,1.0\n");
        std::fs::write(&path, "alpha = 0.5\nunknown_key = 3\n").unwrap();
        assert_eq!(run(["tempered", "symbol", "--config", p, "--lambda", "1"]), 2);
        assert!(config_flags("no equals sign").is_err());
    }

    #[test]
    fn space_derivative_reports_exact_column() {
        let s = out(&["deriv", "marchaud", "--alpha", "0.5", "--eta", "1", "--func", "exp", "--s", "1", "--x", "0"]);
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "x,value,exact");
        let vals: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert!((vals[1] - vals[2]).abs() < 1e-6, "{vals:?}");
    }

    #[test]
    fn json_has_params_results_report() {
        let s = out(&["ml", "--z", "0:1:3", "--format", "json"]);
        let doc: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(doc["results"].as_array().unwrap().len(), 3);
        assert_eq!(doc["results"][0]["value"], 1.0);
        assert!(doc["report"].is_null());
        assert!(doc["params"]["ml"]["z"].is_object());
    }

    #[test]
    fn help_lists_units_for_subcommands() {
        let mut cmd = <RunConfig as clap::CommandFactory>::command();
        let help = cmd
            .find_subcommand_mut("deriv")
            .unwrap()
            .find_subcommand_mut("marchaud")
            .unwrap()
            .render_long_help()
            .to_string();
        assert!(help.contains("Units:"));
        assert!(help.contains("Levy density"));
    }
}
