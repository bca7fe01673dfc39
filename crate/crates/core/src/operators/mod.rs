//! Tempered fractional derivatives: space operators (Marchaud, Weyl, Riesz)
//! by quadrature and time derivatives of order 1/2 by product integration.

mod space;
mod time;

pub use space::{marchaud_tempered, riesz_tempered_pointwise, weyl_minus_tempered, weyl_plus_tempered};
pub(crate) use space::weyl_correction;
pub use time::{caputo_half, rl_half, tempered_rl_half, DerivativeSeries, TimeSeries, MAX_TEMPER_EXPONENT};
