//! Heat-flow deformations of extended-Selberg-class L-functions.

pub mod dd;
pub mod deform;
pub mod mellin;
pub mod parallel;
pub mod precision;
pub mod quad;
pub mod real;
pub mod selberg;
pub mod xieval;
pub mod zerofind;
pub mod almostperiod;
pub mod special;

pub use dd::Dd;
pub use precision::{Error, PrecisionConfig, Result, ScaledValue, ValueWithError};
pub use real::{CxExt, Real, C64};
