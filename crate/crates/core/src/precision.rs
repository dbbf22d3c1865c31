//! Precision contract, error-carrying values and the crate error type.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionConfig {
    /// Decimal digits of working precision; above 16 the double-double kernels are used.
    pub working_digits: u32,
    pub target_abs_err: f64,
    pub max_terms: usize,
    pub max_refine: usize,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            working_digits: 34,
            target_abs_err: 1e-12,
            max_terms: 5_000_000,
            max_refine: 60,
        }
    }
}

impl PrecisionConfig {
    pub fn new(working_digits: u32, target_abs_err: f64) -> Result<Self> {
        let p = PrecisionConfig {
            working_digits,
            target_abs_err,
            ..Default::default()
        };
        p.validate()?;
        Ok(p)
    }

    /// Double precision with the given target; the fast path for zero finding.
    pub fn double(target_abs_err: f64) -> Self {
        PrecisionConfig {
            working_digits: 16,
            target_abs_err,
            ..Default::default()
        }
    }

    pub fn with_target(mut self, target_abs_err: f64) -> Self {
        self.target_abs_err = target_abs_err;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_abs_err > 0.0) || !self.target_abs_err.is_finite() {
            return Err(Error::Config(format!(
                "target_abs_err must be positive, got {}",
                self.target_abs_err
            )));
        }
        if self.working_digits < 15 {
            return Err(Error::Config(format!(
                "working_digits must be at least 15, got {}",
                self.working_digits
            )));
        }
        if self.max_terms == 0 || self.max_refine == 0 {
            return Err(Error::Config("max_terms and max_refine must be positive".into()));
        }
        Ok(())
    }

    pub fn wants_dd(&self) -> bool {
        self.working_digits > 16
    }

    /// Unit roundoff of the arithmetic selected by `working_digits`.
    pub fn unit_roundoff(&self) -> f64 {
        if self.wants_dd() {
            crate::dd::Dd::EPSILON
        } else {
            f64::EPSILON / 2.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueWithError {
    pub value: Complex64,
    pub err: f64,
}

impl ValueWithError {
    pub fn new(value: Complex64, err: f64) -> Self {
        ValueWithError { value, err }
    }

    /// Checks the result against the requested target.
    pub fn checked(value: Complex64, err: f64, target: f64, what: &str) -> Result<Self> {
        if !err.is_finite() || !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Precision(format!("{what}: non-finite result")));
        }
        if err > target {
            return Err(Error::Precision(format!(
                "{what}: error estimate {err:.3e} exceeds target {target:.3e}"
            )));
        }
        Ok(ValueWithError { value, err })
    }
}

/// A value that may lie outside the `f64` exponent range: the represented number is
/// `value * exp(-log_scale)`, with `err` relative to `value`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledValue {
    pub value: Complex64,
    pub err: f64,
    pub log_scale: f64,
}

impl ScaledValue {
    pub fn unscaled(&self) -> ValueWithError {
        let f = (-self.log_scale).exp();
        let value = self.value * f;
        // f64 rounding of the scale and of the product
        let rounding = value.norm() * (self.log_scale.abs() + 2.0) * f64::EPSILON;
        ValueWithError::new(value, self.err * f + rounding)
    }

    /// `|a/b - 1|` computed without leaving log space.
    pub fn rel_diff(&self, other: &ScaledValue) -> f64 {
        let ratio = self.value / other.value * (other.log_scale - self.log_scale).exp();
        (ratio - 1.0).norm()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("PoleError: {0}")]
    Pole(String),
    #[error("DomainError: {0}")]
    Domain(String),
    #[error("PrecisionError: {0}")]
    Precision(String),
    #[error("ModeError: {0}")]
    Mode(String),
    #[error("BoundaryZeroError: {0}")]
    BoundaryZero(String),
    #[error("ConvergenceError: {0}")]
    Convergence(String),
    #[error("MarginError: sup residual {sup:.4e} vs delta {delta:.4e} ({detail})")]
    Margin { sup: f64, delta: f64, detail: String },
    #[error("PoleProximityError: {0}")]
    PoleProximity(String),
    #[error("PoleCrossingError: {0}")]
    PoleCrossing(String),
    #[error("NoShiftFoundError: best sup {best_sup:.4e} at tau {best_tau:.6}")]
    NoShiftFound { best_tau: f64, best_sup: f64 },
    #[error("WitnessNotFoundError: {0}")]
    WitnessNotFound(String),
    #[error("ConfigError: {0}")]
    Config(String),
}

impl Error {
    /// Short type name used by the command line for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Pole(_) => "PoleError",
            Error::Domain(_) => "DomainError",
            Error::Precision(_) => "PrecisionError",
            Error::Mode(_) => "ModeError",
            Error::BoundaryZero(_) => "BoundaryZeroError",
            Error::Convergence(_) => "ConvergenceError",
            Error::Margin { .. } => "MarginError",
            Error::PoleProximity(_) => "PoleProximityError",
            Error::PoleCrossing(_) => "PoleCrossingError",
            Error::NoShiftFound { .. } => "NoShiftFoundError",
            Error::WitnessNotFound(_) => "WitnessNotFoundError",
            Error::Config(_) => "ConfigError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(PrecisionConfig::default().validate().is_ok());
        assert!(PrecisionConfig::new(10, 1e-12).is_err());
        assert!(PrecisionConfig::new(34, 0.0).is_err());
        assert!(PrecisionConfig::new(34, -1.0).is_err());
    }

    #[test]
    fn checked_rejects_large_error() {
        let v = Complex64::new(1.0, 0.0);
        assert!(ValueWithError::checked(v, 1e-3, 1e-6, "x").is_err());
        assert!(ValueWithError::checked(v, 1e-9, 1e-6, "x").is_ok());
    }

    #[test]
    fn scaled_rel_diff() {
        let a = ScaledValue { value: Complex64::new(2.0, 0.0), err: 0.0, log_scale: 1000.0 };
        let b = ScaledValue {
            value: Complex64::new(2.0 * 1f64.exp(), 0.0),
            err: 0.0,
            log_scale: 1001.0,
        };
        assert!(a.rel_diff(&b) < 1e-15);
    }
}
