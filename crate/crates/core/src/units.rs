//! Atomic units: hbar = e = m_e = 1.

use crate::error::{Error, Result};
use std::f64::consts::PI;

pub const HBAR: f64 = 1.0;
/// Speed of light, 1/alpha.
pub const C_LIGHT: f64 = 137.036;
/// Vacuum permittivity, 1/(4 pi).
pub const EPS0: f64 = 1.0 / (4.0 * PI);

/// Spontaneous emission rate of a dipole transition, gamma = 4 w^3 d^2 / (3 c^3).
pub fn rate_from_dipole(dipole: f64, omega: f64) -> f64 {
    4.0 * omega.powi(3) * dipole * dipole / (3.0 * C_LIGHT.powi(3))
}

/// Inverse of [`rate_from_dipole`], taking the positive root.
pub fn dipole_from_rate(gamma: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "transition frequency must be positive, got {omega}"
        )));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!(
            "decay rate must be non-negative, got {gamma}"
        )));
    }
    Ok((3.0 * gamma * C_LIGHT.powi(3) / (4.0 * omega.powi(3))).sqrt())
}
