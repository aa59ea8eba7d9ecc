use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;

/// The two configuration constants of the smallness conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub mu0: f64,
    pub c0: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self { mu0: 1.0, c0: 1.0 }
    }
}

impl Constants {
    pub fn new(mu0: f64, c0: f64) -> Result<Self> {
        if !(mu0 > 0.0 && mu0.is_finite() && c0 > 0.0 && c0.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "constants must be positive, got mu0={mu0}, C0={c0}"
            )));
        }
        Ok(Self { mu0, c0 })
    }
}

/// `F(x) = ln((1+√(1−x))/(1−√(1−x)))` on `(0, 1]`.
///
/// Evaluated as `2 ln(1+√(1−x)) − ln x`, which has no cancellation anywhere
/// on the domain and gives `F(1) = 0` exactly.
pub fn f_log(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::OutOfDomain(format!("F(x) needs 0 < x <= 1, got {x}")));
    }
    let s = (1.0 - x).sqrt();
    Ok(2.0 * s.ln_1p() - x.ln())
}

/// `δ(η, E) = μ₀⁻² E e^{−1/(C₀η)}`.
pub fn delta_of(eta: f64, energy: f64, k: Constants) -> Result<f64> {
    if !(eta > 0.0 && energy > 0.0) {
        return Err(Error::InvalidParams(format!(
            "delta needs eta > 0 and E > 0, got eta={eta}, E={energy}"
        )));
    }
    Ok(energy / (k.mu0 * k.mu0) * (-1.0 / (k.c0 * eta)).exp())
}

/// `T* = μ₀⁻² ‖a‖₂²`.
pub fn tstar_of(a: &SpectralField, mu0: f64) -> f64 {
    a.l2_sq() / (mu0 * mu0)
}

/// `δ/T* = e^{−1/(C₀η)}` when `E = ‖a‖₂²`.
pub fn delta_ratio(eta: f64, c0: f64) -> f64 {
    (-1.0 / (c0 * eta)).exp()
}
