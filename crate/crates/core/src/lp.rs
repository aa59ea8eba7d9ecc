//! Smooth dyadic partition of unity in frequency.
//!
//! `ψ(r) = χ(r/2) − χ(r)` where `χ` is a C^∞ step equal to 1 on `[0, 0.6]`
//! and 0 on `[0.9, ∞)`. Hence `supp ψ = [0.6, 1.8]`, `ψ ≡ 1` on `[0.9, 1.2]`
//! and `Σ_q ψ(r/2^q) = 1` for every `r > 0` by telescoping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

pub const STEP_LO: f64 = 0.6;
pub const STEP_HI: f64 = 0.9;
/// Support of the radial profile.
pub const SUPPORT: (f64, f64) = (STEP_LO, 2.0 * STEP_HI);
/// Interval on which the radial profile is identically one.
pub const PLATEAU: (f64, f64) = (STEP_HI, 2.0 * STEP_LO);

#[inline]
fn h(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth non-increasing step: 1 for `r ≤ 0.6`, 0 for `r ≥ 0.9`.
#[inline]
pub fn step(r: f64) -> f64 {
    if r <= STEP_LO {
        return 1.0;
    }
    if r >= STEP_HI {
        return 0.0;
    }
    let a = h(STEP_HI - r);
    let b = h(r - STEP_LO);
    a / (a + b)
}

/// Radial profile of the Littlewood–Paley bump.
#[inline]
pub fn psi(r: f64) -> f64 {
    step(0.5 * r) - step(r)
}

#[inline]
pub fn lambda(q: i32) -> f64 {
    2f64.powi(q)
}

/// `φ_q(ξ) = ψ(|ξ|/λ_q)`.
#[inline]
pub fn phi_q(norm_xi: f64, q: i32) -> f64 {
    psi(norm_xi / lambda(q))
}

/// Range of dyadic blocks touching the frequencies of a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPBasis {
    pub q_min: i32,
    pub q_max: i32,
}

impl LPBasis {
    pub fn for_grid(grid: &GridSpec) -> Self {
        let lo = grid.kappa();
        let hi = grid.max_frequency();
        Self::for_band(lo, hi)
    }

    /// Blocks whose support meets `[lo, hi]`.
    pub fn for_band(lo: f64, hi: f64) -> Self {
        let q_min = (lo / SUPPORT.1).log2().floor() as i32 + 1;
        let q_max = (hi / SUPPORT.0).log2().ceil() as i32 - 1;
        Self { q_min, q_max }
    }

    pub fn check(&self, q: i32) -> Result<()> {
        if q < self.q_min || q > self.q_max {
            return Err(Error::BlockOutOfRange {
                q,
                min: self.q_min,
                max: self.q_max,
            });
        }
        Ok(())
    }

    pub fn blocks(&self) -> std::ops::RangeInclusive<i32> {
        self.q_min..=self.q_max
    }

    /// Blocks with `φ_q(r) > 0` for the given frequency magnitude.
    pub fn active(r: f64) -> impl Iterator<Item = i32> {
        let lo = (r / SUPPORT.1).log2().floor() as i32;
        let hi = (r / SUPPORT.0).log2().ceil() as i32;
        (lo..=hi).filter(move |&q| phi_q(r, q) > 0.0)
    }
}
