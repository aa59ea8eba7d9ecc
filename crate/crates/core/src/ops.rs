//! Fourier-multiplier operators on [`SpectralField`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::lp::{self, LPBasis};

#[inline]
pub(crate) fn norm_sq(xi: [f64; 3]) -> f64 {
    xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]
}

/// `ξ̂ ξ̂ᵀ` removal: `v − ξ (ξ·v)/|ξ|²`. The zero mode passes through.
#[inline]
pub(crate) fn project_mode(xi: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    let k2 = norm_sq(xi);
    if k2 == 0.0 {
        return v;
    }
    let dot = (v[0] * xi[0] + v[1] * xi[1] + v[2] * xi[2]) / k2;
    [v[0] - dot * xi[0], v[1] - dot * xi[1], v[2] - dot * xi[2]]
}

/// Leray projection `I − ξξᵀ/|ξ|²`.
pub fn leray_project(f: &SpectralField) -> SpectralField {
    f.map_modes(|_, xi, v| project_mode(xi, v)).with_flag(true)
}

/// Heat semigroup `e^{tΔ}`, symbol `e^{−t|ξ|²}`.
pub fn heat_propagate(f: &SpectralField, t: f64) -> Result<SpectralField> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.apply_scalar_symbol(|xi| (-t * norm_sq(xi)).exp()))
}

/// Littlewood–Paley block `f_q = 𝓕⁻¹[φ(ξ/λ_q) f̂]`.
pub fn lp_block(f: &SpectralField, q: i32) -> Result<SpectralField> {
    LPBasis::for_grid(f.grid()).check(q)?;
    Ok(f.apply_scalar_symbol(|xi| lp::phi_q(norm_sq(xi).sqrt(), q)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `|ξ| ≥ λ`
    High,
    /// `|ξ| < λ`
    Low,
}

/// Sharp frequency cutoff `P_{≥λ}` or `P_{<λ}`.
pub fn band_project(f: &SpectralField, cutoff: f64, side: Side) -> SpectralField {
    f.apply_scalar_symbol(|xi| {
        let high = norm_sq(xi).sqrt() >= cutoff;
        if high == (side == Side::High) {
            1.0
        } else {
            0.0
        }
    })
}

/// Fractional Laplacian `Λ^α = |∇|^α` for `0 ≤ α < 1`.
pub fn lambda_alpha(f: &SpectralField, alpha: f64) -> Result<SpectralField> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidExponent(alpha));
    }
    Ok(lambda_pow(f, alpha))
}

/// `|ξ|^s` for any real `s`; the zero mode maps to zero unless `s == 0`.
pub(crate) fn lambda_pow(f: &SpectralField, s: f64) -> SpectralField {
    if s == 0.0 {
        return f.clone();
    }
    f.apply_scalar_symbol(|xi| {
        let k2 = norm_sq(xi);
        if k2 == 0.0 {
            0.0
        } else {
            k2.powf(0.5 * s)
        }
    })
}

/// `a_λ(x) = λ a(λx)` with `λ = 2^k`, realized on the box of side `L/λ`.
///
/// The DFT indices are unchanged; wavenumbers and amplitudes scale by `λ`.
pub fn rescale(f: &SpectralField, k: i32) -> Result<SpectralField> {
    if k == 0 {
        return Ok(f.clone());
    }
    let grid = f.grid().rescaled(k)?;
    let lam = 2f64.powi(k);
    let coeffs = f.coeffs().iter().map(|c| c * lam).collect();
    let mut out = SpectralField::from_coeffs(grid, coeffs)?;
    out.set_solenoidal(f.is_solenoidal());
    Ok(out)
}

/// `‖∇f‖₂² = L³ Σ |ξ|² |f̂|²`.
pub fn gradient_l2_sq(f: &SpectralField) -> f64 {
    let np = f.grid().points();
    let c = f.coeffs();
    let mut acc = 0.0;
    for (idx, xi) in f.grid().modes() {
        let k2 = norm_sq(xi);
        if k2 == 0.0 {
            continue;
        }
        acc += k2 * (c[idx].norm_sqr() + c[np + idx].norm_sqr() + c[2 * np + idx].norm_sqr());
    }
    f.grid().volume() * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use std::f64::consts::PI;

    fn single_mode(g: GridSpec, m: [i64; 3], amp: [f64; 3]) -> SpectralField {
        let n = g.n_per_axis;
        let mut f = SpectralField::zeros(g);
        let idx = (g.index_of(m[0]) * n + g.index_of(m[1])) * n + g.index_of(m[2]);
        let midx = (g.index_of(-m[0]) * n + g.index_of(-m[1])) * n + g.index_of(-m[2]);
        let v = amp.map(|a| Complex64::new(a, 0.0));
        f.set_mode(idx, v);
        f.set_mode(midx, v);
        f
    }

    #[test]
    fn leray_single_mode_example() {
        let g = GridSpec::new(8, 2.0 * PI).unwrap();
        let f = single_mode(g, [1, 0, 0], [1.0, 1.0, 0.0]);
        let p = leray_project(&f);
        let idx = g.index_of(1) * 64;
        let v = p.mode(idx);
        assert!(v[0].norm() < 1e-15);
        assert!((v[1].re - 1.0).abs() < 1e-15);
        assert!(p.divergence_residual() < 1e-15);
    }

    #[test]
    fn heat_halves_unit_mode_at_ln2() {
        let g = GridSpec::new(8, 2.0 * PI).unwrap();
        let f = single_mode(g, [0, 1, 0], [0.0, 0.0, 1.0]);
        let h = heat_propagate(&f, 2f64.ln()).unwrap();
        let idx = g.index_of(1) * 8;
        assert!((h.mode(idx)[2].re - 0.5).abs() < 1e-15);
        assert_eq!(heat_propagate(&f, 0.0).unwrap(), f);
        assert!(matches!(heat_propagate(&f, -1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn lambda_alpha_examples() {
        let g = GridSpec::new(16, 2.0 * PI).unwrap();
        let f = single_mode(g, [4, 0, 0], [0.0, 1.0, 0.0]);
        let h = lambda_alpha(&f, 0.5).unwrap();
        let idx = g.index_of(4) * 256;
        assert!((h.mode(idx)[1].re - 2.0).abs() < 1e-14);
        assert!(lambda_alpha(&f, 1.0).is_err());
        assert!(lambda_alpha(&f, -0.1).is_err());
        assert_eq!(lambda_alpha(&f, 0.0).unwrap(), f);
    }

    #[test]
    fn band_projection_above_nyquist_is_zero() {
        let g = GridSpec::new(8, 2.0 * PI).unwrap();
        let f = single_mode(g, [3, 1, 0], [0.0, 0.0, 1.0]);
        let hi = band_project(&f, g.max_frequency() * 1.01, Side::High);
        assert!(hi.is_zero());
        let lo = band_project(&f, g.max_frequency() * 1.01, Side::Low);
        assert_eq!(lo, f);
    }

    #[test]
    fn lp_block_rejects_out_of_range() {
        let g = GridSpec::new(8, 2.0 * PI).unwrap();
        let f = SpectralField::zeros(g);
        let b = LPBasis::for_grid(&g);
        match lp_block(&f, b.q_max + 3) {
            Err(Error::BlockOutOfRange { min, max, .. }) => {
                assert_eq!((min, max), (b.q_min, b.q_max))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lp_block_is_identity_at_annulus_center() {
        let g = GridSpec::new(16, 2.0 * PI).unwrap();
        let f = single_mode(g, [4, 0, 0], [0.0, 1.0, 0.0]);
        assert_eq!(lp_block(&f, 2).unwrap(), f);
    }

    #[test]
    fn rescale_zero_is_identity_and_halves_energy() {
        let g = GridSpec::new(8, 2.0 * PI).unwrap();
        let f = single_mode(g, [1, 2, 0], [0.0, 0.0, 1.0]);
        assert_eq!(rescale(&f, 0).unwrap(), f);
        let r = rescale(&f, 1).unwrap();
        assert!((r.l2_sq() - 0.5 * f.l2_sq()).abs() < 1e-12 * f.l2_sq());
        assert!(rescale(&f, 2000).is_err());
    }
}
