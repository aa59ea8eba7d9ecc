use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::lp;
use crate::norms::{delta_of, Constants};

/// Lattice points per axis inside each cube `Q_q`.
pub const CUBE_OFFSETS: [i64; 3] = [-1, 0, 1];

/// Parameters of the explicit large-BMO⁻¹ example, fully resolved.
///
/// `q₁` is picked so that the uncorrected energy is closest (in ratio) to
/// the target `E` subject to `λ_{q₁+1} ≤ 1/√δ`; the remaining mismatch is
/// absorbed by the amplitude `correction`. The example is `feasible` when
/// that correction lies in `[1/2, 2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleParams {
    pub eps: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub q0: i32,
    pub q1: i32,
    pub sigma: f64,
    pub cprime: f64,
    pub delta: f64,
    #[serde(rename = "T_star")]
    pub t_star: f64,
    pub mu0: f64,
    pub c0: f64,
    pub correction: f64,
    pub feasible: bool,
    /// Human-readable attainability inequality, with its numbers.
    pub attainability: String,
}

impl ExampleParams {
    /// Resolves the parameters for a block spread `q₁ − q₀ = spread`.
    pub fn resolve(eps: f64, m: f64, energy: f64, spread: u32, k: Constants, cprime: f64) -> Result<Self> {
        if !(eps > 0.0 && m > 0.0 && energy > 0.0 && cprime > 0.0 && energy.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "need eps, M, E, C' > 0; got eps={eps}, M={m}, E={energy}, C'={cprime}"
            )));
        }
        let delta = delta_of(eps, energy, k)?;
        let q1_max = (-0.5 * delta.log2()).floor() as i32 - 1;
        let s = spread as i32;
        // E_unc(q₁) = K · 2^{S − q₁}
        let log2_k = unit_energy(eps, spread, cprime).log2();
        let q1_near = (log2_k + s as f64 - energy.log2()).round() as i32;
        let q1 = q1_near.min(q1_max);
        let q0 = q1 - s;
        let e_unc = uncorrected_energy(eps, q0, q1, cprime);
        let correction = (energy / e_unc).sqrt();
        let feasible = (0.5..=2.0).contains(&correction);
        let e_min = uncorrected_energy(eps, q1_max - s, q1_max, cprime) / 4.0;
        let attainability = if feasible {
            format!("E = {energy:e} >= E_min = {e_min:e} (E_unc at q1_max = {q1_max}, over 4)")
        } else {
            format!("violated: E = {energy:e} < E_min = {e_min:e} (E_unc at q1_max = {q1_max}, over 4)")
        };
        Ok(Self {
            eps,
            m,
            energy,
            q0,
            q1,
            sigma: lp::lambda(q0),
            cprime,
            delta,
            t_star: energy / (k.mu0 * k.mu0),
            mu0: k.mu0,
            c0: k.c0,
            correction,
            feasible,
            attainability,
        })
    }

    pub fn spread(&self) -> u32 {
        (self.q1 - self.q0) as u32
    }

    /// Frequency unit `σ/16` of the example's box.
    pub fn kappa(&self) -> f64 {
        self.sigma / 16.0
    }

    pub fn box_length(&self) -> f64 {
        2.0 * PI / self.kappa()
    }

    /// Index of the centre of `Q_q` along the first axis.
    pub fn carrier(&self, q: i32) -> i64 {
        1i64 << (q - self.q0 + 4)
    }

    /// Smallest grid holding every `Q_q` strictly below the Nyquist index.
    pub fn min_grid(&self) -> u64 {
        (2 * (self.carrier(self.q1) as u64 + 2)).next_power_of_two().max(8)
    }

    pub fn grid(&self, n: usize) -> Result<GridSpec> {
        GridSpec::new(n, self.box_length())
    }

    /// Discrete Fourier coefficient scale of block `q` (before the unit symbol).
    pub fn block_amplitude(&self, q: i32) -> f64 {
        let kappa = self.kappa();
        let a = self.eps / (2.0 * self.cprime * self.sigma.powi(3));
        (2.0 * PI).powf(-1.5) * kappa.powi(3) * a * lp::lambda(q) * self.correction
    }

    pub fn blocks(&self) -> impl Iterator<Item = i32> {
        self.q0..=self.q1
    }
}

/// `E_unc / 2^{S − q₁}`: the uncorrected energy at `q₁ = S`.
fn unit_energy(eps: f64, spread: u32, cprime: f64) -> f64 {
    eps * eps * (4f64.powi(spread as i32 + 1) - 1.0) / (1024.0 * cprime * cprime)
}

/// `‖a‖₂² = 48 κ³ A² Σ_q λ_q²` before amplitude correction.
pub fn uncorrected_energy(eps: f64, q0: i32, q1: i32, cprime: f64) -> f64 {
    unit_energy(eps, (q1 - q0) as u32, cprime) * 2f64.powi(-q0)
}

/// Unit symbol `ξ⊥*/|ξ⊥*|` at transverse lattice offsets `(m₂, m₃)`.
#[inline]
pub fn transverse_symbol(m2: i64, m3: i64) -> [f64; 3] {
    if m2 == 0 && m3 == 0 {
        return [0.0; 3];
    }
    let r = ((m2 * m2 + m3 * m3) as f64).sqrt();
    [0.0, -(m3 as f64) / r, m2 as f64 / r]
}

/// Builds the example on `grid`, whose box must be `2π·16/σ`.
pub fn build_example(p: &ExampleParams, grid: &GridSpec) -> Result<SpectralField> {
    if grid.box_length != p.box_length() {
        return Err(Error::InvalidParams(format!(
            "box length {} does not match the example box {}",
            grid.box_length,
            p.box_length()
        )));
    }
    if (grid.n_per_axis as u64) < p.min_grid() {
        return Err(Error::Unresolvable {
            min_grid: p.min_grid(),
        });
    }
    let n = grid.n_per_axis;
    let mut f = SpectralField::zeros(*grid);
    for q in p.blocks() {
        let c = p.carrier(q);
        let amp = p.block_amplitude(q);
        for m1 in CUBE_OFFSETS {
            for m2 in CUBE_OFFSETS {
                for m3 in CUBE_OFFSETS {
                    let s = transverse_symbol(m2, m3);
                    let v = s.map(|x| Complex64::new(amp * x, 0.0));
                    for sign in [1, -1] {
                        let idx = (grid.index_of(sign * (c + m1)) * n + grid.index_of(sign * m2)) * n
                            + grid.index_of(sign * m3);
                        f.set_mode(idx, v);
                    }
                }
            }
        }
    }
    f.set_solenoidal(true);
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(spread: u32) -> ExampleParams {
        let k = Constants::default();
        let cp = 0.3;
        // energy chosen so that q₀ = 0 exactly
        let e = uncorrected_energy(0.05, 0, spread as i32, cp);
        let p = ExampleParams::resolve(0.05, 1.0, e, spread, k, cp).unwrap();
        assert_eq!(p.q0, 0);
        p
    }

    #[test]
    fn resolution_is_checked() {
        let p = params(1);
        assert_eq!(p.min_grid(), 128);
        let g = p.grid(64).unwrap();
        assert!(matches!(
            build_example(&p, &g),
            Err(Error::Unresolvable { min_grid: 128 })
        ));
        let wrong = GridSpec::new(128, 1.0).unwrap();
        assert!(build_example(&p, &wrong).is_err());
    }

    #[test]
    fn built_field_structure() {
        let p = params(0);
        assert!(p.feasible);
        assert!((p.correction - 1.0).abs() < 1e-12);
        let g = p.grid(64).unwrap();
        let a = build_example(&p, &g).unwrap();
        assert_eq!(a.hermitian_residual(), 0.0);
        assert_eq!(a.divergence_residual(), 0.0);
        assert!(a.is_mean_free(0.0));
        let nonzero = a.component(1).iter().filter(|z| z.norm() > 0.0).count()
            + a.component(2).iter().filter(|z| z.norm() > 0.0).count();
        // 2 cubes × 24 nonzero symbols; transverse axis-aligned offsets fill one component only
        assert_eq!(nonzero, 2 * 3 * (4 * 2 + 4));
    }

    #[test]
    fn energy_infeasible_when_too_small() {
        let k = Constants::default();
        let p = ExampleParams::resolve(0.05, 1.0, 1e-30, 4, k, 0.3).unwrap();
        assert!(!p.feasible);
        assert!(p.attainability.starts_with("violated"));
        assert!(p.correction < 0.5);
    }
}
