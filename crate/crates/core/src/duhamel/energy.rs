use serde::{Deserialize, Serialize};

use crate::ops::norm_sq;
use crate::trajectory::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    /// `½‖u(t)‖₂²`
    pub half_energy: f64,
    /// `∫₀ᵗ ‖∇u‖₂² dτ`
    pub dissipation: f64,
    /// `|½‖u(t)‖₂² + ∫₀ᵗ‖∇u‖₂² − ½‖a‖₂²|`
    pub residual: f64,
    /// `‖u(t) − a‖₂`
    pub distance_to_initial: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub initial_energy: f64,
    pub samples: Vec<EnergySample>,
    pub max_residual: f64,
    /// `max_residual / ‖a‖₂²` (zero for zero data).
    pub max_relative_residual: f64,
}

/// `∫₀ʰ g(τ) dτ` for `g` exponential through `g(0) = a`, `g(h) = b`.
fn log_mean(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.5 * (a + b);
    }
    let x = b / a - 1.0;
    if x.abs() < 1e-4 {
        a * (1.0 + x / 2.0 - x * x / 12.0 + x * x * x / 24.0)
    } else {
        (b - a) / (b / a).ln()
    }
}

/// Energy balance along `u`. The dissipation integral is accumulated mode by
/// mode, interpolating each `|ξ|²|û_ξ|²` exponentially between samples, which
/// is exact for heat flow and second order otherwise.
pub fn energy_ledger(u: &Trajectory) -> EnergyLedger {
    let grid = *u.grid();
    let np = grid.points();
    let vol = grid.volume();
    let lam: Vec<f64> = grid.modes().map(|(_, xi)| norm_sq(xi)).collect();
    let a = u.initial();
    let e0 = a.l2_sq();
    let density = |f: &crate::field::SpectralField| -> Vec<f64> {
        let c = f.coeffs();
        (0..np)
            .map(|i| vol * lam[i] * (c[i].norm_sqr() + c[np + i].norm_sqr() + c[2 * np + i].norm_sqr()))
            .collect()
    };
    let mut prev = density(a);
    let mut dissipation = 0.0;
    let mut samples = Vec::with_capacity(u.len());
    let times = u.times();
    for (k, (t, f)) in u.iter().enumerate() {
        if k > 0 {
            let h = t - times[k - 1];
            let cur = density(f);
            dissipation += h * prev.iter().zip(&cur).map(|(&p, &c)| log_mean(p, c)).sum::<f64>();
            prev = cur;
        }
        let half_energy = 0.5 * f.l2_sq();
        let distance = f.sub(a).map(|d| d.l2_norm()).unwrap_or(f64::NAN);
        samples.push(EnergySample {
            t,
            half_energy,
            dissipation,
            residual: (half_energy + dissipation - 0.5 * e0).abs(),
            distance_to_initial: distance,
        });
    }
    let max_residual = samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    EnergyLedger {
        initial_energy: e0,
        max_relative_residual: if e0 > 0.0 { max_residual / e0 } else { 0.0 },
        samples,
        max_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpectralField;
    use crate::grid::GridSpec;
    use std::f64::consts::PI;

    #[test]
    fn heat_flow_balances() {
        let g = GridSpec::new(16, 2.0 * PI).unwrap();
        let a = crate::datagen::random_divfree(&g, [0, 2], 4).unwrap();
        let times = crate::duhamel::graded_times(1e-4, 1.0, 32).unwrap();
        let l = energy_ledger(&Trajectory::heat_flow(&a, &times).unwrap());
        assert!(l.max_relative_residual <= 1e-8, "{}", l.max_relative_residual);
    }

    #[test]
    fn zero_data() {
        let g = GridSpec::new(8, 2.0 * PI).unwrap();
        let z = SpectralField::zeros(g);
        let l = energy_ledger(&Trajectory::heat_flow(&z, &[0.1, 0.2]).unwrap());
        assert!(l.samples.iter().all(|s| s.residual == 0.0));
        assert_eq!(l.max_relative_residual, 0.0);
    }

    #[test]
    fn log_mean_branches() {
        let (a, b): (f64, f64) = (2.0, 2.0 * (1.0 + 5e-5));
        let direct = (b - a) / (b / a).ln();
        assert!((log_mean(a, b) - direct).abs() < 1e-11);
        assert_eq!(log_mean(3.0, 3.0), 3.0);
    }
}
