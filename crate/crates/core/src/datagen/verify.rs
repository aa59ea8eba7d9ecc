use serde::{Deserialize, Serialize};

use super::example::ExampleParams;
use super::sparse::PacketModel;
use crate::error::Result;
use crate::field::SpectralField;
use crate::lp;
use crate::norms::{caloric_besov, carleson_bmo, dyadic_besov, Constants, TimeSampling};
use crate::ops::{band_project, Side};

/// Block spreads `q₁ − q₀` of the growth sweep.
pub const DEFAULT_SWEEP: [u32; 4] = [4, 8, 16, 32];

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub sampling: Option<TimeSampling>,
    pub stride: usize,
    pub sweep: Vec<u32>,
    /// Time points per octave of the closed-form sweep evaluator.
    pub sweep_ppo: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            sampling: None,
            stride: 2,
            sweep: DEFAULT_SWEEP.to_vec(),
            sweep_ppo: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    pub energy_matches: bool,
    pub besov_below_eps: bool,
    pub band_zero: bool,
    pub bmo_above_m: bool,
}

/// Measurements of one sweep point, from the closed-form evaluator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub spread: u32,
    pub q0: i32,
    pub q1: i32,
    pub feasible: bool,
    pub correction: f64,
    pub energy: f64,
    pub energy_rel_err: f64,
    pub dyadic_besov: f64,
    pub carleson_bmo: f64,
    pub carleson_bmo_delta: f64,
    pub ladder_bound: f64,
    /// `carleson_bmo / correction`: the norm at the uncorrected amplitude.
    pub normalized_bmo: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub params: ExampleParams,
    pub energy: f64,
    pub energy_rel_err: f64,
    pub dyadic_besov: f64,
    pub caloric_besov: f64,
    pub carleson_bmo: f64,
    pub carleson_bmo_delta: f64,
    /// Carleson norm of the blocks `q ≤ q₀` only.
    pub carleson_bmo_low: f64,
    /// Carleson norm of the blocks `q > q₀` only.
    pub carleson_bmo_high: f64,
    pub ladder_bound: f64,
    pub band_residual: f64,
    pub divergence_residual: f64,
    pub hermitian_residual: f64,
    pub checks: Checks,
    pub sweep: Vec<SweepPoint>,
    /// Least-squares slope of `ln(normalized_bmo)` against `ln(q₁ − q₀)`.
    pub beta: Option<f64>,
}

/// Measures the example `a` built from `p` on its grid and runs the growth
/// sweep with the same `ε, M, E` and constants.
pub fn verify_example(a: &SpectralField, p: &ExampleParams, opts: &VerifyOptions) -> Result<ExampleReport> {
    let g = a.grid();
    let sampling = opts.sampling.unwrap_or_else(|| TimeSampling::default_for(g));
    let energy = a.l2_sq();
    let blocks = dyadic_besov(a, -1.0, f64::INFINITY, f64::INFINITY)?;
    let ladder = p.delta.sqrt() * blocks.blocks.iter().map(|(q, v)| lp::lambda(*q) * v).sum::<f64>();
    let carleson = carleson_bmo(a, None, &sampling, opts.stride)?.value;
    let delta_sampling = TimeSampling::new(
        sampling.t_min.min(p.delta / 256.0),
        p.delta,
        sampling.points_per_octave,
        sampling.s_per_octave,
    )?;
    let carleson_delta = carleson_bmo(a, Some(p.delta), &delta_sampling, opts.stride)?.value;
    let split = 1.5 * lp::lambda(p.q0);
    let low = band_project(a, split, Side::Low);
    let high = band_project(a, split, Side::High);
    let carleson_low = carleson_bmo(&low, None, &sampling, opts.stride)?.value;
    let carleson_high = if high.is_zero() {
        0.0
    } else {
        carleson_bmo(&high, None, &sampling, opts.stride)?.value
    };
    let band_residual = band_project(a, lp::lambda(p.q1 + 1), Side::High).max_coeff();
    let energy_rel_err = (energy - p.energy).abs() / p.energy;
    let sweep = opts
        .sweep
        .iter()
        .map(|&s| sweep_point(p.eps, p.m, p.energy, s, Constants::new(p.mu0, p.c0)?, p.cprime, opts.sweep_ppo))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExampleReport {
        params: p.clone(),
        energy,
        energy_rel_err,
        dyadic_besov: blocks.value,
        caloric_besov: caloric_besov(a, &sampling)?.value,
        carleson_bmo: carleson,
        carleson_bmo_delta: carleson_delta,
        carleson_bmo_low: carleson_low,
        carleson_bmo_high: carleson_high,
        ladder_bound: ladder,
        band_residual,
        divergence_residual: a.divergence_residual(),
        hermitian_residual: a.hermitian_residual(),
        checks: Checks {
            energy_matches: energy_rel_err <= 1e-6,
            besov_below_eps: blocks.value < p.eps,
            band_zero: band_residual == 0.0,
            bmo_above_m: carleson > p.m,
        },
        beta: fit_exponent(&sweep),
        sweep,
    })
}

/// One point of the growth sweep, evaluated in closed form.
pub fn sweep_point(
    eps: f64,
    m: f64,
    energy: f64,
    spread: u32,
    k: Constants,
    cprime: f64,
    ppo: u32,
) -> Result<SweepPoint> {
    let p = ExampleParams::resolve(eps, m, energy, spread, k, cprime)?;
    let model = PacketModel::new(&p);
    let e = model.l2_sq();
    let bmo = model.carleson(None, ppo).value;
    Ok(SweepPoint {
        spread,
        q0: p.q0,
        q1: p.q1,
        feasible: p.feasible,
        correction: p.correction,
        energy: e,
        energy_rel_err: (e - energy).abs() / energy,
        dyadic_besov: model.dyadic_besov(),
        carleson_bmo: bmo,
        carleson_bmo_delta: model.carleson(Some(p.delta), ppo).value,
        ladder_bound: model.ladder_bound(p.delta),
        normalized_bmo: bmo / p.correction,
    })
}

/// Least-squares slope of `ln(normalized_bmo)` on `ln(spread)` over the
/// feasible points with positive spread; `None` with fewer than two.
pub fn fit_exponent(points: &[SweepPoint]) -> Option<f64> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.feasible && p.spread > 0 && p.normalized_bmo > 0.0)
        .map(|p| ((p.spread as f64).ln(), p.normalized_bmo.ln()))
        .collect();
    least_squares_slope(&xy)
}

pub fn least_squares_slope(xy: &[(f64, f64)]) -> Option<f64> {
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Smallest `E = 4^j E₀` for which every spread up to `max_spread` is attainable.
pub fn sweep_energy(eps: f64, max_spread: u32, k: Constants, cprime: f64) -> Result<f64> {
    let c1 = 1.0 / (k.c0 * eps) / (2.0 * std::f64::consts::LN_2) + k.mu0.log2();
    let ks = eps * eps * 4f64.powi(max_spread as i32 + 1) / (1024.0 * cprime * cprime);
    let mut e = (ks * ks * 4f64.powf(max_spread as f64 - c1)).max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        let ok = (0..=max_spread)
            .map(|s| ExampleParams::resolve(eps, 1.0, e, s, k, cprime).map(|p| p.feasible))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .all(|f| f);
        if ok {
            return Ok(e);
        }
        e *= 4.0;
    }
    Err(crate::error::Error::InvalidParams(format!(
        "no attainable energy found for eps={eps}, spread {max_spread}"
    )))
}
