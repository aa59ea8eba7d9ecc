use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::nonlinear::Nonlinear;
use super::quadrature::{stencil, DuhamelIntegral};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::norms::{delta_of, tstar_of, Constants, TimeSampling, XNormAccumulator};
use crate::ops::heat_propagate;
use crate::trajectory::{Provenance, Trajectory};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PicardConfig {
    pub constants: Constants,
    /// Time samples per octave between `δ/8` and `T*`.
    pub ppo: u32,
    pub stride: usize,
    /// Stop once `‖u⁽ⁿ⁺¹⁾ − u⁽ⁿ⁾‖_X ≤ tol_rel · ε`.
    pub tol_rel: f64,
    pub max_iter: usize,
    /// Consecutive ratios `≥ 1` that make the divergence verdict.
    pub divergence_run: usize,
    pub dealias: bool,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            constants: Constants::default(),
            ppo: 8,
            stride: 2,
            tol_rel: 1e-8,
            max_iter: 60,
            divergence_run: 3,
            dealias: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converged,
    Diverged,
    MaxIterations,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardIteration {
    pub iteration: usize,
    /// `‖u⁽ⁿ⁺¹⁾ − u⁽ⁿ⁾‖_X`
    pub diff_x: f64,
    /// `‖u⁽ⁿ⁾‖_X`
    pub u_x: f64,
    /// `‖u⁽ⁿ⁺¹⁾‖_X`
    pub u_next_x: f64,
    /// `diff_x` over the previous iteration's `diff_x`.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardTrace {
    pub eps: f64,
    pub delta: f64,
    #[serde(rename = "T_star")]
    pub t_star: f64,
    pub tol: f64,
    pub samples: usize,
    pub iterations: Vec<PicardIteration>,
    /// `‖Φu − u‖_X` of the returned trajectory.
    pub final_residual: f64,
    pub verdict: Verdict,
}

/// Graded sample times: `ppo` per octave from `T*` down to at most `t_low`.
pub fn graded_times(t_low: f64, t_star: f64, ppo: u32) -> Result<Vec<f64>> {
    Ok(TimeSampling::new(t_low, t_star, ppo, ppo)?.times())
}

/// `1/(16 k_N²)` with `k_N` the axis Nyquist frequency: below this the heat
/// factor of every resolved mode is within a few percent of one.
pub fn resolution_time(g: &GridSpec) -> f64 {
    let kn = g.kappa() * g.n_per_axis as f64 / 2.0;
    1.0 / (16.0 * kn * kn)
}

/// Fixed-point iteration of `Φu = e^{tΔ}a − N(u, u)` from `u⁽⁰⁾ = e^{tΔ}a` on
/// a graded grid reaching from below `δ/8` and [`resolution_time`] up to `T*`, with `δ = δ(ε, ‖a‖₂²)` and `T* = T*(a)`.
///
/// Iterates are updated in place; the Duhamel integral of the old iterate is
/// advanced with a sliding window of nonlinear terms, so memory holds one
/// trajectory plus a few fields.
pub fn picard_solve(a: &SpectralField, eps: f64, cfg: &PicardConfig) -> Result<(Trajectory, PicardTrace)> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("eps must be positive, got {eps}")));
    }
    let grid = *a.grid();
    let tol = cfg.tol_rel * eps;
    if a.is_zero() {
        let trace = PicardTrace {
            eps,
            delta: 0.0,
            t_star: 0.0,
            tol,
            samples: 1,
            iterations: vec![PicardIteration {
                iteration: 1,
                diff_x: 0.0,
                u_x: 0.0,
                u_next_x: 0.0,
                ratio: None,
            }],
            final_residual: 0.0,
            verdict: Verdict::Converged,
        };
        return Ok((Trajectory::new(a.clone(), Provenance::Picard), trace));
    }
    let energy = a.l2_sq();
    let delta = delta_of(eps, energy, cfg.constants)?;
    let t_star = tstar_of(a, cfg.constants.mu0);
    let times = graded_times((delta / 8.0).min(resolution_time(&grid)), t_star, cfg.ppo)?;

    let mut u = Trajectory::new(a.clone(), Provenance::Picard);
    let mut init = XNormAccumulator::new(grid, delta, t_star, cfg.stride)?;
    init.push(0.0, a)?;
    for &t in &times {
        let f = heat_propagate(a, t)?;
        init.push(t, &f)?;
        u.push(t, f)?;
    }
    let mut u_x = init.finish()?.x_norm;

    let mut nl = Nonlinear::new(grid, cfg.dealias);
    let mut iterations = Vec::new();
    let mut prev_diff: Option<f64> = None;
    let mut run = 0;
    let mut verdict = Verdict::MaxIterations;
    for it in 1..=cfg.max_iter {
        let (diff_x, next_x) = sweep(&mut u, a, &mut nl, delta, t_star, cfg.stride, true)?;
        let ratio = prev_diff.map(|p| diff_x / p);
        iterations.push(PicardIteration {
            iteration: it,
            diff_x,
            u_x,
            u_next_x: next_x,
            ratio,
        });
        u_x = next_x;
        prev_diff = Some(diff_x);
        if !diff_x.is_finite() {
            verdict = Verdict::Diverged;
            break;
        }
        if diff_x <= tol {
            verdict = Verdict::Converged;
            break;
        }
        run = if ratio.is_some_and(|r| r >= 1.0) { run + 1 } else { 0 };
        if run >= cfg.divergence_run {
            verdict = Verdict::Diverged;
            break;
        }
    }
    let final_residual = if verdict == Verdict::Converged {
        sweep(&mut u, a, &mut nl, delta, t_star, cfg.stride, false)?.0
    } else {
        f64::NAN
    };
    let trace = PicardTrace {
        eps,
        delta,
        t_star,
        tol,
        samples: u.len(),
        iterations,
        final_residual,
        verdict,
    };
    Ok((u, trace))
}

/// One application of `Φ`; returns `(‖Φu − u‖_X, ‖Φu‖_X)` and, if `commit`,
/// replaces `u` by `Φu`.
fn sweep(
    u: &mut Trajectory,
    a: &SpectralField,
    nl: &mut Nonlinear,
    delta: f64,
    t_star: f64,
    stride: usize,
    commit: bool,
) -> Result<(f64, f64)> {
    let grid = *u.grid();
    let times = u.times().to_vec();
    let len = times.len();
    let mut diff_acc = XNormAccumulator::new(grid, delta, t_star, stride)?;
    let mut new_acc = XNormAccumulator::new(grid, delta, t_star, stride)?;
    diff_acc.push(0.0, &SpectralField::zeros(grid))?;
    new_acc.push(0.0, a)?;
    let mut duhamel = DuhamelIntegral::new(grid);
    // nonlinear terms of the old iterate, by sample index
    let mut cache: BTreeMap<usize, SpectralField> = BTreeMap::new();
    for k in 0..len - 1 {
        let st = stencil(k, len);
        for &i in &st {
            if let Entry::Vacant(e) = cache.entry(i) {
                let f = &u.fields()[i];
                e.insert(nl.apply(f, f)?);
            }
        }
        {
            let b = st.map(|i| &cache[&i]);
            duhamel.advance(times[k], times[k + 1] - times[k], st.map(|i| times[i]), b);
        }
        let mut next = heat_propagate(a, times[k + 1])?;
        next.axpy_in_place(-1.0, &duhamel.value)?;
        next.set_solenoidal(true);
        let diff = next.sub(&u.fields()[k + 1])?;
        diff_acc.push(times[k + 1], &diff)?;
        new_acc.push(times[k + 1], &next)?;
        if commit {
            u.replace(k + 1, next)?;
        }
        cache.retain(|&i, _| i >= k);
    }
    Ok((diff_acc.finish()?.x_norm, new_acc.finish()?.x_norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_data_is_a_fixed_point() {
        let g = GridSpec::new(8, 2.0 * PI).unwrap();
        let (u, trace) = picard_solve(&SpectralField::zeros(g), 0.1, &PicardConfig::default()).unwrap();
        assert_eq!(trace.verdict, Verdict::Converged);
        assert_eq!(trace.iterations.len(), 1);
        assert!(u.fields().iter().all(|f| f.is_zero()));
    }

    #[test]
    fn small_data_contracts() {
        let g = GridSpec::new(16, 2.0 * PI).unwrap();
        let a = crate::datagen::random_divfree(&g, [0, 1], 5).unwrap().scaled(0.05);
        let cfg = PicardConfig { ppo: 4, ..Default::default() };
        let (u, trace) = picard_solve(&a, 0.5, &cfg).unwrap();
        assert_eq!(trace.verdict, Verdict::Converged, "{trace:?}");
        assert!(trace.final_residual <= 10.0 * trace.tol, "{trace:?}");
        assert_eq!(u.len(), trace.samples);
        for w in trace.iterations.windows(2) {
            assert_eq!(w[1].ratio, Some(w[1].diff_x / w[0].diff_x));
        }
    }
}
