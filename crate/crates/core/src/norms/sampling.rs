use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Geometric sampling of `sup_{0<t}` and of the inner `∫₀ᵗ ds` integrals.
///
/// Time samples are `t_max·2^{-k/ppo}`, `k = 0..K`, reaching at or below
/// `t_min`. The inner integral uses composite geometric midpoint cells of
/// ratio `2^{1/s_per_octave}` anchored at `t_max`, so every time sample is a
/// cell boundary and refining `ppo` keeps the old samples bit-identical.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSampling {
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_octave: u32,
    pub s_per_octave: u32,
}

/// Octaves of s-cells kept below the smallest time sample before the
/// remaining `[0, s_floor]` piece is closed with the value at `s = 0`.
pub const S_EXTENSION_OCTAVES: u32 = 2;

impl TimeSampling {
    pub fn new(t_min: f64, t_max: f64, points_per_octave: u32, s_per_octave: u32) -> Result<Self> {
        if !(t_min > 0.0 && t_min < t_max && t_max.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "time sampling needs 0 < t_min < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if points_per_octave == 0 || s_per_octave == 0 || !s_per_octave.is_multiple_of(points_per_octave) {
            return Err(Error::InvalidParams(format!(
                "s_per_octave ({s_per_octave}) must be a positive multiple of points_per_octave ({points_per_octave})"
            )));
        }
        Ok(Self {
            t_min,
            t_max,
            points_per_octave,
            s_per_octave,
        })
    }

    /// Default sampling for a field on `grid`: from `1/(16 k_N²)` (k_N the
    /// axis Nyquist frequency) up to `(L/2)²`, 16 points and 32 s-nodes per octave.
    pub fn default_for(grid: &GridSpec) -> Self {
        let kn = grid.kappa() * grid.n_per_axis as f64 / 2.0;
        let half = grid.box_length / 2.0;
        Self {
            t_min: 1.0 / (16.0 * kn * kn),
            t_max: half * half,
            points_per_octave: 16,
            s_per_octave: 32,
        }
    }

    pub fn with_ppo(mut self, ppo: u32) -> Self {
        self.points_per_octave = ppo;
        if !self.s_per_octave.is_multiple_of(ppo) {
            self.s_per_octave = ppo * (self.s_per_octave / ppo).max(1);
        }
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    fn steps(&self) -> u32 {
        let oct = (self.t_max / self.t_min).log2();
        (oct * self.points_per_octave as f64 - 1e-9).ceil().max(0.0) as u32
    }

    /// Ascending time samples.
    pub fn times(&self) -> Vec<f64> {
        let ppo = self.points_per_octave as f64;
        let mut t: Vec<f64> = (0..=self.steps())
            .map(|k| self.t_max * (-(k as f64) / ppo).exp2())
            .collect();
        t.reverse();
        t
    }

    /// s-cell boundaries, ascending, starting at the floor.
    pub fn s_boundaries(&self) -> Vec<f64> {
        let ratio = self.s_per_octave / self.points_per_octave;
        let total = self.steps() * ratio + S_EXTENSION_OCTAVES * self.s_per_octave;
        let spo = self.s_per_octave as f64;
        let mut b: Vec<f64> = (0..=total)
            .map(|j| self.t_max * (-(j as f64) / spo).exp2())
            .collect();
        b.reverse();
        b
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.t_min, self.t_max, self.points_per_octave, self.s_per_octave).map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_covers_range_with_nested_refinement() {
        let s = TimeSampling::new(1e-3, 1.0, 4, 32).unwrap();
        let t = s.times();
        assert!(t[0] <= 1e-3 && *t.last().unwrap() == 1.0);
        for w in t.windows(2) {
            assert!((w[1] / w[0] - 2f64.powf(0.25)).abs() < 1e-12);
        }
        let fine = s.with_ppo(8).times();
        for x in &t {
            assert!(fine.iter().any(|y| y == x), "{x} missing from refinement");
        }
        let b = s.s_boundaries();
        for x in &t {
            assert!(b.iter().any(|y| y == x));
        }
    }

    #[test]
    fn rejects_empty_or_misaligned() {
        assert!(TimeSampling::new(1.0, 1.0, 4, 8).is_err());
        assert!(TimeSampling::new(0.0, 1.0, 4, 8).is_err());
        assert!(TimeSampling::new(0.1, 1.0, 3, 8).is_err());
    }
}
