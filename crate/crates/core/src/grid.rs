use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic box `[0, L)^3` sampled with `n` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_per_axis: usize,
    pub box_length: f64,
}

impl GridSpec {
    pub fn new(n_per_axis: usize, box_length: f64) -> Result<Self> {
        if n_per_axis < 8 || !n_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_per_axis must be a power of two >= 8, got {n_per_axis}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        Ok(Self {
            n_per_axis,
            box_length,
        })
    }

    /// Box of side `2π·2^k`.
    pub fn with_box_exp(n_per_axis: usize, box_exp: i32) -> Result<Self> {
        Self::new(n_per_axis, 2.0 * PI * 2f64.powi(box_exp))
    }

    /// Frequency unit `2π/L`.
    pub fn kappa(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n_per_axis as f64
    }

    pub fn points(&self) -> usize {
        self.n_per_axis.pow(3)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    /// Signed integer wavenumber of DFT index `i`, in `[-n/2, n/2)`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n_per_axis;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// DFT index of the signed wavenumber `m` (taken mod n).
    #[inline]
    pub fn index_of(&self, m: i64) -> usize {
        m.rem_euclid(self.n_per_axis as i64) as usize
    }

    /// Index of the mirrored wavenumber `-m`.
    #[inline]
    pub fn mirror(&self, i: usize) -> usize {
        (self.n_per_axis - i) % self.n_per_axis
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n_per_axis / 2
    }

    /// Largest |ξ| on the grid (corner of the cube of wavenumbers).
    pub fn max_frequency(&self) -> f64 {
        self.kappa() * (self.n_per_axis as f64 / 2.0) * 3f64.sqrt()
    }

    /// Wave vector of flat index (i, j, k) in physical units.
    #[inline]
    pub fn wave_vector(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let kap = self.kappa();
        [
            kap * self.wavenumber(i) as f64,
            kap * self.wavenumber(j) as f64,
            kap * self.wavenumber(k) as f64,
        ]
    }

    /// Iterate over all flat indices with their wave vectors.
    pub fn modes(&self) -> impl Iterator<Item = (usize, [f64; 3])> + '_ {
        let n = self.n_per_axis;
        (0..n).flat_map(move |i| {
            (0..n).flat_map(move |j| {
                (0..n).map(move |k| ((i * n + j) * n + k, self.wave_vector(i, j, k)))
            })
        })
    }

    /// Grid with the box shrunk by `2^k` (frequencies multiplied by `2^k`).
    pub fn rescaled(&self, k: i32) -> Result<Self> {
        let l = self.box_length * 2f64.powi(-k);
        if !(l.is_finite() && l > 0.0 && l.is_normal()) {
            return Err(Error::SpectrumOverflow(format!(
                "box length {} * 2^{} is not representable",
                self.box_length, -k
            )));
        }
        Self::new(self.n_per_axis, l)
    }
}
