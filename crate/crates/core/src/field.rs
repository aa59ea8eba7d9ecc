use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::GridSpec;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Three-component real vector field held as Fourier coefficients.
///
/// Coefficients follow `f(x_j) = Σ_k f̂_k e^{i k·x_j}`, component-major and
/// in DFT index order, so `‖f‖₂² = L³ Σ |f̂_k|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
    solenoidal: bool,
}

/// Physical samples of the three components, each of length `n³`.
pub type PhysicalField = [Vec<f64>; 3];

/// Summary of the structural invariants of a field.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FieldDiagnostics {
    pub hermitian_residual: f64,
    pub divergence_residual: f64,
    pub mean_abs: f64,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![ZERO; 3 * grid.points()],
            solenoidal: true,
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = 3 * grid.points();
        if coeffs.len() != expected {
            return Err(Error::SizeMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(Self {
            grid,
            coeffs,
            solenoidal: false,
        })
    }

    /// Forward transform of physical samples.
    pub fn from_physical(grid: GridSpec, phys: &[Vec<f64>; 3]) -> Result<Self> {
        let np = grid.points();
        let mut coeffs = Vec::with_capacity(3 * np);
        for comp in phys {
            if comp.len() != np {
                return Err(Error::SizeMismatch {
                    expected: np,
                    found: comp.len(),
                });
            }
            coeffs.extend(comp.iter().map(|&v| Complex64::new(v, 0.0)));
        }
        let plan = fft::plan(grid.n_per_axis);
        let scale = 1.0 / np as f64;
        for chunk in coeffs.chunks_exact_mut(np) {
            plan.forward(chunk);
            chunk.iter_mut().for_each(|c| *c *= scale);
        }
        Ok(Self {
            grid,
            coeffs,
            solenoidal: false,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let np = self.grid.points();
        &self.coeffs[c * np..(c + 1) * np]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let np = self.grid.points();
        &mut self.coeffs[c * np..(c + 1) * np]
    }

    /// Coefficient vector at flat mode index `idx`.
    #[inline]
    pub fn mode(&self, idx: usize) -> [Complex64; 3] {
        let np = self.grid.points();
        [
            self.coeffs[idx],
            self.coeffs[np + idx],
            self.coeffs[2 * np + idx],
        ]
    }

    #[inline]
    pub fn set_mode(&mut self, idx: usize, v: [Complex64; 3]) {
        let np = self.grid.points();
        self.coeffs[idx] = v[0];
        self.coeffs[np + idx] = v[1];
        self.coeffs[2 * np + idx] = v[2];
    }

    /// Whether the field is flagged divergence-free.
    pub fn is_solenoidal(&self) -> bool {
        self.solenoidal
    }

    pub fn set_solenoidal(&mut self, flag: bool) {
        self.solenoidal = flag;
    }

    pub(crate) fn with_flag(mut self, flag: bool) -> Self {
        self.solenoidal = flag;
        self
    }

    /// Inverse transform to physical samples (real parts).
    pub fn to_physical(&self) -> PhysicalField {
        [
            self.component_physical(0),
            self.component_physical(1),
            self.component_physical(2),
        ]
    }

    pub fn component_physical(&self, c: usize) -> Vec<f64> {
        let mut buf = self.component(c).to_vec();
        fft::plan(self.grid.n_per_axis).inverse(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Pointwise Euclidean magnitude `|f(x_j)|` on the grid.
    pub fn magnitude(&self) -> Vec<f64> {
        let [a, b, c] = self.to_physical();
        a.iter()
            .zip(&b)
            .zip(&c)
            .map(|((x, y), z)| (x * x + y * y + z * z).sqrt())
            .collect()
    }

    /// Pointwise squared magnitude `|f(x_j)|²` on the grid.
    pub fn magnitude_sq(&self) -> Vec<f64> {
        let [a, b, c] = self.to_physical();
        a.iter()
            .zip(&b)
            .zip(&c)
            .map(|((x, y), z)| x * x + y * y + z * z)
            .collect()
    }

    /// `sup_x |f(x)|` over grid points.
    pub fn sup_norm(&self) -> f64 {
        self.magnitude().into_iter().fold(0.0, f64::max)
    }

    /// Squared L² norm over the box.
    pub fn l2_sq(&self) -> f64 {
        self.grid.volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_sq().sqrt()
    }

    /// `L³ Σ_k ⟨f̂_k, ĝ_k⟩`, the real L² inner product for real fields.
    pub fn inner(&self, other: &Self) -> f64 {
        self.grid.volume()
            * self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| (a * b.conj()).re)
                .sum::<f64>()
    }

    pub fn mean(&self) -> [Complex64; 3] {
        self.mode(0)
    }

    pub fn is_mean_free(&self, tol: f64) -> bool {
        self.mean().iter().all(|c| c.norm() <= tol)
    }

    pub fn remove_mean(&mut self) {
        self.set_mode(0, [ZERO; 3]);
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Largest `|ξ·f̂(ξ)| / (|ξ||f̂(ξ)|)` over modes with non-negligible amplitude.
    pub fn divergence_residual(&self) -> f64 {
        let floor = 1e-300_f64.max(self.max_coeff() * 1e-14);
        let mut worst = 0.0_f64;
        for (idx, xi) in self.grid.modes() {
            let norm_xi = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            if norm_xi == 0.0 {
                continue;
            }
            let v = self.mode(idx);
            let amp = (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt();
            if amp <= floor {
                continue;
            }
            let dot = v[0] * xi[0] + v[1] * xi[1] + v[2] * xi[2];
            worst = worst.max(dot.norm() / (norm_xi * amp));
        }
        worst
    }

    /// Largest `|f̂(-ξ) - conj f̂(ξ)|` relative to the largest coefficient.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.grid.n_per_axis;
        let g = self.grid;
        let scale = self.max_coeff().max(1e-300);
        let np = g.points();
        let mut worst = 0.0_f64;
        for c in 0..3 {
            let comp = &self.coeffs[c * np..(c + 1) * np];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let a = comp[(i * n + j) * n + k];
                        let b = comp[(g.mirror(i) * n + g.mirror(j)) * n + g.mirror(k)];
                        worst = worst.max((a - b.conj()).norm() / scale);
                    }
                }
            }
        }
        worst
    }

    pub fn diagnostics(&self) -> FieldDiagnostics {
        let m = self.mean();
        FieldDiagnostics {
            hermitian_residual: self.hermitian_residual(),
            divergence_residual: self.divergence_residual(),
            mean_abs: (m[0].norm_sqr() + m[1].norm_sqr() + m[2].norm_sqr()).sqrt(),
        }
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Replace every coefficient by its Hermitian average, making the field exactly real.
    pub fn symmetrize(&mut self) {
        let n = self.grid.n_per_axis;
        let g = self.grid;
        let np = g.points();
        for c in 0..3 {
            let comp = &mut self.coeffs[c * np..(c + 1) * np];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let a = (i * n + j) * n + k;
                        let b = (g.mirror(i) * n + g.mirror(j)) * n + g.mirror(k);
                        if b < a {
                            continue;
                        }
                        let avg = 0.5 * (comp[a] + comp[b].conj());
                        comp[a] = avg;
                        comp[b] = avg.conj();
                    }
                }
            }
        }
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            solenoidal: self.solenoidal,
        }
    }

    pub fn scale_in_place(&mut self, s: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b * s)
                .collect(),
            solenoidal: self.solenoidal && other.solenoidal,
        })
    }

    pub fn axpy_in_place(&mut self, s: f64, other: &Self) -> Result<()> {
        self.check_same_grid(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * s;
        }
        self.solenoidal &= other.solenoidal;
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, -1.0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, 1.0)
    }

    /// Largest coefficient-wise difference (for bit-level comparisons in tests).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Apply a per-mode map `(flat index, ξ, coefficient vector) -> coefficient vector`.
    pub fn map_modes<F>(&self, mut f: F) -> Self
    where
        F: FnMut(usize, [f64; 3], [Complex64; 3]) -> [Complex64; 3],
    {
        let mut out = Self::zeros(self.grid);
        for (idx, xi) in self.grid.modes() {
            out.set_mode(idx, f(idx, xi, self.mode(idx)));
        }
        out.solenoidal = self.solenoidal;
        out
    }

    /// Multiply every mode by a scalar symbol `m(ξ)`.
    pub fn apply_scalar_symbol<F>(&self, mut m: F) -> Self
    where
        F: FnMut([f64; 3]) -> f64,
    {
        let np = self.grid.points();
        let mut out = self.clone();
        for (idx, xi) in self.grid.modes() {
            let s = m(xi);
            for c in 0..3 {
                out.coeffs[c * np + idx] *= s;
            }
        }
        out
    }
}
