//! Product integration of `∫ e^{−(t−s)|ξ|²} B(s) ds` with `B` interpolated
//! quadratically between trajectory samples; the exponential is integrated
//! exactly per mode.

use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::ops::norm_sq;

/// `I_m(z) = ∫₀¹ e^{−z(1−σ)} σ^m dσ` for `m = 0, 1, 2`.
pub(crate) fn moments(z: f64) -> [f64; 3] {
    if z < 1.0 {
        // Σ_n (−z)^n m!/(m+n+1)!
        let mut out = [0.0; 3];
        for (m, o) in out.iter_mut().enumerate() {
            let mut term = [1.0, 1.0, 2.0][m] / [1.0, 2.0, 6.0][m];
            let mut sum = term;
            for n in 1..30 {
                term *= -z / (m + n + 1) as f64;
                sum += term;
            }
            *o = sum;
        }
        out
    } else {
        let e = (-z).exp();
        let z2 = z * z;
        [(1.0 - e) / z, (z - 1.0 + e) / z2, (z2 - 2.0 * z + 2.0 - 2.0 * e) / (z2 * z)]
    }
}

/// Monomial coefficients `[c₀, c₁, c₂]` of the Lagrange basis polynomials at
/// nodes `p`.
fn lagrange(p: [f64; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for j in 0..3 {
        let (a, b) = match j {
            0 => (p[1], p[2]),
            1 => (p[0], p[2]),
            _ => (p[0], p[1]),
        };
        let d = (p[j] - a) * (p[j] - b);
        out[j] = [a * b / d, -(a + b) / d, 1.0 / d];
    }
    out
}

/// Per-mode weights for one step of length `h` starting at offset 0, with
/// `B` known at offsets `p`. Returns `(e^{−λh}, [w₀, w₁, w₂])`.
#[inline]
pub(crate) fn step_weights(lam: f64, h: f64, basis: &[[f64; 3]; 3]) -> (f64, [f64; 3]) {
    let z = lam * h;
    let i = moments(z);
    let mu = [h * i[0], h * h * i[1], h * h * h * i[2]];
    let mut w = [0.0; 3];
    for j in 0..3 {
        w[j] = basis[j][0] * mu[0] + basis[j][1] * mu[1] + basis[j][2] * mu[2];
    }
    (if z == 0.0 { 1.0 } else { (-z).exp() }, w)
}

/// Interpolation nodes for the interval `[times[k], times[k+1]]`, as indices.
pub(crate) fn stencil(k: usize, len: usize) -> [usize; 3] {
    if k == 0 || len < 3 {
        [0, 1, 2.min(len - 1)]
    } else {
        [k - 1, k, k + 1]
    }
}

/// Running value of `N(t) = ∫₀ᵗ e^{(t−s)Δ} B(s) ds`.
pub(crate) struct DuhamelIntegral {
    grid: GridSpec,
    lam: Vec<f64>,
    pub value: SpectralField,
}

impl DuhamelIntegral {
    pub fn new(grid: GridSpec) -> Self {
        Self {
            grid,
            lam: grid.modes().map(|(_, xi)| norm_sq(xi)).collect(),
            value: SpectralField::zeros(grid),
        }
    }

    /// Advances from `t0` by `h` given `B` at absolute times `nodes`.
    pub fn advance(&mut self, t0: f64, h: f64, nodes: [f64; 3], b: [&SpectralField; 3]) {
        let np = self.grid.points();
        let rel = nodes.map(|t| t - t0);
        let linear = rel[1] == rel[2] || rel[0] == rel[2];
        let basis = if linear {
            // two distinct nodes: linear interpolation
            let (p0, p1) = (rel[0], rel[1]);
            let d = p1 - p0;
            [[p1 / d, -1.0 / d, 0.0], [-p0 / d, 1.0 / d, 0.0], [0.0; 3]]
        } else {
            lagrange(rel)
        };
        let coeffs = self.value.coeffs_mut();
        let (b0, b1, b2) = (b[0].coeffs(), b[1].coeffs(), b[2].coeffs());
        for idx in 0..np {
            let (e, w) = step_weights(self.lam[idx], h, &basis);
            for c in 0..3 {
                let i = c * np + idx;
                coeffs[i] = coeffs[i] * e + b0[i] * w[0] + b1[i] * w[1] + b2[i] * w[2];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_branches_agree() {
        for z in [0.999_999f64, 1.0] {
            let direct = {
                let e = (-z).exp();
                [(1.0 - e) / z, (z - 1.0 + e) / (z * z), (z * z - 2.0 * z + 2.0 - 2.0 * e) / (z * z * z)]
            };
            let m = moments(z);
            for k in 0..3 {
                assert!((m[k] - direct[k]).abs() < 1e-13, "{k}: {} {}", m[k], direct[k]);
            }
        }
        assert_eq!(moments(0.0), [1.0, 0.5, 1.0 / 3.0]);
    }

    #[test]
    fn quadratic_reproduced_exactly() {
        // ∫₀ʰ e^{−λ(h−τ)} τ² dτ against the weights applied to τ² samples
        let basis = lagrange([-0.3, 0.0, 0.5]);
        let (lam, h) = (2.0, 0.5);
        let (_, w) = step_weights(lam, h, &basis);
        let approx = w[0] * 0.09 + w[1] * 0.0 + w[2] * 0.25;
        let exact = h * h * h * moments(lam * h)[2];
        assert!((approx - exact).abs() < 1e-15);
    }
}
