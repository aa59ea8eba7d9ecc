use serde::{Deserialize, Serialize};

use crate::field::SpectralField;
use crate::lp::{self, LPBasis};
use crate::ops::norm_sq;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriebelDyadic {
    pub value: f64,
    /// Side length of the maximizing cube.
    pub argmax_side: f64,
    /// Set when some block below the coarsest cube's tail index carries
    /// energy, i.e. the box is too small to see it.
    pub truncated: bool,
}

/// `‖f‖_{Ḟ⁻¹_{∞,2}}`: supremum over grid-aligned cubes of the cube average of
/// `Σ_{q≥j} (λ_q⁻¹ |f_q|)²`, where a cube of side `ℓ` (a power-of-two number of
/// cells) uses `j = round(log₂(1/ℓ))`.
pub fn triebel_dyadic(f: &SpectralField) -> TriebelDyadic {
    let g = *f.grid();
    let n = g.n_per_axis;
    let np = g.points();
    let basis = LPBasis::for_grid(&g);
    let nq = (basis.q_max - basis.q_min + 1) as usize;
    // tails[i] = Σ_{q ≥ q_min + i} (λ_q⁻¹|f_q|)²; tails[nq] = 0
    let mut tails = vec![vec![0.0; np]; nq + 1];
    let mut energy = vec![0.0; nq];
    for (i, q) in basis.blocks().enumerate().collect::<Vec<_>>().into_iter().rev() {
        let fq = f.apply_scalar_symbol(|xi| lp::phi_q(norm_sq(xi).sqrt(), q));
        energy[i] = fq.l2_sq();
        let w = lp::lambda(q).powi(-2);
        let m = fq.magnitude_sq();
        let (lo, hi) = tails.split_at_mut(i + 1);
        for ((t, next), v) in lo[i].iter_mut().zip(&hi[0]).zip(&m) {
            *t = next + w * v;
        }
    }
    let levels = n.trailing_zeros();
    let mut best = TriebelDyadic {
        value: 0.0,
        argmax_side: g.spacing(),
        truncated: false,
    };
    let mut coarsest_j = i32::MIN;
    for p in 0..=levels {
        let cells = 1usize << p;
        let side = cells as f64 * g.spacing();
        let j = (1.0 / side).log2().round() as i32;
        if p == levels {
            coarsest_j = j;
        }
        let start = (j - basis.q_min).clamp(0, nq as i32) as usize;
        let avg = cube_max_average(&tails[start], n, cells);
        if avg > best.value * best.value {
            best.value = avg.sqrt();
            best.argmax_side = side;
        }
    }
    let scale = energy.iter().copied().fold(0.0, f64::max);
    best.truncated = basis
        .blocks()
        .zip(&energy)
        .any(|(q, &e)| q < coarsest_j && e > 1e-24 * scale && e > 0.0);
    best
}

fn cube_max_average(values: &[f64], n: usize, cells: usize) -> f64 {
    let m = n / cells;
    let mut sums = vec![0.0; m * m * m];
    for i in 0..n {
        for j in 0..n {
            let row = &values[(i * n + j) * n..(i * n + j + 1) * n];
            let base = ((i / cells) * m + j / cells) * m;
            for (k, v) in row.iter().enumerate() {
                sums[base + k / cells] += v;
            }
        }
    }
    let vol = (cells * cells * cells) as f64;
    sums.into_iter().fold(0.0, f64::max) / vol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn zero_field() {
        let g = GridSpec::new(8, 1.0).unwrap();
        assert_eq!(triebel_dyadic(&SpectralField::zeros(g)).value, 0.0);
    }

    #[test]
    fn cube_average_of_constant() {
        let v = vec![2.0; 512];
        assert!((cube_max_average(&v, 8, 2) - 2.0).abs() < 1e-15);
        assert!((cube_max_average(&v, 8, 8) - 2.0).abs() < 1e-15);
    }
}
