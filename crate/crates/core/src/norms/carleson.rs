use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::norms::sampling::TimeSampling;
use crate::workspace::{strided_max, BallAverager, HeatEval};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlesonBmo {
    pub value: f64,
    /// `None` means no cap (`δ = ∞`).
    pub delta_cap: Option<f64>,
    pub argmax_t: f64,
    pub argmax_center: [usize; 3],
    /// Set when sampled times with `√t > L/2` were excluded.
    pub truncated: bool,
}

/// Discrete Carleson functional
/// `sup_{x, t ≤ δ} ( |B(x,√t)|⁻¹ ∫_{B(x,√t)} ∫₀ᵗ |e^{sΔ}f(y)|² ds dy )^{1/2}`.
///
/// Centres run over grid points with indices divisible by `stride`; ball
/// membership uses the periodic Euclidean distance between grid points.
pub fn carleson_bmo(
    f: &SpectralField,
    delta_cap: Option<f64>,
    sampling: &TimeSampling,
    stride: usize,
) -> Result<CarlesonBmo> {
    sampling.validate().map_err(|_| Error::EmptySampling)?;
    let g = *f.grid();
    let n = g.n_per_axis;
    if stride == 0 || !n.is_multiple_of(stride) {
        return Err(Error::InvalidParams(format!(
            "stride {stride} must divide n_per_axis {n}"
        )));
    }
    let half_sq = (g.box_length / 2.0).powi(2);
    let cap = delta_cap.unwrap_or(f64::INFINITY);
    let times = sampling.times();
    let bounds = sampling.s_boundaries();

    let mut heat = HeatEval::new(g);
    let mut balls = BallAverager::new(g);
    let np = g.points();
    let mut acc = vec![0.0; np];
    let mut tmp = vec![0.0; np];

    // [0, s_floor] closed with the integrand at s = 0
    heat.mag_sq(f, 0.0, &mut tmp);
    let floor = bounds[0];
    acc.iter_mut().zip(&tmp).for_each(|(a, v)| *a = floor * v);

    let mut best = CarlesonBmo {
        value: 0.0,
        delta_cap,
        argmax_t: times[0],
        argmax_center: [0; 3],
        truncated: false,
    };
    let limit = cap.min(half_sq);
    best.truncated = times.iter().any(|&t| t > half_sq && t <= cap);
    let mut next_t = 0;
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = (a * b).sqrt();
        heat.mag_sq(f, mid, &mut tmp);
        let width = b - a;
        acc.iter_mut().zip(&tmp).for_each(|(x, v)| *x += width * v);
        while next_t < times.len() && times[next_t] <= b {
            let t = times[next_t];
            if t == b && t <= limit {
                let avg = balls.average(&acc, t.sqrt());
                let (v, idx) = strided_max(&avg, n, stride);
                let v = v.max(0.0).sqrt();
                if v > best.value {
                    best.value = v;
                    best.argmax_t = t;
                    best.argmax_center = [idx / (n * n), (idx / n) % n, idx % n];
                }
            }
            next_t += 1;
        }
        if b >= limit {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn zero_field_is_zero() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let s = TimeSampling::default_for(&g);
        let r = carleson_bmo(&SpectralField::zeros(g), None, &s, 2).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(carleson_bmo(&SpectralField::zeros(g), None, &s, 3).is_err());
    }
}
