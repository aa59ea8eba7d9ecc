use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Resolution used when no other is requested.
pub const DEFAULT_RESOLUTION: usize = 128;

/// `C′ = sup_x |𝓕⁻¹[1_Q ξ⊥*/|ξ⊥*|](x)|` for the cube `Q = [−1, 1]³`.
///
/// The `ξ₁` integral factors out as `2 sinc`, maximal at `x₁ = 0`, leaving
/// `(2π)^{−3/2}·2·sup |W(x*)|` with `W` a two-dimensional integral over
/// `[−1, 1]²`. `W` is evaluated by midpoint quadrature with `r` and `2r`
/// cells per axis and Richardson-extrapolated. Results are cached per `r`.
pub fn cprime(resolution: usize) -> Result<f64> {
    if resolution < 64 || !resolution.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!(
            "cprime resolution must be even and >= 64, got {resolution}"
        )));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&resolution) {
        return Ok(*v);
    }
    let coarse = Midpoint::new(resolution);
    let fine = Midpoint::new(2 * resolution);
    let start = coarse_argmax(&coarse);
    let (x, wc) = pattern_max(start, |x| coarse.abs_w(x));
    let (_, wf) = pattern_max(x, |x| fine.abs_w(x));
    let w = wf + (wf - wc) / 3.0;
    let v = (2.0 * PI).powf(-1.5) * 2.0 * w;
    cache.lock().unwrap().insert(resolution, v);
    Ok(v)
}

/// Location of `sup |W|`, for diagnostics and cross-checks.
pub fn cprime_argmax(resolution: usize) -> [f64; 2] {
    let m = Midpoint::new(resolution);
    pattern_max(coarse_argmax(&m), |x| m.abs_w(x)).0
}

struct Midpoint {
    nodes: Vec<f64>,
    weight: f64,
}

impl Midpoint {
    fn new(r: usize) -> Self {
        let h = 2.0 / r as f64;
        Self {
            nodes: (0..r).map(|i| -1.0 + (i as f64 + 0.5) * h).collect(),
            weight: h * h,
        }
    }

    /// `|∫ s(ξ) sin(ξ·x) dξ|` with `s(ξ) = (−ξ₂, ξ₁)/|ξ|`.
    fn abs_w(&self, x: [f64; 2]) -> f64 {
        let (sa, ca): (Vec<f64>, Vec<f64>) = self.nodes.iter().map(|&a| (a * x[0]).sin_cos()).unzip();
        let (sb, cb): (Vec<f64>, Vec<f64>) = self.nodes.iter().map(|&b| (b * x[1]).sin_cos()).unzip();
        let (mut w0, mut w1) = (0.0, 0.0);
        for (i, &a) in self.nodes.iter().enumerate() {
            for (j, &b) in self.nodes.iter().enumerate() {
                let s = sa[i] * cb[j] + ca[i] * sb[j];
                let inv = 1.0 / a.hypot(b);
                w0 -= b * inv * s;
                w1 += a * inv * s;
            }
        }
        self.weight * w0.hypot(w1)
    }
}

fn coarse_argmax(m: &Midpoint) -> [f64; 2] {
    let mut best = ([0.0, 0.0], f64::NEG_INFINITY);
    for i in 0..=24 {
        for j in 0..=i {
            let x = [i as f64 * 0.25, j as f64 * 0.25];
            let v = m.abs_w(x);
            if v > best.1 {
                best = (x, v);
            }
        }
    }
    best.0
}

/// Compass search for a local maximum of a function of two variables.
pub(crate) fn pattern_max(mut x: [f64; 2], f: impl Fn([f64; 2]) -> f64) -> ([f64; 2], f64) {
    let mut fx = f(x);
    let mut step = 0.1;
    while step > 1e-10 {
        let mut moved = false;
        for d in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
            let y = [x[0] + step * d[0], x[1] + step * d[1]];
            let fy = f(y);
            if fy > fx {
                x = y;
                fx = fy;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_resolution() {
        assert!(cprime(32).is_err());
        assert!(cprime(65).is_err());
    }
}
