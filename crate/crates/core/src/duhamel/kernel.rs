use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::GridSpec;
use crate::datagen::least_squares_slope;
use crate::ops::norm_sq;

/// Unique components `(i, j, k)` with `i ≤ j`; `K_ijk = K_jik`.
pub const KERNEL_COMPONENTS: [(usize, usize, usize); 18] = {
    let mut out = [(0, 0, 0); 18];
    let mut n = 0;
    let mut i = 0;
    while i < 3 {
        let mut j = i;
        while j < 3 {
            let mut k = 0;
            while k < 3 {
                out[n] = (i, j, k);
                n += 1;
                k += 1;
            }
            j += 1;
        }
        i += 1;
    }
    out
};

/// Periodized kernel of `e^{tΔ}ℙ∇·`, sampled on the grid.
#[derive(Clone, Debug)]
pub struct OseenKernel {
    pub grid: GridSpec,
    pub t: f64,
    /// One physical array per entry of [`KERNEL_COMPONENTS`].
    pub components: Vec<Vec<f64>>,
}

impl OseenKernel {
    /// `K_ijk` at flat index `idx`, any ordering of `i, j`.
    pub fn get(&self, i: usize, j: usize, k: usize, idx: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let c = KERNEL_COMPONENTS.iter().position(|&x| x == (i, j, k)).unwrap();
        self.components[c][idx]
    }

    /// Frobenius norm `|K|` per grid point.
    pub fn magnitude(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.grid.points()];
        for (c, &(i, j, _)) in KERNEL_COMPONENTS.iter().enumerate() {
            let w = if i == j { 1.0 } else { 2.0 };
            for (a, v) in acc.iter_mut().zip(&self.components[c]) {
                *a += w * v * v;
            }
        }
        acc.iter_mut().for_each(|a| *a = a.sqrt());
        acc
    }
}

/// Times `t` with `4h ≤ √t ≤ L/8`.
pub fn kernel_window(g: &GridSpec) -> (f64, f64) {
    let lo = 4.0 * g.spacing();
    let hi = g.box_length / 8.0;
    (lo * lo, hi * hi)
}

fn check_window(t: f64, g: &GridSpec) -> Result<()> {
    let (lo, hi) = kernel_window(g);
    if !(t >= lo * (1.0 - 1e-12) && t <= hi * (1.0 + 1e-12)) {
        return Err(Error::KernelWindow { t, lo, hi });
    }
    Ok(())
}

/// Physical-space components of the kernel at one time, two real components
/// per complex inverse FFT.
struct KernelStream {
    grid: GridSpec,
    weight: Vec<f64>,
    buf: Vec<Complex64>,
}

impl KernelStream {
    fn new(t: f64, g: &GridSpec) -> Self {
        let n = g.n_per_axis;
        let inv_vol = 1.0 / g.volume();
        let weight = g
            .modes()
            .map(|(idx, xi)| {
                let (a, b, c) = (idx / (n * n), (idx / n) % n, idx % n);
                let k2 = norm_sq(xi);
                if k2 == 0.0 || g.is_nyquist(a) || g.is_nyquist(b) || g.is_nyquist(c) {
                    0.0
                } else {
                    (-t * k2).exp() * inv_vol
                }
            })
            .collect();
        Self {
            grid: *g,
            weight,
            buf: vec![Complex64::new(0.0, 0.0); g.points()],
        }
    }

    /// Components `2p` (real part) and `2p + 1` (imaginary part).
    fn pair(&mut self, p: usize) -> &[Complex64] {
        let comps = &KERNEL_COMPONENTS[2 * p..2 * p + 2];
        for (idx, xi) in self.grid.modes() {
            let e = self.weight[idx];
            self.buf[idx] = if e == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                let k2 = norm_sq(xi);
                let sym = |&(i, j, k): &(usize, usize, usize)| {
                    let p = f64::from(u8::from(i == j)) - xi[i] * xi[j] / k2;
                    Complex64::new(0.0, xi[k] * p * e)
                };
                // both symbols are Hermitian, so the packed transform is re + i·im
                sym(&comps[0]) + Complex64::new(0.0, 1.0) * sym(&comps[1])
            };
        }
        fft::plan(self.grid.n_per_axis).inverse(&mut self.buf);
        &self.buf
    }
}

fn for_each_component(t: f64, g: &GridSpec, mut f: impl FnMut(usize, &[f64])) {
    let mut stream = KernelStream::new(t, g);
    let mut out = vec![0.0; g.points()];
    for p in 0..9 {
        let buf = stream.pair(p);
        for (o, z) in out.iter_mut().zip(buf) {
            *o = z.re;
        }
        f(2 * p, &out);
        for (o, z) in out.iter_mut().zip(buf) {
            *o = z.im;
        }
        f(2 * p + 1, &out);
    }
}

/// Kernel `K(x, t)` from its symbol `e^{−t|ξ|²}(iξ_k)(δ_ij − ξ_iξ_j/|ξ|²)`.
pub fn oseen_kernel(t: f64, g: &GridSpec) -> Result<OseenKernel> {
    check_window(t, g)?;
    let mut components = vec![Vec::new(); 18];
    for_each_component(t, g, |c, v| components[c] = v.to_vec());
    Ok(OseenKernel {
        grid: *g,
        t,
        components,
    })
}

/// `|K(x, t)|` without keeping the components.
pub fn kernel_magnitude(t: f64, g: &GridSpec) -> Result<Vec<f64>> {
    check_window(t, g)?;
    let mut acc = vec![0.0; g.points()];
    for_each_component(t, g, |c, v| {
        let (i, j, _) = KERNEL_COMPONENTS[c];
        let w = if i == j { 1.0 } else { 2.0 };
        for (a, x) in acc.iter_mut().zip(v) {
            *a += w * x * x;
        }
    });
    acc.iter_mut().for_each(|a| *a = a.sqrt());
    Ok(acc)
}

/// Minimum-image distance from the origin for every grid point.
pub fn periodic_radius(g: &GridSpec) -> Vec<f64> {
    let n = g.n_per_axis;
    let h = g.spacing();
    let d: Vec<f64> = (0..n).map(|i| h * (i.min(n - i)) as f64).collect();
    let mut out = Vec::with_capacity(g.points());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.push((d[i] * d[i] + d[j] * d[j] + d[k] * d[k]).sqrt());
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub t: f64,
    /// `sup_x |K(x,t)|(√t + |x|)⁴`
    pub c1: f64,
    /// `|x|` at the supremum.
    pub argmax_radius: f64,
    pub sup_abs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub n: usize,
    pub box_length: f64,
    pub r_max: f64,
    pub samples: Vec<KernelSample>,
    /// Largest per-time value: the estimate of the decay constant.
    pub c1: f64,
    /// `max/min − 1` over the samples.
    pub spread: f64,
}

/// Weighted supremum over `|x| ≤ r_max`. Periodic images dominate the
/// weight `(√t + |x|)⁴` near the cell boundary, so `r_max` is kept well
/// inside the box ([`DEFAULT_SUP_RADIUS`] of `L`).
pub fn kernel_sample(t: f64, g: &GridSpec, r_max: f64) -> Result<KernelSample> {
    let mag = kernel_magnitude(t, g)?;
    Ok(sample_from_magnitude(&mag, &periodic_radius(g), t, r_max))
}

/// [`kernel_sample`] from a precomputed `|K(·, t)|` and radius table.
pub fn sample_from_magnitude(mag: &[f64], r: &[f64], t: f64, r_max: f64) -> KernelSample {
    let st = t.sqrt();
    let mut best = (0.0, 0.0);
    for (m, &x) in mag.iter().zip(r) {
        if x > r_max {
            continue;
        }
        let v = m * (st + x).powi(4);
        if v > best.0 {
            best = (v, x);
        }
    }
    KernelSample {
        t,
        c1: best.0,
        argmax_radius: best.1,
        sup_abs: mag.iter().cloned().fold(0.0, f64::max),
    }
}

/// Fraction of the box length bounding the supremum in [`kernel_bound_check`].
pub const DEFAULT_SUP_RADIUS: f64 = 0.25;

pub fn kernel_bound_check(ts: &[f64], g: &GridSpec) -> Result<KernelReport> {
    let r_max = DEFAULT_SUP_RADIUS * g.box_length;
    let samples: Vec<KernelSample> = ts.iter().map(|&t| kernel_sample(t, g, r_max)).collect::<Result<_>>()?;
    let hi = samples.iter().map(|s| s.c1).fold(0.0, f64::max);
    let lo = samples.iter().map(|s| s.c1).fold(f64::INFINITY, f64::min);
    Ok(KernelReport {
        n: g.n_per_axis,
        box_length: g.box_length,
        r_max,
        c1: hi,
        spread: if samples.is_empty() { 0.0 } else { hi / lo - 1.0 },
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub t: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    pub slope: f64,
    pub shells: usize,
}

/// Log-log slope of the shell-averaged `|K(·, t)|` against `|x|` over
/// `[r_lo, r_hi]`, with shells one grid spacing wide.
pub fn far_field_slope(t: f64, g: &GridSpec, r_lo: f64, r_hi: f64) -> Result<SlopeFit> {
    let mag = kernel_magnitude(t, g)?;
    slope_from_magnitude(&mag, &periodic_radius(g), g, t, r_lo, r_hi)
}

/// [`far_field_slope`] from a precomputed `|K(·, t)|` and radius table.
pub fn slope_from_magnitude(mag: &[f64], r: &[f64], g: &GridSpec, t: f64, r_lo: f64, r_hi: f64) -> Result<SlopeFit> {
    if !(r_lo > 0.0 && r_hi > r_lo && r_hi <= g.box_length / 2.0) {
        return Err(Error::InvalidParams(format!("slope window [{r_lo}, {r_hi}] not inside (0, L/2]")));
    }
    let h = g.spacing();
    let bins = ((r_hi - r_lo) / h).floor() as usize;
    let mut sum = vec![(0.0, 0.0, 0usize); bins.max(1)];
    for (m, &x) in mag.iter().zip(r) {
        if x < r_lo || x >= r_hi {
            continue;
        }
        let b = (((x - r_lo) / h) as usize).min(sum.len() - 1);
        sum[b].0 += x;
        sum[b].1 += m;
        sum[b].2 += 1;
    }
    let pts: Vec<(f64, f64)> = sum
        .iter()
        .filter(|s| s.2 > 0)
        .map(|s| ((s.0 / s.2 as f64).ln(), (s.1 / s.2 as f64).ln()))
        .collect();
    let slope = least_squares_slope(&pts)
        .ok_or_else(|| Error::InvalidParams("slope window holds fewer than two shells".into()))?;
    Ok(SlopeFit {
        t,
        r_lo,
        r_hi,
        slope,
        shells: pts.len(),
    })
}

/// Largest `|16·K(2x, 4t) − K(x, t)|` over points with `|2x|` inside the
/// central cell, relative to `sup|K(·, t)|`. Streams component pairs.
pub fn scaling_collapse(t: f64, g: &GridSpec) -> Result<f64> {
    check_window(t, g)?;
    check_window(4.0 * t, g)?;
    let n = g.n_per_axis;
    let half = |i: usize| -> Option<usize> {
        // index of 2x for the minimum-image coordinate of i
        let m = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
        (2 * m.abs() < n as i64 / 2).then(|| (2 * m).rem_euclid(n as i64) as usize)
    };
    let pairs: Vec<(usize, usize)> = (0..n)
        .filter_map(|i| half(i).map(|i2| (i, i2)))
        .collect();
    let mut s1 = KernelStream::new(t, g);
    let mut s4 = KernelStream::new(4.0 * t, g);
    let mut mag_sq = vec![0.0; g.points()];
    let mut worst: f64 = 0.0;
    for p in 0..9 {
        let b1 = s1.pair(p);
        let b4 = s4.pair(p);
        for (c, part) in [(2 * p, 0), (2 * p + 1, 1)] {
            let (i, j, _) = KERNEL_COMPONENTS[c];
            let w = if i == j { 1.0 } else { 2.0 };
            let get = |z: &Complex64| if part == 0 { z.re } else { z.im };
            for (m, z) in mag_sq.iter_mut().zip(b1) {
                *m += w * get(z) * get(z);
            }
            for &(a, a2) in &pairs {
                for &(bb, b2) in &pairs {
                    for &(cc, c2) in &pairs {
                        let x = (a * n + bb) * n + cc;
                        let y = (a2 * n + b2) * n + c2;
                        worst = worst.max((16.0 * get(&b4[y]) - get(&b1[x])).abs());
                    }
                }
            }
        }
    }
    let sup = mag_sq.iter().cloned().fold(0.0, f64::max).sqrt();
    Ok(worst / sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn window_enforced() {
        let g = GridSpec::new(32, 2.0 * PI).unwrap();
        let (lo, hi) = kernel_window(&g);
        assert!(matches!(oseen_kernel(0.5 * lo, &g), Err(Error::KernelWindow { .. })));
        assert!(matches!(kernel_magnitude(2.0 * hi, &g), Err(Error::KernelWindow { .. })));
    }

    #[test]
    fn odd_in_x_and_streaming_agrees() {
        let g = GridSpec::new(32, 2.0 * PI).unwrap();
        let (lo, _) = kernel_window(&g);
        let k = oseen_kernel(lo, &g).unwrap();
        let n = 32;
        let idx = |i: usize, j: usize, l: usize| (i * n + j) * n + l;
        let mirror = |i: usize| (n - i) % n;
        let mut worst: f64 = 0.0;
        for c in 0..18 {
            for (i, j, l) in [(1, 2, 3), (5, 0, 7), (3, 3, 3)] {
                let a = k.components[c][idx(i, j, l)];
                let b = k.components[c][idx(mirror(i), mirror(j), mirror(l))];
                worst = worst.max((a + b).abs());
            }
        }
        assert!(worst < 1e-12);
        let mag = k.magnitude();
        let streamed = kernel_magnitude(lo, &g).unwrap();
        assert!(mag.iter().zip(&streamed).all(|(a, b)| (a - b).abs() <= 1e-14 * a.max(1.0)));
    }
}
