//! Reusable buffers for pointwise evaluations of heat-smoothed fields and
//! periodic ball averages.

use num_complex::Complex64;

use crate::fft;
use crate::field::SpectralField;
use crate::grid::GridSpec;

pub(crate) struct HeatEval {
    grid: GridSpec,
    k2: Vec<f64>,
    buf: Vec<Complex64>,
}

impl HeatEval {
    pub fn new(grid: GridSpec) -> Self {
        let k2 = grid
            .modes()
            .map(|(_, xi)| xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2])
            .collect();
        Self {
            grid,
            k2,
            buf: vec![Complex64::new(0.0, 0.0); grid.points()],
        }
    }

    /// `out[y] = |e^{sΔ} f(y)|²` on the grid.
    pub fn mag_sq(&mut self, f: &SpectralField, s: f64, out: &mut [f64]) {
        let np = self.grid.points();
        out.iter_mut().for_each(|v| *v = 0.0);
        let plan = fft::plan(self.grid.n_per_axis);
        let damp: Option<Vec<f64>> = if s > 0.0 {
            Some(self.k2.iter().map(|k2| (-s * k2).exp()).collect())
        } else {
            None
        };
        for c in 0..3 {
            let comp = f.component(c);
            if comp.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            match &damp {
                Some(d) => {
                    for i in 0..np {
                        self.buf[i] = comp[i] * d[i];
                    }
                }
                None => self.buf.copy_from_slice(comp),
            }
            plan.inverse(&mut self.buf);
            for (o, z) in out.iter_mut().zip(&self.buf) {
                *o += z.re * z.re;
            }
        }
    }

    /// `sup_y |e^{sΔ} f(y)|`.
    pub fn sup(&mut self, f: &SpectralField, s: f64, scratch: &mut [f64]) -> f64 {
        self.mag_sq(f, s, scratch);
        scratch.iter().copied().fold(0.0, f64::max).sqrt()
    }
}

/// Averages over Euclidean balls on the periodic grid, via FFT correlation
/// with the ball indicator. Ball membership uses the wrapped distance.
pub(crate) struct BallAverager {
    grid: GridSpec,
    sq_dist: Vec<f64>,
    count: usize,
    indicator_hat: Vec<Complex64>,
    buf: Vec<Complex64>,
}

impl BallAverager {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.n_per_axis;
        let h = grid.spacing();
        let wrap = |i: usize| {
            let m = i.min(n - i) as f64 * h;
            m * m
        };
        let mut sq_dist = Vec::with_capacity(grid.points());
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    sq_dist.push(wrap(i) + wrap(j) + wrap(k));
                }
            }
        }
        Self {
            grid,
            sq_dist,
            count: 0,
            indicator_hat: Vec::new(),
            buf: vec![Complex64::new(0.0, 0.0); grid.points()],
        }
    }

    /// Number of grid points within distance `r` of a grid point.
    pub fn count_within(&self, r: f64) -> usize {
        let r2 = r * r;
        self.sq_dist.iter().filter(|&&d| d <= r2).count()
    }

    /// Ball averages of `values` over `B(x, r)` for every grid point `x`.
    pub fn average(&mut self, values: &[f64], r: f64) -> Vec<f64> {
        let count = self.count_within(r);
        if count <= 1 {
            return values.to_vec();
        }
        let plan = fft::plan(self.grid.n_per_axis);
        if count != self.count {
            let r2 = r * r;
            let mut ind: Vec<Complex64> = self
                .sq_dist
                .iter()
                .map(|&d| Complex64::new(if d <= r2 { 1.0 } else { 0.0 }, 0.0))
                .collect();
            plan.forward(&mut ind);
            self.indicator_hat = ind;
            self.count = count;
        }
        for (b, v) in self.buf.iter_mut().zip(values) {
            *b = Complex64::new(*v, 0.0);
        }
        plan.forward(&mut self.buf);
        // the ball is symmetric, so correlation equals convolution
        for (b, h) in self.buf.iter_mut().zip(&self.indicator_hat) {
            *b *= h;
        }
        plan.inverse(&mut self.buf);
        let scale = 1.0 / (count as f64 * self.grid.points() as f64);
        self.buf.iter().map(|z| z.re * scale).collect()
    }
}

/// Maximum over grid points whose indices are multiples of `stride`; returns
/// the value and the flat index of the maximizer.
pub(crate) fn strided_max(values: &[f64], n: usize, stride: usize) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for i in (0..n).step_by(stride) {
        for j in (0..n).step_by(stride) {
            for k in (0..n).step_by(stride) {
                let idx = (i * n + j) * n + k;
                if values[idx] > best.0 {
                    best = (values[idx], idx);
                }
            }
        }
    }
    best
}
