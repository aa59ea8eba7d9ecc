use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::ops::project_mode;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Evaluates `B(u, v) = ℙ ∇·(u ⊗ v)` pseudo-spectrally, optionally with the
/// 2/3 rule (modes with `|m_i| ≥ n/3` on any axis removed from the inputs and
/// from the result).
pub struct Nonlinear {
    grid: GridSpec,
    dealias: bool,
    keep: Vec<bool>,
    buf: Vec<Complex64>,
}

impl Nonlinear {
    pub fn new(grid: GridSpec, dealias: bool) -> Self {
        let n = grid.n_per_axis;
        let cut = n as i64 / 3;
        let ok = |i: usize| !dealias || grid.wavenumber(i).abs() < cut;
        let mut keep = Vec::with_capacity(grid.points());
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    keep.push(ok(i) && ok(j) && ok(k));
                }
            }
        }
        Self {
            grid,
            dealias,
            keep,
            buf: vec![ZERO; grid.points()],
        }
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    fn to_phys(&mut self, f: &SpectralField, c: usize) -> Vec<f64> {
        let plan = fft::plan(self.grid.n_per_axis);
        for ((b, z), &k) in self.buf.iter_mut().zip(f.component(c)).zip(&self.keep) {
            *b = if k { *z } else { ZERO };
        }
        plan.inverse(&mut self.buf);
        self.buf.iter().map(|z| z.re).collect()
    }

    /// `ℙ ∇·(u ⊗ v)`; the symmetric case `u = v` needs six products instead of nine.
    pub fn apply(&mut self, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
        if u.grid() != &self.grid || v.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let g = self.grid;
        let np = g.points();
        let same = std::ptr::eq(u, v) || u == v;
        let up: Vec<Vec<f64>> = (0..3).map(|c| self.to_phys(u, c)).collect();
        let vp: Vec<Vec<f64>> = if same {
            Vec::new()
        } else {
            (0..3).map(|c| self.to_phys(v, c)).collect()
        };
        let vp = if same { &up } else { &vp };
        let plan = fft::plan(g.n_per_axis);
        let scale = 1.0 / np as f64;
        // t[i][j] = (u_i v_j)^
        let mut t: Vec<Option<Vec<Complex64>>> = vec![None; 9];
        let product = |i: usize, j: usize, buf: &mut Vec<Complex64>| -> Vec<Complex64> {
            for ((b, a), c) in buf.iter_mut().zip(&up[i]).zip(&vp[j]) {
                *b = Complex64::new(a * c * scale, 0.0);
            }
            plan.forward(buf);
            buf.clone()
        };
        let mut buf = std::mem::take(&mut self.buf);
        if same {
            for &(i, j) in &PAIRS {
                let p = product(i, j, &mut buf);
                if i != j {
                    t[j * 3 + i] = Some(p.clone());
                }
                t[i * 3 + j] = Some(p);
            }
        } else {
            for i in 0..3 {
                for j in 0..3 {
                    t[i * 3 + j] = Some(product(i, j, &mut buf));
                }
            }
        }
        self.buf = buf;
        let t: Vec<Vec<Complex64>> = t.into_iter().map(|x| x.unwrap()).collect();
        let mut out = SpectralField::zeros(g);
        for (idx, xi) in g.modes() {
            if !self.keep[idx] {
                continue;
            }
            let mut d = [ZERO; 3];
            for (i, di) in d.iter_mut().enumerate() {
                for (j, &x) in xi.iter().enumerate() {
                    *di += Complex64::new(0.0, x) * t[i * 3 + j][idx];
                }
            }
            out.set_mode(idx, project_mode(xi, d));
        }
        out.set_solenoidal(true);
        Ok(out)
    }
}
