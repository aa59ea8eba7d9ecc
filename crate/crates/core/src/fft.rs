//! Cubic 3D complex FFTs built from 1D `rustfft` plans.
//!
//! Arrays are row-major `(i, j, k)` with `k` contiguous. The two strided
//! axes are brought into contiguous position by in-place square transposes.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: RefCell<Vec<Complex64>>,
}

thread_local! {
    static PLANS: RefCell<HashMap<usize, Rc<Fft3>>> = RefCell::new(HashMap::new());
}

/// Cached plan for an `n^3` transform on the current thread.
pub fn plan(n: usize) -> Rc<Fft3> {
    PLANS.with(|p| {
        p.borrow_mut()
            .entry(n)
            .or_insert_with(|| Rc::new(Fft3::new(n)))
            .clone()
    })
}

impl Fft3 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            n,
            forward,
            inverse,
            scratch: RefCell::new(vec![Complex64::new(0.0, 0.0); len]),
        }
    }

    /// Unnormalized forward transform, `Σ_j f_j e^{-i k·x_j}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    /// Unnormalized inverse transform, `Σ_k f̂_k e^{+i k·x_j}`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, false);
    }

    fn run(&self, data: &mut [Complex64], forward: bool) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let fft = if forward { &self.forward } else { &self.inverse };
        let mut scratch = self.scratch.borrow_mut();
        // axis 2
        fft.process_with_scratch(data, &mut scratch);
        // axis 1: transpose each (j, k) plane
        for plane in data.chunks_exact_mut(n * n) {
            transpose_square(plane, n, n, 1);
            fft.process_with_scratch(plane, &mut scratch);
            transpose_square(plane, n, n, 1);
        }
        // axis 0: swap i and k for every j
        swap_axes_02(data, n);
        fft.process_with_scratch(data, &mut scratch);
        swap_axes_02(data, n);
    }
}

/// In-place transpose of an `n x n` block with row stride `row` and column stride `col`.
fn transpose_square(data: &mut [Complex64], n: usize, row: usize, col: usize) {
    for a in 0..n {
        for b in (a + 1)..n {
            data.swap(a * row + b * col, b * row + a * col);
        }
    }
}

fn swap_axes_02(data: &mut [Complex64], n: usize) {
    let nn = n * n;
    for j in 0..n {
        let base = j * n;
        for i in 0..n {
            for k in (i + 1)..n {
                data.swap(i * nn + base + k, k * nn + base + i);
            }
        }
    }
}
