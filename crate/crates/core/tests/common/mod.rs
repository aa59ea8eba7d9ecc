#![allow(dead_code)]

use std::f64::consts::PI;

/// Whole-space kernel of `e^{tΔ}ℙ∂_k` at `x`, built from the heat kernel
/// `G` and the Gaussian mass `M(r)` inside radius `r`.
pub fn continuum_kernel(x: [f64; 3], t: f64) -> [[[f64; 3]; 3]; 3] {
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    let r = r2.sqrt();
    let g = (4.0 * PI * t).powf(-1.5) * (-r2 / (4.0 * t)).exp();
    let mass = libm::erf(r / (2.0 * t.sqrt())) - r / (PI * t).sqrt() * (-r2 / (4.0 * t)).exp();
    let b = g / r2 - 3.0 * mass / (4.0 * PI * r.powi(5));
    let db = -g / (2.0 * t * r) - 5.0 * g / r.powi(3) + 15.0 * mass / (4.0 * PI * r.powi(6));
    let d = |a: usize, c: usize| f64::from(u8::from(a == c));
    let mut k = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                k[i][j][l] = -d(i, j) * x[l] * g / (2.0 * t)
                    - b * (d(i, j) * x[l] + d(i, l) * x[j] + d(j, l) * x[i])
                    - db / r * x[i] * x[j] * x[l];
            }
        }
    }
    k
}

pub fn continuum_magnitude(x: [f64; 3], t: f64) -> f64 {
    let k = continuum_kernel(x, t);
    k.iter().flatten().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// `sup_x (|x| + √t)⁴ |K(x, t)|` for the whole-space kernel, by a radial scan
/// along the axis and the diagonals followed by golden refinement.
pub fn continuum_c1() -> (f64, f64) {
    let t = 1.0;
    let dirs = [
        [1.0, 0.0, 0.0],
        [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt(), 0.0],
        [1.0 / 3f64.sqrt(), 1.0 / 3f64.sqrt(), 1.0 / 3f64.sqrt()],
    ];
    let f = |rho: f64, d: [f64; 3]| {
        let x = [rho * d[0], rho * d[1], rho * d[2]];
        (rho + 1.0).powi(4) * continuum_magnitude(x, t)
    };
    // |K| is radial: the magnitude involves only r and the invariants of x
    let d = dirs[0];
    for e in &dirs[1..] {
        assert!((f(3.0, d) - f(3.0, *e)).abs() <= 1e-12 * f(3.0, d));
    }
    let mut best = (0.0, 0.0);
    for i in 1..2000 {
        let rho = i as f64 * 0.01;
        let v = f(rho, d);
        if v > best.1 {
            best = (rho, v);
        }
    }
    let (mut a, mut b) = (best.0 - 0.01, best.0 + 0.01);
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - gr * (b - a);
        let e = a + gr * (b - a);
        if f(c, d) > f(e, d) {
            b = e;
        } else {
            a = c;
        }
    }
    let rho = 0.5 * (a + b);
    (f(rho, d), rho)
}
