use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::lp::{self, PLATEAU};
use crate::ops::{self, norm_sq};

/// Random real divergence-free field whose spectrum fills the plateaus of
/// blocks `q_lo..=q_hi`, i.e. `0.9 λ_{q_lo} ≤ |ξ| ≤ 1.2 λ_{q_hi}`, so that it
/// is exactly the sum of those Littlewood–Paley blocks. Coefficients are
/// Leray-projected standard Gaussians drawn from ChaCha8 seeded with `seed`;
/// the result has unit L² norm. Nyquist planes are left empty.
pub fn random_divfree(g: &GridSpec, band: [i32; 2], seed: u64) -> Result<SpectralField> {
    let [q_lo, q_hi] = band;
    if q_lo > q_hi {
        return Err(Error::EmptyBand);
    }
    let lo = PLATEAU.0 * lp::lambda(q_lo);
    let hi = PLATEAU.1 * lp::lambda(q_hi);
    let n = g.n_per_axis;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(*g);
    let mut draw = || -> Complex64 {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    };
    let mut any = false;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if g.is_nyquist(i) || g.is_nyquist(j) || g.is_nyquist(k) {
                    continue;
                }
                let idx = (i * n + j) * n + k;
                let mirror = (g.mirror(i) * n + g.mirror(j)) * n + g.mirror(k);
                if mirror <= idx {
                    continue;
                }
                let xi = g.wave_vector(i, j, k);
                let r = norm_sq(xi).sqrt();
                if r < lo || r > hi {
                    continue;
                }
                let v = ops::project_mode(xi, [draw(), draw(), draw()]);
                f.set_mode(idx, v);
                f.set_mode(mirror, v.map(|z| z.conj()));
                any = true;
            }
        }
    }
    if !any {
        return Err(Error::EmptyBand);
    }
    let norm = f.l2_norm();
    f.scale_in_place(1.0 / norm);
    f.set_solenoidal(true);
    Ok(f)
}
