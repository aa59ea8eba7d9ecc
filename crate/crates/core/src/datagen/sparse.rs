//! Exact evaluation of the example's norms from its finitely many modes,
//! independent of any grid.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::cprime::pattern_max;
use super::example::{transverse_symbol, ExampleParams, CUBE_OFFSETS};
use crate::lp;

/// Half of the spectrum: `a(y) = Σ b_k cos(k·y)` over one mode of each ± pair.
#[derive(Clone, Debug)]
struct Block {
    q: i32,
    amp: f64,
    modes: Vec<([f64; 3], [f64; 3])>,
}

/// The example as an explicit cosine series.
#[derive(Clone, Debug)]
pub struct PacketModel {
    params: ExampleParams,
    blocks: Vec<Block>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseCarleson {
    pub value: f64,
    pub argmax_t: f64,
    pub argmax_center: [f64; 3],
}

impl PacketModel {
    pub fn new(p: &ExampleParams) -> Self {
        let kappa = p.kappa();
        let blocks = p
            .blocks()
            .map(|q| {
                let c = p.carrier(q);
                let amp = p.block_amplitude(q);
                let mut modes = Vec::with_capacity(24);
                for m1 in CUBE_OFFSETS {
                    for m2 in CUBE_OFFSETS {
                        for m3 in CUBE_OFFSETS {
                            if m2 == 0 && m3 == 0 {
                                continue;
                            }
                            let k = [(c + m1) as f64 * kappa, m2 as f64 * kappa, m3 as f64 * kappa];
                            let b = transverse_symbol(m2, m3).map(|s| 2.0 * amp * s);
                            modes.push((k, b));
                        }
                    }
                }
                Block { q, amp, modes }
            })
            .collect();
        Self {
            params: p.clone(),
            blocks,
        }
    }

    pub fn params(&self) -> &ExampleParams {
        &self.params
    }

    /// `L³ Σ |â|²` summed over both halves of the spectrum.
    pub fn l2_sq(&self) -> f64 {
        let vol = self.params.box_length().powi(3);
        let s: f64 = self
            .blocks
            .iter()
            .flat_map(|b| &b.modes)
            .map(|(_, b)| b.iter().map(|x| x * x).sum::<f64>())
            .sum();
        vol * s / 2.0
    }

    /// `(q, λ_q⁻¹ sup|a_q|)` per block. Each block is exactly one
    /// Littlewood–Paley piece and factorizes as `−2â_q S_q(κy₁) V(κy*)`.
    pub fn besov_blocks(&self) -> Vec<(i32, f64)> {
        let (v, _) = sup_v();
        self.blocks
            .iter()
            .map(|b| {
                let c = self.params.carrier(b.q) as f64;
                (b.q, 2.0 * b.amp * sup_s(c) * v / lp::lambda(b.q))
            })
            .collect()
    }

    pub fn dyadic_besov(&self) -> f64 {
        self.besov_blocks().iter().map(|b| b.1).fold(0.0, f64::max)
    }

    /// `√δ Σ_q λ_q (λ_q⁻¹ sup|a_q|)`, which dominates the Carleson functional
    /// over `t ≤ δ` because `∫₀ᵗ |e^{sΔ}a|² ds ≤ t ‖a‖_∞²`.
    pub fn ladder_bound(&self, delta: f64) -> f64 {
        delta.sqrt()
            * self
                .besov_blocks()
                .iter()
                .map(|(q, v)| lp::lambda(*q) * v)
                .sum::<f64>()
    }

    /// Candidate centres: `y₁ = 0` and the first peak of the top block, with
    /// `y*` at the maximizer of `|V|`.
    fn centers(&self) -> Vec<[f64; 3]> {
        let kappa = self.params.kappa();
        let (_, u) = sup_v();
        let c1 = self.params.carrier(self.params.q1) as f64;
        vec![
            [0.0, u[0] / kappa, u[1] / kappa],
            [PI / (2.0 * c1 * kappa), u[0] / kappa, u[1] / kappa],
        ]
    }

    /// Carleson functional of the continuum heat extension, evaluated in closed
    /// form: with `Λ = |k|² + |l|²` and `r = √t`,
    /// `½ Σ_{k,l} (b_k·b_l) (1 − e^{−tΛ})/Λ [cos((k−l)·x) j(|k−l|r) + cos((k+l)·x) j(|k+l|r)]`
    /// where `j(z) = 3(sin z − z cos z)/z³` is the ball average of a plane wave.
    /// Times run geometrically with `ppo` points per octave up to
    /// `min(cap, (L/2)²)`.
    pub fn carleson(&self, cap: Option<f64>, ppo: u32) -> SparseCarleson {
        let p = &self.params;
        let t_hi = (p.box_length() / 2.0).powi(2).min(cap.unwrap_or(f64::INFINITY));
        let top = lp::lambda(p.q1 + 1);
        let t_lo = (1.0 / (64.0 * top * top)).min(t_hi / 256.0);
        let steps = ((t_hi / t_lo).log2() * ppo as f64).ceil().max(0.0) as i64;
        let centers = self.centers();
        let mut best = SparseCarleson {
            value: 0.0,
            argmax_t: t_hi,
            argmax_center: centers[0],
        };
        let time = |k: i64| t_hi * (-(k as f64) / ppo as f64).exp2();
        let mut best_k = 0;
        for k in 0..=steps {
            let t = time(k);
            for x in &centers {
                let v = self.carleson_at(*x, t).max(0.0).sqrt();
                if v > best.value {
                    best = SparseCarleson {
                        value: v,
                        argmax_t: t,
                        argmax_center: *x,
                    };
                    best_k = k;
                }
            }
        }
        if best.value > 0.0 {
            let x = best.argmax_center;
            let lo = time((best_k + 1).min(steps)).ln();
            let hi = time((best_k - 1).max(0)).ln();
            let (s, v) = golden_max(lo, hi, 40, |s| self.carleson_at(x, s.exp()).max(0.0).sqrt());
            if v > best.value {
                best.value = v;
                best.argmax_t = s.exp();
            }
        }
        best
    }

    pub fn carleson_at(&self, x: [f64; 3], t: f64) -> f64 {
        let r = t.sqrt();
        let mut diag = 0.0;
        for b in &self.blocks {
            for (k, bk) in &b.modes {
                diag += 0.5 * dot(bk, bk) * time_factor(t, 2.0 * dot(k, k));
            }
        }
        let kappa = self.params.kappa();
        let mut total = 0.0;
        for (i, bi) in self.blocks.iter().enumerate() {
            for bj in &self.blocks[i..] {
                let same = bi.q == bj.q;
                if !same {
                    let ci = self.params.carrier(bi.q) as f64;
                    let cj = self.params.carrier(bj.q) as f64;
                    let lam_min = (ci.min(cj) - 1.0) * kappa;
                    let zmin = ((ci - cj).abs() - 2.0) * kappa * r;
                    let tf = t.min(1.0 / (2.0 * lam_min * lam_min));
                    let bound = 4608.0 * bi.amp * bj.amp * tf * j_bound(zmin);
                    if bound < 1e-12 * diag {
                        continue;
                    }
                }
                for (a, (k, bk)) in bi.modes.iter().enumerate() {
                    let others = if same { &bj.modes[a..] } else { &bj.modes[..] };
                    for (offset, (l, bl)) in others.iter().enumerate() {
                        let w = dot(bk, bl);
                        if w == 0.0 {
                            continue;
                        }
                        let mult = if same && offset == 0 { 0.5 } else { 1.0 };
                        let lam = dot(k, k) + dot(l, l);
                        let d = sub(k, l);
                        let s = add(k, l);
                        let term = dot(&d, &x).cos() * j_ball(norm(&d) * r)
                            + dot(&s, &x).cos() * j_ball(norm(&s) * r);
                        total += mult * w * time_factor(t, lam) * term;
                    }
                }
            }
        }
        total
    }
}

#[inline]
fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn add(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// `∫₀ᵗ e^{−sΛ} ds`.
#[inline]
fn time_factor(t: f64, lam: f64) -> f64 {
    if lam * t < 1e-12 {
        t
    } else {
        -(-t * lam).exp_m1() / lam
    }
}

/// Average of `cos(p·y)` over a ball of radius `r` centred at the origin, `z = |p| r`.
#[inline]
pub(crate) fn j_ball(z: f64) -> f64 {
    if z < 1e-3 {
        1.0 - z * z / 10.0
    } else {
        3.0 * (z.sin() - z * z.cos()) / (z * z * z)
    }
}

fn j_bound(z: f64) -> f64 {
    if z <= 1.0 {
        1.0
    } else {
        (6.0 / (z * z)).min(1.0)
    }
}

fn golden_max(mut a: f64, mut b: f64, iters: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..iters {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if f(x1) >= f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `sup_θ |sin(cθ)(1 + 2cos θ)|`, attained on the first lobe `θ ∈ [0, π/c]`.
fn sup_s(c: f64) -> f64 {
    golden_max(0.0, PI, 200, |phi| phi.sin() * (1.0 + 2.0 * (phi / c).cos())).1
}

/// `V(u) = Σ_{m*≠0} s(m*) sin(m*·u)` over the transverse offsets.
fn v_abs(u: [f64; 2]) -> f64 {
    let mut v = [0.0; 3];
    for m2 in CUBE_OFFSETS {
        for m3 in CUBE_OFFSETS {
            let s = transverse_symbol(m2, m3);
            let ph = (m2 as f64 * u[0] + m3 as f64 * u[1]).sin();
            for c in 0..3 {
                v[c] += s[c] * ph;
            }
        }
    }
    dot(&v, &v).sqrt()
}

/// `(sup |V|, argmax)` over the period `[0, 2π)²`.
fn sup_v() -> (f64, [f64; 2]) {
    static CELL: OnceLock<(f64, [f64; 2])> = OnceLock::new();
    *CELL.get_or_init(|| {
        let n = 256;
        let mut best = ([0.0, 0.0], f64::NEG_INFINITY);
        for i in 0..n {
            for j in 0..n {
                let u = [2.0 * PI * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64];
                let v = v_abs(u);
                if v > best.1 {
                    best = (u, v);
                }
            }
        }
        let (u, v) = pattern_max(best.0, v_abs);
        (v, u)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_average_limits() {
        assert!((j_ball(0.0) - 1.0).abs() < 1e-15);
        let z: f64 = 1e-3;
        let direct = 3.0 * (z.sin() - z * z.cos()) / (z * z * z);
        assert!((j_ball(z * 0.999) - direct).abs() < 1e-6);
        for i in 1..1000 {
            let z = i as f64 * 0.05;
            assert!(j_ball(z).abs() <= j_bound(z) + 1e-15);
        }
    }

    #[test]
    fn first_lobe_sup() {
        // c → ∞: the peak tends to 3
        assert!((sup_s(1e9) - 3.0).abs() < 1e-12);
        let c = 16.0;
        let brute = (0..200_000)
            .map(|i| {
                let th = i as f64 * 2.0 * PI / 200_000.0;
                ((c * th).sin() * (1.0 + 2.0 * th.cos())).abs()
            })
            .fold(0.0, f64::max);
        assert!((sup_s(c) - brute).abs() < 1e-6);
    }
}
