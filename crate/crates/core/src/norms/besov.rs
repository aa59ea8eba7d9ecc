use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::lp::{self, LPBasis};
use crate::norms::sampling::TimeSampling;
use crate::ops::norm_sq;
use crate::workspace::HeatEval;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaloricBesov {
    pub value: f64,
    pub argmax_t: f64,
}

/// `sup_t t^{1/2} ‖e^{tΔ} f‖_∞` over the sampled times, with the best sample
/// refined by golden-section search in `ln t` between its neighbours.
pub fn caloric_besov(f: &SpectralField, sampling: &TimeSampling) -> Result<CaloricBesov> {
    sampling.validate().map_err(|_| Error::EmptySampling)?;
    let times = sampling.times();
    if times.is_empty() {
        return Err(Error::EmptySampling);
    }
    let mut heat = HeatEval::new(*f.grid());
    let mut scratch = vec![0.0; f.grid().points()];
    let mut eval = |t: f64| t.sqrt() * heat.sup(f, t, &mut scratch);
    let values: Vec<f64> = times.iter().map(|&t| eval(t)).collect();
    let (k, &best) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    if best == 0.0 {
        return Ok(CaloricBesov {
            value: 0.0,
            argmax_t: times[k],
        });
    }
    let lo = times[k.saturating_sub(1)].ln();
    let hi = times[(k + 1).min(times.len() - 1)].ln();
    let (t_ref, v_ref) = golden_max(lo, hi, 48, |s| eval(s.exp()));
    let (value, argmax_t) = if v_ref > best {
        (v_ref, t_ref.exp())
    } else {
        (best, times[k])
    };
    Ok(CaloricBesov { value, argmax_t })
}

fn golden_max(mut a: f64, mut b: f64, iters: usize, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Lebesgue exponent or summation index; only 2 and ∞ are supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exponent {
    Two,
    Infinity,
}

impl TryFrom<f64> for Exponent {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        if p == 2.0 {
            Ok(Exponent::Two)
        } else if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else {
            Err(Error::UnsupportedNorm(format!(
                "exponent {p}; only 2 and ∞ are implemented"
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicBesov {
    pub value: f64,
    /// `(q, λ_q^s ‖f_q‖_p)` for every resolvable block.
    pub blocks: Vec<(i32, f64)>,
    pub argmax_q: i32,
}

/// `‖f‖_{Ḃ^s_{p,r}}` from the Littlewood–Paley blocks of the grid.
pub fn dyadic_besov(f: &SpectralField, s: f64, p: f64, r: f64) -> Result<DyadicBesov> {
    let p = Exponent::try_from(p)?;
    let r = Exponent::try_from(r)?;
    let basis = LPBasis::for_grid(f.grid());
    let mut blocks = Vec::new();
    for q in basis.blocks() {
        let fq = f.apply_scalar_symbol(|xi| lp::phi_q(norm_sq(xi).sqrt(), q));
        let norm = match p {
            Exponent::Infinity => fq.sup_norm(),
            Exponent::Two => fq.l2_norm(),
        };
        blocks.push((q, lp::lambda(q).powf(s) * norm));
    }
    let (argmax_q, top) = blocks
        .iter()
        .copied()
        .fold((basis.q_min, 0.0), |acc, b| if b.1 > acc.1 { b } else { acc });
    let value = match r {
        Exponent::Infinity => top,
        Exponent::Two => blocks.iter().map(|b| b.1 * b.1).sum::<f64>().sqrt(),
    };
    Ok(DyadicBesov {
        value,
        blocks,
        argmax_q,
    })
}
