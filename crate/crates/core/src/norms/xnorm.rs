use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::trajectory::Trajectory;
use crate::workspace::{strided_max, BallAverager};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XNormReport {
    #[serde(rename = "norm_0_Tstar")]
    pub norm_0_tstar: f64,
    pub bracket_delta: f64,
    pub norm_0_delta: f64,
    #[serde(rename = "norm_delta_Tstar")]
    pub norm_delta_tstar: f64,
    pub x_norm: f64,
    pub delta: f64,
    #[serde(rename = "T_star")]
    pub t_star: f64,
}

/// Streaming evaluation of the trajectory norms: feed `(t, u(t))` in
/// increasing order starting at `t = 0`, then call [`finish`](Self::finish).
///
/// The inner time integral of `⟦u⟧_δ` uses the trapezoidal rule on the
/// pushed samples.
pub struct XNormAccumulator {
    grid: GridSpec,
    delta: f64,
    t_star: f64,
    stride: usize,
    balls: BallAverager,
    acc: Vec<f64>,
    prev: Vec<f64>,
    prev_t: Option<f64>,
    first_positive: Option<f64>,
    sup_0_tstar: f64,
    sup_0_delta: f64,
    sup_delta_tstar: f64,
    bracket: f64,
}

impl XNormAccumulator {
    pub fn new(grid: GridSpec, delta: f64, t_star: f64, stride: usize) -> Result<Self> {
        let n = grid.n_per_axis;
        if stride == 0 || !n.is_multiple_of(stride) {
            return Err(Error::InvalidParams(format!(
                "stride {stride} must divide n_per_axis {n}"
            )));
        }
        if !(delta >= 0.0 && t_star >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "need delta >= 0 and T* >= 0, got {delta}, {t_star}"
            )));
        }
        Ok(Self {
            grid,
            delta,
            t_star,
            stride,
            balls: BallAverager::new(grid),
            acc: vec![0.0; grid.points()],
            prev: Vec::new(),
            prev_t: None,
            first_positive: None,
            sup_0_tstar: 0.0,
            sup_0_delta: 0.0,
            sup_delta_tstar: 0.0,
            bracket: 0.0,
        })
    }

    pub fn push(&mut self, t: f64, u: &SpectralField) -> Result<()> {
        if *u.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        match self.prev_t {
            None if t != 0.0 => {
                return Err(Error::InvalidParams("first sample must be at t = 0".into()))
            }
            Some(p) if t <= p => {
                return Err(Error::InvalidParams(format!("time {t} not after {p}")))
            }
            _ => {}
        }
        let m = u.magnitude_sq();
        if let Some(p) = self.prev_t {
            if self.first_positive.is_none() {
                self.first_positive = Some(t);
            }
            let half = 0.5 * (t - p);
            for ((a, x), y) in self.acc.iter_mut().zip(&self.prev).zip(&m) {
                *a += half * (x + y);
            }
            let weighted = t.sqrt() * m.iter().copied().fold(0.0, f64::max).sqrt();
            if t <= self.t_star {
                self.sup_0_tstar = self.sup_0_tstar.max(weighted);
                if t <= self.delta {
                    self.sup_0_delta = self.sup_0_delta.max(weighted);
                }
                if t >= self.delta {
                    self.sup_delta_tstar = self.sup_delta_tstar.max(weighted);
                }
            }
            let half_box = self.grid.box_length / 2.0;
            if t <= self.delta && t.sqrt() <= half_box {
                let avg = self.balls.average(&self.acc, t.sqrt());
                let (v, _) = strided_max(&avg, self.grid.n_per_axis, self.stride);
                self.bracket = self.bracket.max(v.max(0.0).sqrt());
            }
        }
        self.prev = m;
        self.prev_t = Some(t);
        Ok(())
    }

    pub fn finish(self) -> Result<XNormReport> {
        let last = self.prev_t.unwrap_or(0.0);
        let first = self.first_positive.unwrap_or(f64::INFINITY);
        let need_low = self.delta / 8.0;
        if self.t_star > 0.0 && (first > need_low.max(f64::MIN_POSITIVE) || last < self.t_star) {
            let (from, to) = if last < self.t_star {
                (last, self.t_star)
            } else {
                (0.0, first)
            };
            return Err(Error::Coverage { from, to });
        }
        Ok(XNormReport {
            norm_0_tstar: self.sup_0_tstar,
            bracket_delta: self.bracket,
            norm_0_delta: self.sup_0_delta,
            norm_delta_tstar: self.sup_delta_tstar,
            x_norm: self.sup_0_tstar.max(self.bracket),
            delta: self.delta,
            t_star: self.t_star,
        })
    }
}

/// All trajectory norms of `u` from its own samples.
pub fn xnorm(u: &Trajectory, delta: f64, t_star: f64, stride: usize) -> Result<XNormReport> {
    let mut acc = XNormAccumulator::new(*u.grid(), delta, t_star, stride)?;
    for (t, f) in u.iter() {
        acc.push(t, f)?;
    }
    acc.finish()
}
