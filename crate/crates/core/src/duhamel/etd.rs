use serde::{Deserialize, Serialize};

use super::nonlinear::Nonlinear;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::ops::{gradient_l2_sq, norm_sq};
use crate::trajectory::{Provenance, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    EtdRk2,
    EtdRk4,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::EtdRk2 => 2,
            Scheme::EtdRk4 => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EtdOptions {
    /// Advective bound `h · k_max · Σ|û| ≤ cfl`.
    pub cfl: f64,
    pub max_halvings: u32,
    pub dealias: bool,
    /// Report the first sample with `‖∇u‖₂ ≤ mu0`.
    pub mu0: Option<f64>,
}

impl Default for EtdOptions {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            max_halvings: 10,
            dealias: true,
            mu0: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtdStats {
    pub scheme: Scheme,
    pub h: f64,
    /// Step size in force at the end of the run.
    pub h_final: f64,
    pub steps: usize,
    pub halvings: u32,
    /// First sample time with `‖∇u‖₂ ≤ μ₀`, when requested.
    #[serde(rename = "T_star_star")]
    pub t_star_star: Option<f64>,
    pub max_divergence_residual: f64,
}

/// `φ₁, φ₂, φ₃` at `c ≤ 0`; Taylor series near the origin.
fn phis(c: f64) -> [f64; 3] {
    if c.abs() < 1.0 {
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            // Σ cⁿ/(n+k+1)!
            let mut term = 1.0 / [1.0, 2.0, 6.0][k];
            let mut sum = term;
            for n in 1..30 {
                term *= c / (n + k + 1) as f64;
                sum += term;
            }
            *o = sum;
        }
        out
    } else {
        let e = c.exp();
        let p1 = (e - 1.0) / c;
        let p2 = (p1 - 1.0) / c;
        let p3 = (p2 - 0.5) / c;
        [p1, p2, p3]
    }
}

/// Per-mode coefficients for one step length.
struct Coeffs {
    h: f64,
    e: Vec<f64>,
    e2: Vec<f64>,
    q: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    f3: Vec<f64>,
}

impl Coeffs {
    fn new(lam: &[f64], h: f64, scheme: Scheme) -> Self {
        let n = lam.len();
        let mut s = Self {
            h,
            e: Vec::with_capacity(n),
            e2: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        for &l in lam {
            let c = -l * h;
            let [p1, p2, p3] = phis(c);
            s.e.push(c.exp());
            match scheme {
                Scheme::EtdRk2 => {
                    s.f1.push(h * p1);
                    s.f2.push(h * p2);
                }
                Scheme::EtdRk4 => {
                    s.e2.push((0.5 * c).exp());
                    s.q.push(0.5 * h * phis(0.5 * c)[0]);
                    s.f1.push(h * (p1 - 3.0 * p2 + 4.0 * p3));
                    s.f2.push(h * (p2 - 2.0 * p3));
                    s.f3.push(h * (4.0 * p3 - p2));
                }
            }
        }
        s
    }
}

/// `out[c,idx] = Σ_k w_k[idx] · f_k[c,idx]`, the per-mode combination used by
/// every stage.
fn combine(grid: GridSpec, terms: &[(&[f64], &SpectralField)]) -> SpectralField {
    let np = grid.points();
    let mut out = SpectralField::zeros(grid);
    let o = out.coeffs_mut();
    for &(w, f) in terms {
        let fc = f.coeffs();
        for c in 0..3 {
            let base = c * np;
            for idx in 0..np {
                o[base + idx] += fc[base + idx] * w[idx];
            }
        }
    }
    out.set_solenoidal(true);
    out
}

struct Marcher {
    grid: GridSpec,
    lam: Vec<f64>,
    nl: Nonlinear,
    scheme: Scheme,
}

impl Marcher {
    /// `−ℙ∇·(u ⊗ u)`
    fn rhs(&mut self, u: &SpectralField) -> Result<SpectralField> {
        let mut b = self.nl.apply(u, u)?;
        b.scale_in_place(-1.0);
        Ok(b)
    }

    fn step(&mut self, u: &SpectralField, k: &Coeffs) -> Result<SpectralField> {
        let g = self.grid;
        let nu = self.rhs(u)?;
        match self.scheme {
            Scheme::EtdRk2 => {
                let a = combine(g, &[(&k.e, u), (&k.f1, &nu)]);
                let na = self.rhs(&a)?;
                let diff = na.sub(&nu)?;
                let mut out = combine(g, &[(&k.f2, &diff)]);
                out.axpy_in_place(1.0, &a)?;
                Ok(out)
            }
            Scheme::EtdRk4 => {
                let a = combine(g, &[(&k.e2, u), (&k.q, &nu)]);
                let na = self.rhs(&a)?;
                let b = combine(g, &[(&k.e2, u), (&k.q, &na)]);
                let nb = self.rhs(&b)?;
                let mut t = nb.scaled(2.0);
                t.axpy_in_place(-1.0, &nu)?;
                let c = combine(g, &[(&k.e2, &a), (&k.q, &t)]);
                let nc = self.rhs(&c)?;
                let mut ab = na;
                ab.axpy_in_place(1.0, &nb)?;
                ab.scale_in_place(2.0);
                Ok(combine(g, &[(&k.e, u), (&k.f1, &nu), (&k.f2, &ab), (&k.f3, &nc)]))
            }
        }
    }

    /// `h · k_max · Σ|û|`, a bound on the advective Courant number.
    fn courant(&self, u: &SpectralField, h: f64) -> f64 {
        let np = self.grid.points();
        let c = u.coeffs();
        let amp: f64 = (0..np)
            .map(|i| (c[i].norm_sqr() + c[np + i].norm_sqr() + c[2 * np + i].norm_sqr()).sqrt())
            .sum();
        let n = self.grid.n_per_axis as i64;
        let m = if self.nl.dealias() { (n + 2) / 3 - 1 } else { n / 2 };
        h * self.grid.kappa() * m as f64 * 3f64.sqrt() * amp
    }
}

/// Marches `∂ₜu = Δu − ℙ∇·(u ⊗ u)` from `a` with exponential time
/// differencing, landing exactly on `times` (ascending, positive; the last one
/// is the horizon). Each interval is split into equal substeps no longer than
/// `h`; a Courant violation or a non-finite state halves `h` for the rest of
/// the run, at most `opts.max_halvings` times.
pub fn etd_march(a: &SpectralField, h: f64, times: &[f64], scheme: Scheme, opts: &EtdOptions) -> Result<(Trajectory, EtdStats)> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParams(format!("step must be positive, got {h}")));
    }
    let grid = *a.grid();
    let mut m = Marcher {
        grid,
        lam: grid.modes().map(|(_, xi)| norm_sq(xi)).collect(),
        nl: Nonlinear::new(grid, opts.dealias),
        scheme,
    };
    let mut stats = EtdStats {
        scheme,
        h,
        h_final: h,
        steps: 0,
        halvings: 0,
        t_star_star: None,
        max_divergence_residual: 0.0,
    };
    let below = |f: &SpectralField| opts.mu0.is_some_and(|mu| gradient_l2_sq(f).sqrt() <= mu);
    if below(a) {
        stats.t_star_star = Some(0.0);
    }
    let mut traj = Trajectory::new(a.clone(), Provenance::Etd);
    let mut u = a.clone();
    let mut t = 0.0;
    let mut hc = h;
    let mut coeffs: Option<Coeffs> = None;
    for &target in times {
        if !(target > t) {
            return Err(Error::InvalidParams(format!("sample times must increase, got {target} after {t}")));
        }
        'interval: while t < target {
            let remaining = target - t;
            let n_sub = (remaining / hc - 1e-9).ceil().max(1.0);
            let hs = remaining / n_sub;
            if coeffs.as_ref().is_none_or(|k| k.h != hs) {
                coeffs = Some(Coeffs::new(&m.lam, hs, scheme));
            }
            let k = coeffs.as_ref().unwrap();
            for s in 0..n_sub as usize {
                let ok = m.courant(&u, hs) <= opts.cfl;
                let next = if ok { Some(m.step(&u, k)?) } else { None };
                match next {
                    Some(v) if v.coeffs().iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
                        stats.max_divergence_residual = stats.max_divergence_residual.max(v.divergence_residual());
                        u = v;
                        stats.steps += 1;
                        t = if s + 1 == n_sub as usize { target } else { t + hs };
                    }
                    _ => {
                        stats.halvings += 1;
                        if stats.halvings > opts.max_halvings {
                            return Err(Error::StepFailure(format!(
                                "step {hs:e} at t = {t:e} still unstable after {} halvings (Courant {:.3})",
                                opts.max_halvings,
                                m.courant(&u, hs)
                            )));
                        }
                        hc = hs / 2.0;
                        continue 'interval;
                    }
                }
            }
        }
        if stats.t_star_star.is_none() && below(&u) {
            stats.t_star_star = Some(target);
        }
        traj.push(target, u.clone())?;
    }
    stats.h_final = hc;
    Ok((traj, stats))
}
