use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::bilinear::bilinear_N_all;
use super::picard::graded_times;
use crate::datagen::random_divfree;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::norms::{f_log, XNormAccumulator, XNormReport};
use crate::ops::lambda_alpha;
use crate::trajectory::Trajectory;

/// Which bilinear estimate a report measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeLemma {
    /// `‖N(u,v)‖_{δ,T*}` against the local and late trajectory norms.
    NonlinearLate,
    /// `‖N(u,v)‖_{0,δ}` against the local trajectory norms.
    NonlinearEarly,
    /// `sup t^{α/2}‖Λ^α N(u,u)‖₂` against `‖u‖_{0,T*} sup t^{α/2}‖Λ^α u‖₂`.
    FractionalEnergy,
}

impl std::str::FromStr for ProbeLemma {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonlinear-late" => Ok(Self::NonlinearLate),
            "nonlinear-early" => Ok(Self::NonlinearEarly),
            "fractional-energy" => Ok(Self::FractionalEnergy),
            _ => Err(Error::InvalidParams(format!(
                "unknown estimate '{s}' (nonlinear-late, nonlinear-early, fractional-energy)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub lemma: ProbeLemma,
    pub alpha: Option<f64>,
    pub delta: f64,
    #[serde(rename = "T_star")]
    pub t_star: f64,
    pub lhs: f64,
    /// Every factor entering the right-hand side, by name.
    pub rhs: BTreeMap<String, f64>,
    /// The right-hand side with all constants set to one.
    pub structure: f64,
    /// `lhs / structure` (zero when both vanish).
    pub implied_constant: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub stride: usize,
    pub dealias: bool,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { stride: 2, dealias: true }
    }
}

/// `B(1/2, 1/2 − α/2)`.
pub fn beta_term(alpha: f64) -> f64 {
    let b = 0.5 - 0.5 * alpha;
    libm::tgamma(0.5) * libm::tgamma(b) / libm::tgamma(0.5 + b)
}

fn ratio(lhs: f64, structure: f64) -> f64 {
    if lhs == 0.0 && structure == 0.0 {
        0.0
    } else {
        lhs / structure
    }
}

fn xnorm_of(times: &[f64], fields: &[SpectralField], delta: f64, t_star: f64, stride: usize) -> Result<XNormReport> {
    let mut acc = XNormAccumulator::new(*fields[0].grid(), delta, t_star, stride)?;
    for (&t, f) in times.iter().zip(fields) {
        acc.push(t, f)?;
    }
    acc.finish()
}

/// `sup_{0<t≤T*} t^{α/2}‖Λ^α f(t)‖₂`.
fn weighted_sobolev(times: &[f64], fields: &[SpectralField], alpha: f64, t_star: f64) -> Result<f64> {
    let mut best: f64 = 0.0;
    for (&t, f) in times.iter().zip(fields) {
        if t > 0.0 && t <= t_star * (1.0 + 1e-12) {
            best = best.max(t.powf(0.5 * alpha) * lambda_alpha(f, alpha)?.l2_norm());
        }
    }
    Ok(best)
}

/// Measures the three bilinear estimates on `(u, v)`; the fractional one
/// uses `N(u, u)` at exponent `alpha`.
pub fn lemma_probe(
    u: &Trajectory,
    v: &Trajectory,
    delta: f64,
    t_star: f64,
    alpha: f64,
    opts: &ProbeOptions,
) -> Result<Vec<ProbeReport>> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidExponent(alpha));
    }
    if !(delta > 0.0 && delta < t_star) {
        return Err(Error::InvalidParams(format!("need 0 < delta < T*, got {delta}, {t_star}")));
    }
    let times = u.times();
    let s = opts.stride;
    let nuv = bilinear_N_all(u, v, opts.dealias)?;
    let nu = xnorm_of(times, &nuv, delta, t_star, s)?;
    let xu = xnorm_of(times, u.fields(), delta, t_star, s)?;
    let xv = xnorm_of(times, v.fields(), delta, t_star, s)?;
    let local_u = xu.norm_0_delta + xu.bracket_delta;
    let local_v = xv.norm_0_delta + xv.bracket_delta;
    let x = delta / t_star;
    let f = f_log(x)?;
    // independent evaluation: F(x) = 2 arcosh(x^{-1/2})
    let f_check = 2.0 * (1.0 / x.sqrt()).acosh();

    let mut late = BTreeMap::new();
    late.insert("local_u".to_string(), local_u);
    late.insert("local_v".to_string(), local_v);
    late.insert("late_u".to_string(), xu.norm_delta_tstar);
    late.insert("late_v".to_string(), xv.norm_delta_tstar);
    late.insert("f_log".to_string(), f);
    late.insert("f_log_check".to_string(), f_check);
    let late_structure = local_u * local_v + f * xu.norm_delta_tstar * xv.norm_delta_tstar;

    let mut early = BTreeMap::new();
    early.insert("local_u".to_string(), local_u);
    early.insert("local_v".to_string(), local_v);
    let early_structure = local_u * local_v;

    let nuu = if std::ptr::eq(u, v) { nuv.clone() } else { bilinear_N_all(u, u, opts.dealias)? };
    let frac_lhs = weighted_sobolev(times, &nuu, alpha, t_star)?;
    let frac_u = weighted_sobolev(times, u.fields(), alpha, t_star)?;
    let mut frac = BTreeMap::new();
    frac.insert("u_0_tstar".to_string(), xu.norm_0_tstar);
    frac.insert("weighted_sobolev_u".to_string(), frac_u);
    frac.insert("beta".to_string(), beta_term(alpha));
    let frac_structure = xu.norm_0_tstar * frac_u;

    let report = |lemma, alpha, lhs: f64, rhs, structure: f64| ProbeReport {
        lemma,
        alpha,
        delta,
        t_star,
        lhs,
        rhs,
        structure,
        implied_constant: ratio(lhs, structure),
    };
    Ok(vec![
        report(ProbeLemma::NonlinearLate, None, nu.norm_delta_tstar, late, late_structure),
        report(ProbeLemma::NonlinearEarly, None, nu.norm_0_delta, early, early_structure),
        report(ProbeLemma::FractionalEnergy, Some(alpha), frac_lhs, frac, frac_structure),
    ])
}

/// Regression corpus of heat-flow trajectories from random small data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    /// L² norm of each initial field.
    pub amplitude: f64,
    pub band: [i32; 2],
    pub ppo: u32,
    pub delta: f64,
    #[serde(rename = "T_star")]
    pub t_star: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            n: 16,
            count: 20,
            seed: 0,
            amplitude: 0.1,
            band: [0, 1],
            ppo: 8,
            delta: 0.05,
            t_star: 1.0,
        }
    }
}

pub fn probe_corpus(cfg: &CorpusConfig) -> Result<Vec<Trajectory>> {
    let g = GridSpec::new(cfg.n, 2.0 * std::f64::consts::PI)?;
    let times = graded_times(cfg.delta / 8.0, cfg.t_star, cfg.ppo)?;
    (0..cfg.count)
        .map(|i| {
            let a = random_divfree(&g, cfg.band, cfg.seed + i as u64)?.scaled(cfg.amplitude);
            Trajectory::heat_flow(&a, &times)
        })
        .collect()
}

/// Probes every consecutive pair of the corpus at each `alpha`.
pub fn probe_corpus_reports(cfg: &CorpusConfig, alphas: &[f64], opts: &ProbeOptions) -> Result<Vec<ProbeReport>> {
    let corpus = probe_corpus(cfg)?;
    let mut out = Vec::new();
    for (i, u) in corpus.iter().enumerate() {
        let v = &corpus[(i + 1) % corpus.len()];
        for (k, &alpha) in alphas.iter().enumerate() {
            let reports = lemma_probe(u, v, cfg.delta, cfg.t_star, alpha, opts)?;
            // the bilinear estimates do not depend on alpha
            out.extend(reports.into_iter().filter(|r| k == 0 || r.lemma == ProbeLemma::FractionalEnergy));
        }
    }
    Ok(out)
}
