use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use mildns::datagen::{
    build_example, cprime, sweep_energy, uncorrected_energy, verify_example, ExampleParams, VerifyOptions,
    DEFAULT_RESOLUTION,
};
use mildns::duhamel::{
    energy_ledger, etd_march, far_field_slope, graded_times, kernel_bound_check, kernel_window, picard_solve,
    probe_corpus_reports, resolution_time, scaling_collapse, CorpusConfig, EnergyLedger, EtdOptions, PicardConfig,
    ProbeLemma, ProbeOptions, ProbeReport, Verdict,
};
use mildns::norms::{delta_of, norm_report, tstar_of, Constants, TimeSampling};
use mildns::{cnsf, GridSpec, SpectralField, Trajectory};

use crate::config::{Mode, RunConfig};
use crate::output::{num, write_csv, write_json};
use crate::{Command, Outcome};

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Outcome> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    match cmd {
        Command::Norms { field } => norms(field, cfg),
        Command::GenExample => gen_example(cfg),
        Command::Solve { field } => solve(field, cfg),
        Command::Energy { trajectory } => energy(trajectory, cfg),
        Command::Probe => probe(cfg),
        Command::Kernel => kernel(cfg),
    }
}

fn constants(cfg: &RunConfig) -> Result<Constants> {
    Ok(Constants::new(cfg.constants.mu0, cfg.constants.c0)?)
}

fn read_field(path: &Path) -> Result<SpectralField> {
    cnsf::read(path).with_context(|| format!("reading {}", path.display()))
}

fn norms(path: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let f = read_field(path)?;
    let sampling = TimeSampling::default_for(f.grid()).with_ppo(cfg.time.ppo);
    let report = norm_report(&f, cfg.norms.delta_cap, &sampling, cfg.norms.stride, &cfg.norms.alphas)?;
    write_json(&cfg.out.join("norms.json"), "norms", cfg, &report)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct GenExampleResult {
    params: ExampleParams,
    field: Option<String>,
    report: Option<mildns::datagen::ExampleReport>,
}

fn gen_example(cfg: &RunConfig) -> Result<Outcome> {
    let ex = &cfg.example;
    let k = constants(cfg)?;
    let cp = cprime(DEFAULT_RESOLUTION)?;
    let energy = match ex.energy {
        Some(e) => e,
        None if !ex.sweep.is_empty() => {
            let top = ex.sweep.iter().copied().chain([ex.spread]).max().unwrap_or(0);
            sweep_energy(ex.eps, top, k, cp)?
        }
        None => uncorrected_energy(ex.eps, 0, ex.spread as i32, cp),
    };
    let p = ExampleParams::resolve(ex.eps, ex.m, energy, ex.spread, k, cp)?;
    let json_path = cfg.out.join("example.json");
    if !p.feasible {
        eprintln!("infeasible parameters: {}", p.attainability);
        let res = GenExampleResult {
            params: p,
            field: None,
            report: None,
        };
        write_json(&json_path, "gen-example", cfg, &res)?;
        return Ok(Outcome::Done);
    }
    let g = p.grid(cfg.grid.n)?;
    let a = build_example(&p, &g)?;
    let field_path = cfg.out.join("example.cnsf");
    cnsf::write(&field_path, &a)?;
    let opts = VerifyOptions {
        sampling: Some(TimeSampling::default_for(&g).with_ppo(cfg.time.ppo)),
        stride: cfg.norms.stride,
        sweep: ex.sweep.clone(),
        sweep_ppo: ex.sweep_ppo,
    };
    let report = verify_example(&a, &p, &opts)?;
    if !report.sweep.is_empty() {
        let beta = report.beta.map(num).unwrap_or_default();
        let rows: Vec<Vec<String>> = report
            .sweep
            .iter()
            .map(|s| {
                vec![
                    s.spread.to_string(),
                    s.q0.to_string(),
                    s.q1.to_string(),
                    s.feasible.to_string(),
                    num(s.correction),
                    num(s.energy),
                    num(s.energy_rel_err),
                    num(s.dyadic_besov),
                    num(s.carleson_bmo),
                    num(s.carleson_bmo_delta),
                    num(s.ladder_bound),
                    num(s.normalized_bmo),
                    beta.clone(),
                ]
            })
            .collect();
        write_csv(
            &cfg.out.join("sweep.csv"),
            &[
                "spread",
                "q0",
                "q1",
                "feasible",
                "correction",
                "energy",
                "energy_rel_err",
                "dyadic_besov",
                "carleson_bmo",
                "carleson_bmo_delta",
                "ladder_bound",
                "normalized_bmo",
                "beta",
            ],
            &rows,
        )?;
    }
    let res = GenExampleResult {
        params: p,
        field: Some(field_path.to_string_lossy().into_owned()),
        report: Some(report),
    };
    write_json(&json_path, "gen-example", cfg, &res)?;
    Ok(Outcome::Done)
}

fn energy_csv(path: &Path, ledger: &EnergyLedger) -> Result<()> {
    let e0 = ledger.initial_energy;
    let rows: Vec<Vec<String>> = ledger
        .samples
        .iter()
        .map(|s| {
            vec![
                num(s.t),
                num(s.half_energy),
                num(s.dissipation),
                num(s.residual),
                num(if e0 > 0.0 { s.residual / e0 } else { 0.0 }),
                num(s.distance_to_initial),
            ]
        })
        .collect();
    write_csv(
        path,
        &["t", "half_energy", "dissipation", "residual", "relative_residual", "distance_to_initial"],
        &rows,
    )
}

#[derive(Serialize)]
struct EtdResult {
    delta: f64,
    #[serde(rename = "T_star")]
    t_star: f64,
    stats: Option<mildns::duhamel::EtdStats>,
    samples: usize,
}

fn solve(path: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let a = read_field(path)?;
    let k = constants(cfg)?;
    let s = &cfg.solve;
    let traj_dir = cfg.out.join("trajectory");
    let (traj, outcome) = match s.mode {
        Mode::Picard => {
            let pc = PicardConfig {
                constants: k,
                ppo: cfg.time.ppo,
                stride: cfg.norms.stride,
                tol_rel: s.tol_rel,
                max_iter: s.max_iter,
                divergence_run: 3,
                dealias: s.dealias,
            };
            let (u, trace) = picard_solve(&a, s.eps, &pc)?;
            write_json(&cfg.out.join("trace.json"), "solve", cfg, &trace)?;
            let rows: Vec<Vec<String>> = trace
                .iterations
                .iter()
                .map(|i| {
                    vec![
                        i.iteration.to_string(),
                        num(i.diff_x),
                        num(i.u_x),
                        num(i.u_next_x),
                        i.ratio.map(num).unwrap_or_default(),
                    ]
                })
                .collect();
            write_csv(&cfg.out.join("contraction.csv"), &["iteration", "diff_x", "u_x", "u_next_x", "ratio"], &rows)?;
            eprintln!("picard: {:?} after {} iterations", trace.verdict, trace.iterations.len());
            let outcome = if trace.verdict == Verdict::Diverged { Outcome::Diverged } else { Outcome::Done };
            (u, outcome)
        }
        Mode::Etd => {
            if a.is_zero() {
                let res = EtdResult {
                    delta: 0.0,
                    t_star: 0.0,
                    stats: None,
                    samples: 1,
                };
                write_json(&cfg.out.join("etd.json"), "solve", cfg, &res)?;
                (Trajectory::new(a, mildns::Provenance::Etd), Outcome::Done)
            } else {
                let delta = delta_of(s.eps, a.l2_sq(), k)?;
                let t_star = tstar_of(&a, k.mu0);
                let times = graded_times((delta / 8.0).min(resolution_time(a.grid())), t_star, cfg.time.ppo)?;
                let opts = EtdOptions {
                    dealias: s.dealias,
                    mu0: Some(k.mu0),
                    ..Default::default()
                };
                let (u, stats) = etd_march(&a, s.h, &times, s.scheme, &opts)?;
                let res = EtdResult {
                    delta,
                    t_star,
                    samples: u.len(),
                    stats: Some(stats),
                };
                write_json(&cfg.out.join("etd.json"), "solve", cfg, &res)?;
                (u, Outcome::Done)
            }
        }
    };
    traj.save(&traj_dir)?;
    let ledger = energy_ledger(&traj);
    energy_csv(&cfg.out.join("energy.csv"), &ledger)?;
    Ok(outcome)
}

fn energy(dir: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let traj = Trajectory::load(dir).with_context(|| format!("loading trajectory {}", dir.display()))?;
    let ledger = energy_ledger(&traj);
    energy_csv(&cfg.out.join("energy.csv"), &ledger)?;
    write_json(&cfg.out.join("energy.json"), "energy", cfg, &ledger)?;
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct ProbeSummary {
    lemma: ProbeLemma,
    alpha: Option<f64>,
    count: usize,
    min_implied_constant: f64,
    max_implied_constant: f64,
}

#[derive(Serialize)]
struct ProbeResult {
    corpus: CorpusConfig,
    summary: Vec<ProbeSummary>,
    reports: Vec<ProbeReport>,
}

fn probe(cfg: &RunConfig) -> Result<Outcome> {
    let pc = &cfg.probe;
    let corpus = CorpusConfig {
        n: cfg.grid.n,
        count: pc.count,
        seed: cfg.seed,
        amplitude: pc.amplitude,
        band: pc.band,
        ppo: cfg.time.ppo,
        delta: pc.delta,
        t_star: pc.t_star,
    };
    let filter: Option<ProbeLemma> = pc.lemma.as_deref().map(str::parse).transpose()?;
    let opts = ProbeOptions {
        stride: cfg.norms.stride,
        dealias: cfg.solve.dealias,
    };
    let mut reports = if corpus.count == 0 {
        Vec::new()
    } else {
        probe_corpus_reports(&corpus, &pc.alphas, &opts)?
    };
    if let Some(l) = filter {
        reports.retain(|r| r.lemma == l);
    }
    let mut groups: BTreeMap<(ProbeLemma, Option<u64>), Vec<f64>> = BTreeMap::new();
    for r in &reports {
        groups
            .entry((r.lemma, r.alpha.map(f64::to_bits)))
            .or_default()
            .push(r.implied_constant);
    }
    let summary = groups
        .into_iter()
        .map(|((lemma, alpha), v)| ProbeSummary {
            lemma,
            alpha: alpha.map(f64::from_bits),
            count: v.len(),
            min_implied_constant: v.iter().cloned().fold(f64::INFINITY, f64::min),
            max_implied_constant: v.iter().cloned().fold(0.0, f64::max),
        })
        .collect();
    let res = ProbeResult {
        corpus,
        summary,
        reports,
    };
    write_json(&cfg.out.join("probe.json"), "probe", cfg, &res)?;
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct KernelResult {
    report: mildns::duhamel::KernelReport,
    slope: Option<mildns::duhamel::SlopeFit>,
    collapse: Option<f64>,
}

fn kernel(cfg: &RunConfig) -> Result<Outcome> {
    let g = GridSpec::with_box_exp(cfg.grid.n, cfg.grid.box_exp)?;
    let (lo, hi) = kernel_window(&g);
    let times = if cfg.kernel.times.is_empty() {
        let top = (10.0 * lo).min(hi);
        vec![lo, (lo * top).sqrt(), top]
    } else {
        cfg.kernel.times.clone()
    };
    let report = kernel_bound_check(&times, &g)?;
    let t0 = times.iter().cloned().fold(f64::INFINITY, f64::min);
    let r_lo = cfg.kernel.slope_lo_sqrt_t * t0.sqrt();
    let r_hi = cfg.kernel.slope_hi_box * g.box_length;
    let slope = if r_hi > r_lo { Some(far_field_slope(t0, &g, r_lo, r_hi)?) } else { None };
    let collapse = if 4.0 * t0 <= hi { Some(scaling_collapse(t0, &g)?) } else { None };
    let rows: Vec<Vec<String>> = report
        .samples
        .iter()
        .map(|s| vec![num(s.t), num(s.c1), num(s.argmax_radius), num(s.sup_abs)])
        .collect();
    write_csv(&cfg.out.join("kernel.csv"), &["t", "c1", "argmax_radius", "sup_abs"], &rows)?;
    let res = KernelResult {
        report,
        slope,
        collapse,
    };
    write_json(&cfg.out.join("kernel.json"), "kernel", cfg, &res)?;
    Ok(Outcome::Done)
}
