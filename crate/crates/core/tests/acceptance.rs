//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line;
//! run with `--nocapture` (or `--show-output`) to see them. The tests share
//! a lock so timings are not distorted by each other.

mod common;

use std::f64::consts::PI;
use std::sync::Mutex;
use std::time::Instant;

use mildns::datagen::{
    build_example, cprime, fit_exponent, random_divfree, sweep_energy, sweep_point, uncorrected_energy,
    ExampleParams, DEFAULT_RESOLUTION, DEFAULT_SWEEP,
};
use mildns::duhamel::{
    energy_ledger, etd_march, graded_times, kernel_magnitude, kernel_window, periodic_radius, picard_solve,
    sample_from_magnitude, scaling_collapse, slope_from_magnitude, EtdOptions, PicardConfig,
    Scheme, Verdict, DEFAULT_SUP_RADIUS,
};
use mildns::norms::{
    caloric_besov, carleson_bmo, delta_of, dyadic_besov, f_log, triebel_dyadic, Constants, TimeSampling,
};
use mildns::ops::{band_project, heat_propagate, leray_project, lp_block};
use mildns::{GridSpec, LPBasis, Side, SpectralField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static LOCK: Mutex<()> = Mutex::new(());

fn report(name: &str, pass: bool, detail: String, start: Instant) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("{verdict} {name}: {detail} [{:.1}s]", start.elapsed().as_secs_f64());
    assert!(pass, "{name}: {detail}");
}

fn lock() -> std::sync::MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn rough_field(g: GridSpec, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phys: [Vec<f64>; 3] = std::array::from_fn(|_| (0..g.points()).map(|_| rng.gen_range(-1.0..1.0)).collect());
    SpectralField::from_physical(g, &phys).unwrap()
}

#[test]
fn spectral_identities() {
    let _g = lock();
    let start = Instant::now();
    let g = GridSpec::new(32, 2.0 * PI).unwrap();
    let h3 = g.spacing().powi(3);
    let blocks = LPBasis::for_grid(&g);
    let mut worst = [0.0f64; 4];
    for seed in 0..20 {
        let mut f = rough_field(g, 1000 + seed);
        let direct: f64 = (0..3)
            .map(|c| f.component_physical(c).iter().map(|x| x * x).sum::<f64>())
            .sum::<f64>()
            * h3;
        worst[0] = worst[0].max((direct - f.l2_sq()).abs() / direct);

        let p = leray_project(&f);
        let phi = f.component(0).to_vec();
        let grad = f.map_modes(|idx, xi, _| {
            let i = Complex64::new(0.0, 1.0);
            [i * xi[0] * phi[idx], i * xi[1] * phi[idx], i * xi[2] * phi[idx]]
        });
        let leray = (leray_project(&p).max_abs_diff(&p) / p.max_coeff())
            .max(leray_project(&grad).max_coeff() / grad.max_coeff());
        worst[1] = worst[1].max(leray);

        let (s, t) = (0.013 * (seed + 1) as f64, 0.007 * (seed + 2) as f64);
        let two = heat_propagate(&heat_propagate(&f, s).unwrap(), t).unwrap();
        worst[2] = worst[2].max(two.max_abs_diff(&heat_propagate(&f, s + t).unwrap()) / f.max_coeff());

        f.remove_mean();
        let mut sum = SpectralField::zeros(g);
        for q in blocks.blocks() {
            sum.axpy_in_place(1.0, &lp_block(&f, q).unwrap()).unwrap();
        }
        worst[3] = worst[3].max(sum.max_abs_diff(&f) / f.max_coeff());
    }
    let pass = worst.iter().all(|&w| w <= 1e-12);
    report(
        "spectral identities",
        pass,
        format!(
            "20 fields at 32^3; parseval {:.1e}, leray {:.1e}, heat semigroup {:.1e}, LP reconstruction {:.1e} (tol 1e-12)",
            worst[0], worst[1], worst[2], worst[3]
        ),
        start,
    );
}

#[test]
fn large_bmo_small_besov_example() {
    let _g = lock();
    let start = Instant::now();
    let eps = 0.05;
    let k = Constants::default();
    let cp = cprime(DEFAULT_RESOLUTION).unwrap();
    let mut notes = Vec::new();
    let mut pass = true;

    // dense construction at 128³ (the largest spread it can hold)
    let p = ExampleParams::resolve(eps, 1.0, uncorrected_energy(eps, 0, 1, cp), 1, k, cp).unwrap();
    let g = p.grid(128).unwrap();
    let a = build_example(&p, &g).unwrap();
    let besov = dyadic_besov(&a, -1.0, f64::INFINITY, f64::INFINITY).unwrap().value;
    let band = band_project(&a, mildns::lp::lambda(p.q1 + 1), Side::High).max_coeff();
    let e_err = (a.l2_sq() - p.energy).abs() / p.energy;
    pass &= besov < eps && band == 0.0 && e_err <= 1e-6;
    notes.push(format!("dense 128^3: besov {besov:.4e} < {eps}, band residual {band}, energy err {e_err:.1e}"));

    // growth sweep with the exact sparse evaluator
    let e = sweep_energy(eps, *DEFAULT_SWEEP.iter().max().unwrap(), k, cp).unwrap();
    let pts: Vec<_> = DEFAULT_SWEEP
        .iter()
        .map(|&s| sweep_point(eps, 1.0, e, s, k, cp, 8).unwrap())
        .collect();
    for s in &pts {
        pass &= s.feasible && s.dyadic_besov < eps && s.energy_rel_err <= 1e-6;
    }
    notes.push(format!(
        "sweep {:?}: max besov {:.4e}, max energy err {:.1e}",
        DEFAULT_SWEEP,
        pts.iter().map(|s| s.dyadic_besov).fold(0.0, f64::max),
        pts.iter().map(|s| s.energy_rel_err).fold(0.0, f64::max)
    ));
    let beta = fit_exponent(&pts).unwrap_or(f64::NAN);
    pass &= (0.4..=0.6).contains(&beta);
    notes.push(format!("growth exponent {beta:.4} (want [0.4, 0.6])"));
    report("example suite", pass, notes.join("; "), start);
}

/// Largest ε (on the 64³ example rescaled by ε/0.05) for which the iteration
/// was seen to converge, with divergence at 1.56× that value. Measured at 4
/// time samples per octave with default constants.
const PICARD_THRESHOLD: f64 = 1.6e4;

#[test]
fn picard_contraction() {
    let _g = lock();
    let start = Instant::now();
    let k = Constants::default();
    let cp = cprime(DEFAULT_RESOLUTION).unwrap();
    let p = ExampleParams::resolve(0.05, 1.0, uncorrected_energy(0.05, 0, 0, cp), 0, k, cp).unwrap();
    let a = build_example(&p, &p.grid(64).unwrap()).unwrap();
    let cfg = PicardConfig {
        ppo: 4,
        ..Default::default()
    };
    let mut pass = true;
    let mut notes = Vec::new();
    for eps in [PICARD_THRESHOLD / 2.0, PICARD_THRESHOLD / (2.0 * 10f64.sqrt()), PICARD_THRESHOLD / 20.0] {
        let (_, tr) = picard_solve(&a.scaled(eps / 0.05), eps, &cfg).unwrap();
        let worst = tr
            .iterations
            .iter()
            .filter(|i| i.u_x <= 4.0 * eps)
            .filter_map(|i| i.ratio)
            .fold(0.0, f64::max);
        let ok = tr.verdict == Verdict::Converged && worst <= 0.80 && tr.final_residual <= 1e-8 * eps;
        pass &= ok;
        notes.push(format!(
            "eps {eps:.3e}: {:?} in {} its, max ratio {worst:.3}, residual/eps {:.1e}",
            tr.verdict,
            tr.iterations.len(),
            tr.final_residual / eps
        ));
    }
    report("picard contraction", pass, notes.join("; "), start);
}

#[test]
fn picard_etd_cross_validation() {
    let _g = lock();
    let start = Instant::now();
    let g = GridSpec::new(16, 2.0 * PI).unwrap();
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for (seed, amp) in [(11u64, 1.0), (12, 3.0)] {
        let a = random_divfree(&g, [0, 1], seed).unwrap().scaled(amp);
        let k = Constants::new(amp, 1.0).unwrap();
        let cfg = PicardConfig {
            constants: k,
            ppo: 16,
            ..Default::default()
        };
        let (u, tr) = picard_solve(&a, 0.5, &cfg).unwrap();
        pass &= tr.verdict == Verdict::Converged;
        let (v, _) = etd_march(&a, 1e-2, &u.times()[1..], Scheme::EtdRk4, &EtdOptions::default()).unwrap();
        let delta = delta_of(0.5, a.l2_sq(), k).unwrap();
        for ((t, x), y) in u.iter().zip(v.fields()) {
            if t >= delta {
                worst = worst.max(x.sub(y).unwrap().l2_norm() / x.l2_norm());
            }
        }
    }
    pass &= worst <= 1e-6;
    report(
        "picard/etd cross-validation",
        pass,
        format!("16^3, amplitudes 1 and 3, 16 samples/octave: max relative L2 gap {worst:.2e} at t >= delta (tol 1e-6)"),
        start,
    );
}

#[test]
fn energy_equality() {
    let _g = lock();
    let start = Instant::now();
    let g = GridSpec::new(16, 2.0 * PI).unwrap();
    let a = random_divfree(&g, [0, 1], 21).unwrap().scaled(2.0);
    let e0 = a.l2_sq();
    let mut residuals = Vec::new();
    let mut first_distance = 0.0;
    for ppo in [4, 8, 16] {
        let times = graded_times(1e-5, 1.0, ppo).unwrap();
        let (u, _) = etd_march(&a, 1e-3, &times, Scheme::EtdRk4, &EtdOptions::default()).unwrap();
        let led = energy_ledger(&u);
        residuals.push(led.max_residual / e0);
        first_distance = led.samples[1].distance_to_initial / a.l2_norm();
    }
    let decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
    let pass = residuals.iter().all(|&r| r <= 1e-4) && decreasing && first_distance <= 1e-3;
    report(
        "energy equality",
        pass,
        format!(
            "ledger residual / |a|^2 at 4,8,16 per octave: {:.2e}, {:.2e}, {:.2e} (tol 1e-4, decreasing {decreasing}); |u(t1)-a|/|a| {first_distance:.1e} (tol 1e-3)",
            residuals[0], residuals[1], residuals[2]
        ),
        start,
    );
}

#[test]
fn kernel_bound() {
    let _g = lock();
    let start = Instant::now();
    let g = GridSpec::new(256, 2.0 * PI).unwrap();
    let (lo, _) = kernel_window(&g);
    let r = periodic_radius(&g);
    let r_max = DEFAULT_SUP_RADIUS * g.box_length;
    let mut c1 = Vec::new();
    let mut slope = None;
    for t in [lo, 10f64.sqrt() * lo, 10.0 * lo] {
        let mag = kernel_magnitude(t, &g).unwrap();
        c1.push(sample_from_magnitude(&mag, &r, t, r_max).c1);
        if slope.is_none() {
            slope = Some(slope_from_magnitude(&mag, &r, &g, t, 6.0 * t.sqrt(), 0.25 * g.box_length).unwrap());
        }
    }
    drop(r);
    let slope = slope.unwrap();
    let hi = c1.iter().cloned().fold(0.0, f64::max);
    let low = c1.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = hi / low - 1.0;
    let g128 = GridSpec::new(128, 2.0 * PI).unwrap();
    let collapse = scaling_collapse(kernel_window(&g128).0, &g128).unwrap();
    let (continuum, _) = common::continuum_c1();
    let pass = hi.is_finite() && spread <= 0.05 && (slope.slope + 4.0).abs() <= 0.2 && collapse <= 0.01;
    report(
        "kernel bound",
        pass,
        format!(
            "C1 over a decade of t at 256^3: {:.4}, {:.4}, {:.4} (spread {:.2}%, continuum {continuum:.4}); far-field slope {:.3} over {} shells; scaling collapse {:.2}% at 128^3",
            c1[0], c1[1], c1[2], 100.0 * spread, slope.slope, slope.shells, 100.0 * collapse
        ),
        start,
    );
}

#[test]
fn log_function() {
    let _g = lock();
    let start = Instant::now();
    let at_one = f_log(1.0).unwrap();
    let mut asym: f64 = 0.0;
    let mut asym_ok = true;
    for i in 1..=10_000 {
        let x = 0.1 * i as f64 / 10_000.0;
        let d = (f_log(x).unwrap() + x.ln() - 4f64.ln()).abs();
        asym = asym.max(d / x);
        asym_ok &= d <= x;
    }
    let vals: Vec<f64> = (1..=10_000).map(|i| f_log(i as f64 / 10_000.0).unwrap()).collect();
    let monotone = vals.windows(2).all(|w| w[1] < w[0]);
    let pass = at_one == 0.0 && asym_ok && monotone;
    report(
        "F(x)",
        pass,
        format!("F(1) = {at_one}; max |F(x)+ln x-ln 4|/x on (0, 0.1] = {asym:.3}; strictly decreasing on 1e4 points: {monotone}"),
        start,
    );
}

/// Ratio ranges over the 100-field corpus below, frozen from a reference
/// run and widened outward in the fourth digit.
const CALORIC_OVER_DYADIC: (f64, f64) = (0.3722, 0.6226);
const CARLESON_OVER_TRIEBEL: (f64, f64) = (0.5535, 0.9084);

#[test]
fn norm_equivalence() {
    let _g = lock();
    let start = Instant::now();
    let g = GridSpec::new(16, 2.0 * PI).unwrap();
    let s = TimeSampling::default_for(&g);
    let bands = [[0, 0], [0, 1], [1, 2], [0, 2], [2, 3]];
    let (mut r1, mut r2) = ((f64::INFINITY, 0.0f64), (f64::INFINITY, 0.0f64));
    let mut single_block: f64 = 0.0;
    for i in 0..100u64 {
        let f = random_divfree(&g, bands[i as usize % 5], i).unwrap();
        let cb = caloric_besov(&f, &s).unwrap().value;
        let db = dyadic_besov(&f, -1.0, f64::INFINITY, f64::INFINITY).unwrap().value;
        let cm = carleson_bmo(&f, None, &s, 2).unwrap().value;
        let tr = triebel_dyadic(&f).value;
        let (x, y) = (cb / db, cm / tr);
        r1 = (r1.0.min(x), r1.1.max(x));
        r2 = (r2.0.min(y), r2.1.max(y));
        if i % 5 == 0 {
            // one shell |ξ| = 1: sup_t √t e^{-t} = 1/√(2e)
            single_block = single_block.max((x - (2.0 * std::f64::consts::E).sqrt().recip()).abs());
        }
    }
    let inside = |r: (f64, f64), gold: (f64, f64)| r.0 >= gold.0 && r.1 <= gold.1;
    let pass = inside(r1, CALORIC_OVER_DYADIC) && inside(r2, CARLESON_OVER_TRIEBEL) && single_block <= 1e-9;
    report(
        "norm equivalence",
        pass,
        format!(
            "100 fields at 16^3: caloric/dyadic in [{:.4}, {:.4}] (golden {:?}), carleson/triebel in [{:.4}, {:.4}] (golden {:?}); single-shell caloric/dyadic off 1/sqrt(2e) by {single_block:.1e}",
            r1.0, r1.1, CALORIC_OVER_DYADIC, r2.0, r2.1, CARLESON_OVER_TRIEBEL
        ),
        start,
    );
}
