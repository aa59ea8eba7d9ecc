use std::f64::consts::PI;

use mildns::datagen::random_divfree;
use mildns::duhamel::graded_times;
use mildns::norms::{
    caloric_besov, carleson_bmo, delta_of, dyadic_besov, f_log, triebel_dyadic, tstar_of, xnorm, Constants,
    TimeSampling,
};
use mildns::{Error, GridSpec, SpectralField, Trajectory};
use proptest::prelude::*;

fn grid() -> GridSpec {
    GridSpec::new(16, 2.0 * PI).unwrap()
}

#[test]
fn f_log_endpoint_asymptotics_and_monotonicity() {
    assert_eq!(f_log(1.0).unwrap(), 0.0);
    for i in 1..=1000 {
        let x = 0.1 * i as f64 / 1000.0;
        let f = f_log(x).unwrap();
        assert!((f + x.ln() - 4f64.ln()).abs() <= x, "x = {x}");
    }
    let mut prev = f64::INFINITY;
    for i in 1..=10_000 {
        let x = i as f64 / 10_000.0;
        let f = f_log(x).unwrap();
        assert!(f < prev || (x == 1.0 && f == 0.0), "not decreasing at {x}");
        prev = f;
    }
}

#[test]
fn zero_field_norms_vanish() {
    let z = SpectralField::zeros(grid());
    let s = TimeSampling::default_for(&grid());
    assert_eq!(caloric_besov(&z, &s).unwrap().value, 0.0);
    assert_eq!(carleson_bmo(&z, None, &s, 2).unwrap().value, 0.0);
    assert_eq!(triebel_dyadic(&z).value, 0.0);
}

#[test]
fn carleson_monotone_in_cap() {
    let f = random_divfree(&grid(), [0, 2], 3).unwrap();
    let s = TimeSampling::default_for(&grid()).with_ppo(4);
    let mut prev = 0.0;
    for cap in [0.01, 0.1, 1.0] {
        let v = carleson_bmo(&f, Some(cap), &s, 2).unwrap().value;
        assert!(v >= prev);
        prev = v;
    }
    assert!(carleson_bmo(&f, None, &s, 2).unwrap().value >= prev);
}

#[test]
fn refining_time_sampling_never_lowers_suprema() {
    // doubling ppo keeps every old sample, so sampled suprema cannot drop
    let f = random_divfree(&grid(), [0, 2], 5).unwrap();
    let coarse = TimeSampling::default_for(&grid()).with_ppo(2);
    let fine = coarse.with_ppo(4);
    let a = caloric_besov(&f, &coarse).unwrap().value;
    let b = caloric_besov(&f, &fine).unwrap().value;
    assert!(b >= a * (1.0 - 1e-14));
}

#[test]
fn heat_flow_xnorm_and_coverage() {
    let a = random_divfree(&grid(), [0, 1], 2).unwrap().scaled(0.1);
    let k = Constants::default();
    let delta = delta_of(0.2, a.l2_sq(), k).unwrap();
    let t_star = tstar_of(&a, k.mu0);
    let times = graded_times(delta / 8.0, t_star, 4).unwrap();
    let u = Trajectory::heat_flow(&a, &times).unwrap();
    let r = xnorm(&u, delta, t_star, 2).unwrap();
    assert!(r.x_norm >= r.norm_0_tstar && r.x_norm >= r.bracket_delta);
    assert!(r.norm_0_delta <= r.norm_0_tstar && r.norm_delta_tstar <= r.norm_0_tstar);
    let short = Trajectory::heat_flow(&a, &times[..times.len() - 2]).unwrap();
    assert!(matches!(xnorm(&short, delta, t_star, 2), Err(Error::Coverage { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn norms_are_homogeneous(seed in 0u64..500, c in 0.1f64..10.0) {
        let f = random_divfree(&grid(), [0, 2], seed).unwrap();
        let g = f.scaled(c);
        let s = TimeSampling::default_for(&grid()).with_ppo(2);
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1e-300);
        let d = |f: &SpectralField| dyadic_besov(f, -1.0, f64::INFINITY, f64::INFINITY).unwrap().value;
        prop_assert!(rel(c * d(&f), d(&g)) <= 1e-12);
        prop_assert!(rel(c * caloric_besov(&f, &s).unwrap().value, caloric_besov(&g, &s).unwrap().value) <= 1e-12);
        prop_assert!(rel(c * triebel_dyadic(&f).value, triebel_dyadic(&g).value) <= 1e-12);
    }
}
