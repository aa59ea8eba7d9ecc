use super::nonlinear::Nonlinear;
use super::quadrature::{stencil, DuhamelIntegral};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::trajectory::Trajectory;

/// `N(u, v)(t) = ∫₀ᵗ e^{(t−s)Δ} ℙ∇·(u ⊗ v)(s) ds` from the samples of two
/// trajectories on the same time grid.
///
/// `B(s)` is interpolated quadratically through neighbouring samples and the
/// heat factor is integrated exactly, mode by mode.
#[allow(non_snake_case)]
pub fn bilinear_N(u: &Trajectory, v: &Trajectory, t: f64, dealias: bool) -> Result<SpectralField> {
    check_pair(u, v)?;
    let times = u.times();
    let last = *times.last().unwrap();
    if !(t >= 0.0 && t <= last) {
        return Err(Error::Coverage { from: last.min(t), to: t });
    }
    let mut nl = Nonlinear::new(*u.grid(), dealias);
    let mut acc = DuhamelIntegral::new(*u.grid());
    if t == 0.0 {
        return Ok(acc.value);
    }
    let b: Vec<SpectralField> = (0..times.len())
        .map(|i| nl.apply(&u.fields()[i], &v.fields()[i]))
        .collect::<Result<_>>()?;
    for k in 0..times.len() - 1 {
        let t0 = times[k];
        if t0 >= t {
            break;
        }
        let h = (times[k + 1] - t0).min(t - t0);
        let st = stencil(k, times.len());
        acc.advance(t0, h, st.map(|i| times[i]), st.map(|i| &b[i]));
    }
    acc.value.set_solenoidal(true);
    Ok(acc.value)
}

/// `N(u, v)` at every sample time of `u`, computed in one sweep.
#[allow(non_snake_case)]
pub fn bilinear_N_all(u: &Trajectory, v: &Trajectory, dealias: bool) -> Result<Vec<SpectralField>> {
    check_pair(u, v)?;
    let times = u.times();
    let mut nl = Nonlinear::new(*u.grid(), dealias);
    let mut acc = DuhamelIntegral::new(*u.grid());
    let mut out = vec![acc.value.clone()];
    let b: Vec<SpectralField> = (0..times.len())
        .map(|i| nl.apply(&u.fields()[i], &v.fields()[i]))
        .collect::<Result<_>>()?;
    for k in 0..times.len() - 1 {
        let st = stencil(k, times.len());
        acc.advance(times[k], times[k + 1] - times[k], st.map(|i| times[i]), st.map(|i| &b[i]));
        let mut f = acc.value.clone();
        f.set_solenoidal(true);
        out.push(f);
    }
    Ok(out)
}

fn check_pair(u: &Trajectory, v: &Trajectory) -> Result<()> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    if u.times() != v.times() {
        return Err(Error::InvalidParams("trajectories must share their time samples".into()));
    }
    Ok(())
}
