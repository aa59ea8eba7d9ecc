use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::field::SpectralField;
use crate::norms::{
    caloric_besov, carleson_bmo, dyadic_besov, triebel_dyadic, TimeSampling,
};
use crate::ops;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub field_hash: String,
    pub caloric_besov: f64,
    pub dyadic_besov: f64,
    pub carleson_bmo: f64,
    /// `None` serializes as `null` and means an uncapped supremum.
    pub carleson_delta_cap: Option<f64>,
    pub triebel_dyadic: f64,
    pub l2: f64,
    pub hdot_alpha: Vec<(f64, f64)>,
    pub sampling: TimeSampling,
    pub stride: usize,
}

/// SHA-256 of the grid header and coefficient bytes, as lowercase hex.
pub fn field_hash(f: &SpectralField) -> String {
    let mut h = Sha256::new();
    h.update((f.grid().n_per_axis as u64).to_le_bytes());
    h.update(f.grid().box_length.to_le_bytes());
    for z in f.coeffs() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Every norm of `f` with one sampling, cap and stride.
pub fn norm_report(
    f: &SpectralField,
    delta_cap: Option<f64>,
    sampling: &TimeSampling,
    stride: usize,
    alphas: &[f64],
) -> Result<NormReport> {
    let mut hdot_alpha = Vec::with_capacity(alphas.len());
    for &a in alphas {
        hdot_alpha.push((a, ops::lambda_alpha(f, a)?.l2_norm()));
    }
    Ok(NormReport {
        field_hash: field_hash(f),
        caloric_besov: caloric_besov(f, sampling)?.value,
        dyadic_besov: dyadic_besov(f, -1.0, f64::INFINITY, f64::INFINITY)?.value,
        carleson_bmo: carleson_bmo(f, delta_cap, sampling, stride)?.value,
        carleson_delta_cap: delta_cap,
        triebel_dyadic: triebel_dyadic(f).value,
        l2: f.l2_norm(),
        hdot_alpha,
        sampling: *sampling,
        stride,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn zero_field_report() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let s = TimeSampling::default_for(&g);
        let r = norm_report(&SpectralField::zeros(g), None, &s, 2, &[0.5]).unwrap();
        assert_eq!(r.caloric_besov + r.dyadic_besov + r.carleson_bmo + r.triebel_dyadic + r.l2, 0.0);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert!(v["carleson_delta_cap"].is_null());
        assert_eq!(v["field_hash"].as_str().unwrap().len(), 64);
    }
}
