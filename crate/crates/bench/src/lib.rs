//! Fixtures shared by the criterion benches.

use std::f64::consts::PI;

use mildns::datagen::random_divfree;
use mildns::{GridSpec, SpectralField};

/// Unit-energy random solenoidal field on an `n³` grid over `[0, 2π)³`.
pub fn fixture(n: usize, seed: u64) -> SpectralField {
    let g = GridSpec::new(n, 2.0 * PI).expect("valid grid");
    random_divfree(&g, [0, 2], seed).expect("non-empty band")
}
