//! Pseudo-spectral toolkit for critical norms and mild solutions of the
//! incompressible Navier–Stokes equations on a periodic box.
//!
//! * [`field`], [`ops`], [`lp`]: spectral fields and Fourier multipliers.
//! * [`norms`]: Besov, Carleson (BMO⁻¹), Triebel–Lizorkin and trajectory norms.
//! * [`datagen`]: large-BMO⁻¹ / small-Besov initial data and random test data.
//! * [`duhamel`]: bilinear Duhamel operator, Picard and ETD solvers, energy
//!   ledger, Oseen kernel and estimate probes.

pub mod cnsf;
pub mod datagen;
pub mod duhamel;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod lp;
pub mod norms;
pub mod ops;
pub mod trajectory;
mod workspace;

pub use error::{Error, Result};
pub use field::{PhysicalField, SpectralField};
pub use grid::GridSpec;
pub use lp::LPBasis;
pub use ops::Side;
pub use trajectory::{Provenance, Trajectory};
