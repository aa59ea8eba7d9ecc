//! Mild-solution machinery: the bilinear Duhamel term, Picard iteration,
//! exponential time differencing, energy bookkeeping, the Oseen kernel and
//! numerical probes of the bilinear estimates.

mod bilinear;
mod energy;
mod etd;
mod kernel;
mod nonlinear;
mod picard;
mod probe;
mod quadrature;

pub use bilinear::{bilinear_N, bilinear_N_all};
pub use nonlinear::Nonlinear;
pub use picard::{graded_times, picard_solve, resolution_time, PicardConfig, PicardIteration, PicardTrace, Verdict};
pub use etd::{etd_march, EtdOptions, EtdStats, Scheme};
pub use energy::{energy_ledger, EnergyLedger, EnergySample};
pub use kernel::{
    far_field_slope, kernel_bound_check, kernel_magnitude, kernel_sample, kernel_window, DEFAULT_SUP_RADIUS, oseen_kernel,
    periodic_radius, sample_from_magnitude, scaling_collapse, slope_from_magnitude, KernelReport, KernelSample, OseenKernel, SlopeFit, KERNEL_COMPONENTS,
};
pub use probe::{
    beta_term, lemma_probe, probe_corpus, probe_corpus_reports, CorpusConfig, ProbeLemma, ProbeOptions, ProbeReport,
};
