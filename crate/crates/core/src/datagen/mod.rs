//! Initial data: the explicit large-BMO⁻¹, small-Besov example and random
//! divergence-free test fields.

mod cprime;
mod example;
mod random;
mod sparse;
mod verify;

pub use cprime::{cprime, cprime_argmax, DEFAULT_RESOLUTION};
pub use example::{build_example, transverse_symbol, uncorrected_energy, ExampleParams};
pub use random::random_divfree;
pub use sparse::{PacketModel, SparseCarleson};
pub use verify::{
    fit_exponent, least_squares_slope, sweep_energy, sweep_point, verify_example, Checks, ExampleReport,
    SweepPoint, VerifyOptions, DEFAULT_SWEEP,
};
