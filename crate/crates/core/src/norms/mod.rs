//! Critical norms of fields and trajectories, and the scalar functions of the
//! smallness conditions.

mod besov;
mod carleson;
mod report;
mod sampling;
mod scalars;
mod triebel;
mod xnorm;

pub use besov::{caloric_besov, dyadic_besov, CaloricBesov, DyadicBesov, Exponent};
pub use carleson::{carleson_bmo, CarlesonBmo};
pub use report::{field_hash, norm_report, NormReport};
pub use sampling::{TimeSampling, S_EXTENSION_OCTAVES};
pub use scalars::{delta_of, delta_ratio, f_log, tstar_of, Constants};
pub use triebel::{triebel_dyadic, TriebelDyadic};
pub use xnorm::{xnorm, XNormAccumulator, XNormReport};
