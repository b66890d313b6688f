//! Real-amplitude statevector engine.

mod kernels;
mod measure;
mod state;

pub use kernels::CACHE_BLOCK_BITS;
pub use measure::{estimate_from_counts, rotate_for_group, sample_counts, MeasurementBasis, ShotSampler, DEFAULT_SHOTS};
pub use state::{init_plus_state, RealStatevector, TwoQubitAxis, STATEVECTOR_CAP};
