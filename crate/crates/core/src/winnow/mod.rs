//! Certificate construction: isolation by binary search, weak certification,
//! covers, dimension computations, and the safe / L1 winnowing procedures.

mod cover;
mod dims;
mod isolate;
mod l1;
mod l2;
mod safe;
mod trace;

pub use cover::{epsilon_cover, is_valid_cover, CoverResult};
pub use dims::{fat_shattering_dim, vc_dim, Dimension, DIMENSION_CAP};
pub use isolate::{
    binary_search_winnow, min_isolating_certificate, weak_certify, weak_certify_bound,
    WeakCertifyResult, HEAVY_THRESHOLD,
};
pub use l1::{l1_max_epsilon, l1_winnow, L1WinnowResult};
pub use l2::{l2_corrupt, l2_counterexample, l2_family, l2_sample, L2Corruption, L2Member};
pub use safe::{safe_winnow, SafeWinnowResult};
pub use trace::{TraceAction, TraceStep};
