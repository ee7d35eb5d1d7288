//! Majority-certificate decompositions.
//!
//! Boolean targets are written as the pointwise majority of members, each
//! isolated by a small certificate; real targets as the average of members,
//! each pinned approximately on a small input set. Every decomposition is
//! sampled from an equilibrium strategy of the certificate game and then
//! verified exhaustively.

mod boolean;
mod json;
mod real;
mod strategy;

pub use boolean::{
    majority_certificates, majority_from_strategy, robust_majority_certificates, smallest_odd_at_least,
    untrusted_oracle_evaluate, MajorityDecomposition, OracleOutput, RobustDecomposition, ATTEMPTS_PER_SIZE,
};
pub use json::{CertificateDoc, DecompositionDoc, DecompositionKind, Table};
pub use real::{
    occam_check, occam_initial_m, occam_schedule, real_decomposition_bounds, real_majority_certificates,
    verify_real_decomposition, OccamReport, RealBounds, RealDecomposition,
};
pub use strategy::{
    double_oracle_bounded, double_oracle_solve, solve_game_full_lp, AliceStrategy, DEFAULT_TARGET, FULL_LP_BUDGET,
};
