//! Majority-certificate decompositions over finite concept classes.
//!
//! The crate provides explicit-table Boolean and real-valued concept classes,
//! certificate construction by winnowing, zero-sum game solvers that produce
//! majority (and averaged) certificate decompositions with exhaustive
//! verification, and a small density-matrix simulator used to compile quantum
//! advice into classically checkable verification protocols.

pub mod concept;
pub mod error;
pub mod game;
pub mod generate;
pub mod io;
pub mod majcert;
pub mod quantum;
pub mod rng;
pub mod winnow;

pub use concept::{
    distance, distance_expected, distance_full, is_isolated, pointwise_average,
    pointwise_majority, restrict_class, xor_shift, BooleanFunction, Certificate, ConceptClass,
    Distribution, Input, InputDomain, Metric, PConceptClass, RealCertificate, RealFunction,
    Restriction,
};
pub use error::{Error, Result};
