//! Exact small-scale density-matrix simulation and advice-verification
//! protocols built on real decompositions.

mod adversary;
mod amplify;
mod circuit;
mod density;
mod fat;
mod protocol;

pub use adversary::{adversary_search, AdversaryBudget, AdversaryReport, VIOLATION_THRESHOLD};
pub use amplify::{averaged_deviation, chernoff_floor, poisson_binomial, qma_plus_amplify, PlusTest};
pub use circuit::{Circuit, Gate, GateKind};
pub use density::{DensityMatrix, MAX_QUBITS, STATE_TOLERANCE};
pub use fat::{fat_dim_quantum_check, QuantumDimReport, MAX_CHECK_QUBITS};
pub use protocol::{
    compile_advice, conditional_soundness, decision_error, denominator_bits, induced_pconcept,
    machine_b, random_states, verifier_a, AdviceProtocol, Dyadic, InducedClass, ProtocolDoc,
    RegisterState, SoundnessReport, Verdict, ACCEPT_FACTOR, DECISION_BOUND, PREMISE_MARGIN,
};
