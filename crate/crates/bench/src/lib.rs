//! Fixed inputs shared by the benchmarks.

use majcert_core::generate::{point_functions, random_boolean, random_pconcept};
use majcert_core::quantum::{Circuit, DensityMatrix};
use majcert_core::{ConceptClass, InputDomain, PConceptClass};

pub const SEED: u64 = 0x5eed;

/// All point functions on `n` bits plus the zero function.
pub fn points(n: u32) -> ConceptClass {
    let d = InputDomain::new(n).expect("domain");
    point_functions(d, d.size(), SEED).expect("point functions")
}

pub fn boolean(n: u32, size: usize) -> ConceptClass {
    random_boolean(InputDomain::new(n).expect("domain"), size, SEED).expect("class")
}

pub fn pconcept(n: u32, size: usize, levels: u32) -> PConceptClass {
    random_pconcept(InputDomain::new(n).expect("domain"), size, Some(levels), SEED).expect("class")
}

/// A three-qubit circuit with input-controlled gates, and a mixed
/// three-qubit input state.
pub fn circuit() -> (Circuit, DensityMatrix) {
    let text = "qubits=3 accept=0\nH 0\nCNOT 1 0\nX 2 if x0\nH 1 if x1\nCNOT 0 2\nH 0 if x2\n";
    let q = Circuit::parse(text).expect("circuit");
    let mixed = DensityMatrix::from_bloch(0.3, -0.2, 0.5).expect("state");
    let zero = DensityMatrix::basis(1, 0).expect("state");
    let rho = DensityMatrix::tensor_all(&[mixed, zero.clone(), zero]).expect("state");
    (q, rho)
}
