use std::collections::{BTreeMap, BTreeSet, HashSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::concept::{BooleanFunction, Input, InputDomain, PConceptClass, RealFunction};
use crate::error::{invalid, Error, Result};
use crate::majcert::{real_majority_certificates, verify_real_decomposition, RealDecomposition};
use crate::rng::{indexed, stream};

use super::circuit::Circuit;
use super::density::{ensure_budget, DensityMatrix};

/// Largest allowed gap between the honest acceptance probabilities and the language.
pub const PREMISE_MARGIN: f64 = 0.2;
/// Decision error guaranteed for states accepted by the validating machine.
pub const DECISION_BOUND: f64 = 0.3;
/// Deviation multiple of `alpha` accepted by the validating machine.
pub const ACCEPT_FACTOR: f64 = 5.0;
const SLACK: f64 = 1e-12;

/// Finite class induced by a circuit on sampled advice states.
/// `states[i]` realizes `class.member(i)`.
#[derive(Clone, Debug)]
pub struct InducedClass {
    pub class: PConceptClass,
    pub states: Vec<DensityMatrix>,
}

/// Effective measurement operators of `q` on the advice wires, one per input.
pub(crate) fn povms(q: &Circuit, domain: InputDomain, advice_qubits: u32) -> Result<Vec<DMatrix<Complex64>>> {
    domain.inputs().map(|x| q.effective_povm(&domain.bits_of(x), advice_qubits)).collect()
}

fn induced_function(domain: InputDomain, effects: &[DMatrix<Complex64>], rho: &DensityMatrix) -> Result<RealFunction> {
    RealFunction::new(domain, effects.iter().map(|e| rho.expectation(e).clamp(0.0, 1.0)).collect())
}

/// `x -> Pr[q accepts x with advice rho]` for each state, dropping duplicate tables.
pub fn induced_pconcept(q: &Circuit, domain: InputDomain, states: &[DensityMatrix]) -> Result<InducedClass> {
    let first = states.first().ok_or_else(|| invalid("need at least one state"))?;
    let p = first.qubits();
    if states.iter().any(|s| s.qubits() != p) {
        return Err(invalid("advice states must share a qubit count"));
    }
    let effects = povms(q, domain, p)?;
    let mut seen = HashSet::new();
    let mut members = Vec::new();
    let mut kept = Vec::new();
    for rho in states {
        let f = induced_function(domain, &effects, rho)?;
        let key: Vec<u64> = f.values().iter().map(|v| v.to_bits()).collect();
        if seen.insert(key) {
            members.push(f);
            kept.push(rho.clone());
        }
    }
    Ok(InducedClass {
        class: PConceptClass::new(members)?,
        states: kept,
    })
}

/// Seeded mixed states from Gaussian purifications.
pub fn random_states(qubits: u32, count: usize, seed: u64) -> Result<Vec<DensityMatrix>> {
    (0..count)
        .map(|i| DensityMatrix::random(qubits, &mut indexed(seed, stream::STATES, i as u64)))
        .collect()
}

/// Rational `numerator / 2^bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dyadic {
    pub numerator: u64,
    pub bits: u32,
}

impl Dyadic {
    /// Nearest dyadic with ties rounded up.
    pub fn round(value: f64, bits: u32) -> Self {
        let scale = (1u64 << bits) as f64;
        Self {
            numerator: (value * scale + 0.5).floor().max(0.0) as u64,
            bits,
        }
    }

    pub fn value(self) -> f64 {
        self.numerator as f64 / (1u64 << self.bits) as f64
    }
}

/// Denominator exponent `ceil(log2(1/alpha)) + 1`.
pub fn denominator_bits(alpha: f64) -> u32 {
    (1.0 / alpha).log2().ceil().max(0.0) as u32 + 1
}

/// Classical advice (check points and expected probabilities) paired with
/// the honest quantum advice, one register per slot.
#[derive(Clone, Debug)]
pub struct AdviceProtocol {
    pub domain: InputDomain,
    pub advice_qubits: u32,
    pub points: Vec<BTreeSet<Input>>,
    pub targets: Vec<BTreeMap<Input, Dyadic>>,
    pub alpha: f64,
    pub honest: Vec<DensityMatrix>,
    pub language: BooleanFunction,
    pub decomposition: RealDecomposition,
    pub induced: InducedClass,
}

impl AdviceProtocol {
    pub fn registers(&self) -> usize {
        self.points.len()
    }

    pub fn honest_state(&self) -> RegisterState {
        RegisterState::Product(self.honest.clone())
    }

    /// Same advice with `alpha` scaled by `factor`; used to probe soundness.
    pub fn with_alpha_scaled(&self, factor: f64) -> Self {
        Self {
            alpha: self.alpha * factor,
            ..self.clone()
        }
    }
}

/// Compile the advice `rho_n` for `language` against the class induced by
/// `rho_n` together with `state_sample`.
pub fn compile_advice(
    q: &Circuit,
    rho_n: &DensityMatrix,
    language: &BooleanFunction,
    eps: f64,
    state_sample: &[DensityMatrix],
    seed: u64,
) -> Result<AdviceProtocol> {
    let domain = language.domain();
    let mut states = vec![rho_n.clone()];
    states.extend(state_sample.iter().cloned());
    let induced = induced_pconcept(q, domain, &states)?;
    let target = induced.class.member(0).clone();
    for x in domain.inputs() {
        let want = if language.get(x) { 1.0 } else { 0.0 };
        if (target.get(x) - want).abs() > PREMISE_MARGIN + SLACK {
            return Err(invalid(format!(
                "advice misses the language by {} at input {}",
                (target.get(x) - want).abs(),
                domain.spell(x)
            )));
        }
    }
    let decomposition = real_majority_certificates(&induced.class, &target, eps, seed)?;

    // Accepted registers sit within ACCEPT_FACTOR * alpha of r, and r within
    // alpha of the slot function; the decomposition must hold at that radius.
    let radius = ACCEPT_FACTOR + 1.0;
    let widened = RealDecomposition {
        alpha: decomposition.alpha * radius,
        ..decomposition.clone()
    };
    let alpha = if verify_real_decomposition(&induced.class, &widened) {
        decomposition.alpha
    } else {
        decomposition.alpha / radius
    };
    let bits = denominator_bits(alpha);

    let mut honest = Vec::with_capacity(decomposition.m);
    let mut targets = Vec::with_capacity(decomposition.m);
    for (f, xs) in decomposition.funcs.iter().zip(&decomposition.points) {
        let idx = induced.class.require_member(f)?;
        honest.push(induced.states[idx].clone());
        targets.push(xs.iter().map(|&z| (z, Dyadic::round(f.get(z), bits))).collect());
    }
    Ok(AdviceProtocol {
        domain,
        advice_qubits: rho_n.qubits(),
        points: decomposition.points.clone(),
        targets,
        alpha,
        honest,
        language: language.clone(),
        decomposition,
        induced,
    })
}

/// Advice over `m` registers: either one joint state or independent registers.
#[derive(Clone, Debug)]
pub enum RegisterState {
    Joint { state: DensityMatrix, registers: usize },
    Product(Vec<DensityMatrix>),
}

impl RegisterState {
    pub fn joint(state: DensityMatrix, registers: usize) -> Result<Self> {
        if registers == 0 || state.qubits() as usize % registers != 0 {
            return Err(invalid(format!(
                "{} qubits do not split into {registers} registers",
                state.qubits()
            )));
        }
        Ok(Self::Joint { state, registers })
    }

    pub fn registers(&self) -> usize {
        match self {
            Self::Joint { registers, .. } => *registers,
            Self::Product(v) => v.len(),
        }
    }

    pub fn register_qubits(&self) -> u32 {
        match self {
            Self::Joint { state, registers } => state.qubits() / *registers as u32,
            Self::Product(v) => v.first().map_or(0, DensityMatrix::qubits),
        }
    }

    /// Reduced state of register `i`.
    pub fn reduced(&self, i: usize) -> Result<DensityMatrix> {
        if i >= self.registers() {
            return Err(invalid(format!("register {i} out of range")));
        }
        match self {
            Self::Joint { state, .. } => {
                let p = self.register_qubits();
                state.partial_trace(i as u32 * p, p)
            }
            Self::Product(v) => Ok(v[i].clone()),
        }
    }

    pub fn reduced_all(&self) -> Result<Vec<DensityMatrix>> {
        (0..self.registers()).map(|i| self.reduced(i)).collect()
    }

    /// Full state, tensoring product registers when within the qubit budget.
    pub fn to_joint(&self) -> Result<DensityMatrix> {
        match self {
            Self::Joint { state, .. } => Ok(state.clone()),
            Self::Product(v) => {
                ensure_budget(v.iter().map(DensityMatrix::qubits).sum())?;
                DensityMatrix::tensor_all(v)
            }
        }
    }
}

/// Result of the validating machine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict {
    pub deviation: f64,
    pub accepted: bool,
}

fn check_shape(p: &AdviceProtocol, sigma: &RegisterState) -> Result<()> {
    if sigma.registers() != p.registers() || sigma.register_qubits() != p.advice_qubits {
        return Err(invalid(format!(
            "expected {} registers of {} qubits, got {} of {}",
            p.registers(),
            p.advice_qubits,
            sigma.registers(),
            sigma.register_qubits()
        )));
    }
    if let RegisterState::Product(v) = sigma {
        if v.iter().any(|s| s.qubits() != p.advice_qubits) {
            return Err(invalid("registers differ in size"));
        }
    }
    Ok(())
}

pub(crate) fn deviation_of(p: &AdviceProtocol, effects: &[DMatrix<Complex64>], regs: &[DensityMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for (rho, targets) in regs.iter().zip(&p.targets) {
        for (&z, r) in targets {
            worst = worst.max((rho.expectation(&effects[z]) - r.value()).abs());
        }
    }
    worst
}

pub(crate) fn average_of(effect: &DMatrix<Complex64>, regs: &[DensityMatrix]) -> f64 {
    regs.iter().map(|rho| rho.expectation(effect)).sum::<f64>() / regs.len() as f64
}

/// Worst `|Pr[q(z, sigma_i) accepts] - r_{i,z}|` over all slots and check points.
pub fn verifier_a(p: &AdviceProtocol, q: &Circuit, sigma: &RegisterState) -> Result<Verdict> {
    check_shape(p, sigma)?;
    let effects = povms(q, p.domain, p.advice_qubits)?;
    let deviation = deviation_of(p, &effects, &sigma.reduced_all()?);
    Ok(Verdict {
        deviation,
        accepted: deviation <= ACCEPT_FACTOR * p.alpha + SLACK,
    })
}

/// Acceptance probability of running `q` on `x` with a uniformly random register.
pub fn machine_b(p: &AdviceProtocol, q: &Circuit, sigma: &RegisterState, x: Input) -> Result<f64> {
    check_shape(p, sigma)?;
    p.domain.ensure_contains(x)?;
    let effect = q.effective_povm(&p.domain.bits_of(x), p.advice_qubits)?;
    Ok(average_of(&effect, &sigma.reduced_all()?))
}

/// `max_x |machine_b(x) - L(x)|`.
pub fn decision_error(p: &AdviceProtocol, q: &Circuit, sigma: &RegisterState) -> Result<f64> {
    check_shape(p, sigma)?;
    let effects = povms(q, p.domain, p.advice_qubits)?;
    Ok(decision_error_of(p, &effects, &sigma.reduced_all()?))
}

pub(crate) fn decision_error_of(p: &AdviceProtocol, effects: &[DMatrix<Complex64>], regs: &[DensityMatrix]) -> f64 {
    p.domain
        .inputs()
        .map(|x| {
            let want = if p.language.get(x) { 1.0 } else { 0.0 };
            (average_of(&effects[x], regs) - want).abs()
        })
        .fold(0.0, f64::max)
}

/// Exact worst decision error over register assignments drawn from the compiled class.
#[derive(Clone, Debug, PartialEq)]
pub struct SoundnessReport {
    /// Members of the compiled class accepted in each slot.
    pub admissible: Vec<usize>,
    pub worst_error: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Every assignment of compiled-class members to registers that the
/// validating machine accepts has decision error at most [`DECISION_BOUND`].
pub fn conditional_soundness(p: &AdviceProtocol) -> Result<SoundnessReport> {
    let class = &p.induced.class;
    let size = p.domain.size();
    let limit = ACCEPT_FACTOR * p.alpha + SLACK;
    let mut hi = vec![0.0; size];
    let mut lo = vec![0.0; size];
    let mut admissible = Vec::with_capacity(p.registers());
    for (slot, targets) in p.targets.iter().enumerate() {
        let ok: Vec<&RealFunction> = class
            .members()
            .iter()
            .filter(|g| targets.iter().all(|(&z, r)| (g.get(z) - r.value()).abs() <= limit))
            .collect();
        if ok.is_empty() {
            return Err(Error::PostconditionViolated {
                operation: "conditional_soundness",
                detail: format!("slot {slot} admits no member, not even the honest one"),
            });
        }
        admissible.push(ok.len());
        for x in 0..size {
            hi[x] += ok.iter().map(|g| g.get(x)).fold(f64::NEG_INFINITY, f64::max);
            lo[x] += ok.iter().map(|g| g.get(x)).fold(f64::INFINITY, f64::min);
        }
    }
    let m = p.registers() as f64;
    let worst_error = (0..size)
        .map(|x| {
            let want = if p.language.get(x) { 1.0 } else { 0.0 };
            (hi[x] / m - want).abs().max((lo[x] / m - want).abs())
        })
        .fold(0.0, f64::max);
    Ok(SoundnessReport {
        admissible,
        worst_error,
        bound: DECISION_BOUND,
        holds: worst_error <= DECISION_BOUND + SLACK,
    })
}

/// Serializable form of a compiled protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolDoc {
    pub n: u32,
    pub advice_qubits: u32,
    pub alpha: f64,
    pub denominator_bits: u32,
    pub language: String,
    pub points: Vec<Vec<Input>>,
    pub numerators: Vec<Vec<u64>>,
    /// Row-major `[re, im]` entries of each honest register.
    pub honest: Vec<Vec<[f64; 2]>>,
}

impl AdviceProtocol {
    pub fn to_doc(&self) -> ProtocolDoc {
        ProtocolDoc {
            n: self.domain.bits(),
            advice_qubits: self.advice_qubits,
            alpha: self.alpha,
            denominator_bits: denominator_bits(self.alpha),
            language: self.language.to_hex(),
            points: self.points.iter().map(|xs| xs.iter().copied().collect()).collect(),
            numerators: self
                .targets
                .iter()
                .map(|t| t.values().map(|r| r.numerator).collect())
                .collect(),
            honest: self.honest.iter().map(DensityMatrix::to_pairs).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn demo_circuit() -> Circuit {
        Circuit::parse("qubits=1 accept=0\nX 0 if x1\nH 0 if x0\n").unwrap()
    }

    fn demo() -> (Circuit, DensityMatrix, BooleanFunction) {
        let d = InputDomain::new(2).unwrap();
        let rho = DensityMatrix::from_bloch(-0.62, 0.0, -0.62).unwrap();
        let lang = BooleanFunction::from_bits(d, &[true, false, true, true]).unwrap();
        (demo_circuit(), rho, lang)
    }

    #[test]
    fn induced_constants() {
        let d = InputDomain::new(1).unwrap();
        let q = Circuit::readout(1, 0).unwrap();
        let mixed = induced_pconcept(&q, d, &[DensityMatrix::maximally_mixed(1).unwrap()]).unwrap();
        assert_eq!(mixed.class.member(0).values(), &[0.5, 0.5]);
        let basis = [0, 1, 0].map(|i| DensityMatrix::basis(1, i).unwrap());
        let c = induced_pconcept(&q, d, &basis).unwrap();
        assert_eq!(c.class.len(), 2);
        assert_eq!(c.class.member(1).values(), &[1.0, 1.0]);
    }

    #[test]
    fn induced_matches_direct_probability() {
        let d = InputDomain::new(2).unwrap();
        let q = demo_circuit();
        let states = random_states(1, 200, 3).unwrap();
        let c = induced_pconcept(&q, d, &states).unwrap();
        for (f, rho) in c.class.members().iter().zip(&c.states) {
            for x in d.inputs() {
                let p = q.accept_probability(&d.bits_of(x), rho).unwrap();
                assert!((f.get(x) - p).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dyadic_rounding() {
        assert_eq!(denominator_bits(0.25), 3);
        assert_eq!(denominator_bits(0.3), 3);
        assert_eq!(Dyadic::round(0.0625, 3).numerator, 1);
        assert_eq!(Dyadic::round(0.5, 3).value(), 0.5);
        for k in 0..=100 {
            let v = k as f64 / 100.0;
            assert!((Dyadic::round(v, 5).value() - v).abs() <= 1.0 / 64.0 + 1e-15);
        }
    }

    #[test]
    fn premise_enforced() {
        let (q, _, lang) = demo();
        let bad = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(compile_advice(&q, &bad, &lang, 0.1, &[], 1).is_err());
    }

    #[test]
    fn trivial_language_degenerates() {
        let d = InputDomain::new(2).unwrap();
        let q = Circuit::readout(2, 1).unwrap();
        let rho = DensityMatrix::random(1, &mut substream(1, 1)).unwrap();
        let p = compile_advice(&q, &rho, &BooleanFunction::zeros(d), 0.1, &[], 4).unwrap();
        assert_eq!(p.registers(), 1);
        let v = verifier_a(&p, &q, &p.honest_state()).unwrap();
        assert!(v.accepted && v.deviation <= p.alpha);
        assert!(decision_error(&p, &q, &p.honest_state()).unwrap() <= 1e-12);
    }

    #[test]
    fn honest_protocol_is_complete_and_sound() {
        let (q, rho, lang) = demo();
        let sample = random_states(1, 30, 9).unwrap();
        let p = compile_advice(&q, &rho, &lang, 0.1, &sample, 2).unwrap();
        let honest = p.honest_state();
        let v = verifier_a(&p, &q, &honest).unwrap();
        assert!(v.deviation <= p.alpha, "{} > {}", v.deviation, p.alpha);
        assert!(decision_error(&p, &q, &honest).unwrap() <= DECISION_BOUND);
        for (i, t) in p.targets.iter().enumerate() {
            for (&z, r) in t {
                assert!((r.value() - p.decomposition.funcs[i].get(z)).abs() <= p.alpha);
            }
        }
        assert!(conditional_soundness(&p).unwrap().holds);
    }

    #[test]
    fn mixed_registers_evaluated_exactly() {
        let (q, rho, lang) = demo();
        let p = compile_advice(&q, &rho, &lang, 0.1, &[], 2).unwrap();
        let mixed = RegisterState::Product(vec![DensityMatrix::maximally_mixed(1).unwrap(); p.registers()]);
        let v = verifier_a(&p, &q, &mixed).unwrap();
        let worst = p.targets.iter().flat_map(|t| t.values()).map(|r| (0.5 - r.value()).abs()).fold(0.0, f64::max);
        assert!((v.deviation - worst).abs() < 1e-12);
        assert!(!v.accepted);
    }

    fn two_register_protocol(p: &AdviceProtocol) -> AdviceProtocol {
        let mut two = p.clone();
        two.points = vec![p.points[0].clone(); 2];
        two.targets = vec![p.targets[0].clone(); 2];
        two.honest = vec![p.honest[0].clone(); 2];
        two
    }

    #[test]
    fn entangled_registers_only_matter_through_marginals() {
        let (q, rho, lang) = demo();
        let p = two_register_protocol(&compile_advice(&q, &rho, &lang, 0.1, &[], 2).unwrap());
        let mut rng = substream(8, 8);
        for _ in 0..10 {
            let joint = DensityMatrix::random(2, &mut rng).unwrap();
            let sigma = RegisterState::joint(joint.clone(), 2).unwrap();
            let product = RegisterState::Product(vec![
                joint.partial_trace(0, 1).unwrap(),
                joint.partial_trace(1, 1).unwrap(),
            ]);
            let a = verifier_a(&p, &q, &sigma).unwrap();
            let b = verifier_a(&p, &q, &product).unwrap();
            assert!((a.deviation - b.deviation).abs() < 1e-12);
            for x in p.domain.inputs() {
                let mb = machine_b(&p, &q, &sigma, x).unwrap();
                let oracle = (q.accept_probability(&p.domain.bits_of(x), &product.reduced(0).unwrap()).unwrap()
                    + q.accept_probability(&p.domain.bits_of(x), &product.reduced(1).unwrap()).unwrap())
                    / 2.0;
                assert!((mb - oracle).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identical_registers_match_single_register() {
        let (q, rho, lang) = demo();
        let p = two_register_protocol(&compile_advice(&q, &rho, &lang, 0.1, &[], 2).unwrap());
        let s = DensityMatrix::random(1, &mut substream(2, 2)).unwrap();
        let sigma = RegisterState::Product(vec![s.clone(), s.clone()]);
        for x in p.domain.inputs() {
            let single = q.accept_probability(&p.domain.bits_of(x), &s).unwrap();
            assert!((machine_b(&p, &q, &sigma, x).unwrap() - single).abs() < 1e-12);
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let (q, rho, lang) = demo();
        let p = compile_advice(&q, &rho, &lang, 0.1, &[], 2).unwrap();
        let wrong = RegisterState::Product(vec![DensityMatrix::maximally_mixed(2).unwrap(); p.registers()]);
        assert!(verifier_a(&p, &q, &wrong).is_err());
        assert!(RegisterState::joint(DensityMatrix::maximally_mixed(3).unwrap(), 2).is_err());
    }

    #[test]
    fn doc_serializes() {
        let (q, rho, lang) = demo();
        let p = compile_advice(&q, &rho, &lang, 0.1, &[], 2).unwrap();
        let doc = p.to_doc();
        let text = serde_json::to_string(&doc).unwrap();
        let back: ProtocolDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        let h = DensityMatrix::from_pairs(1, &back.honest[0]).unwrap();
        assert!((h.matrix() - p.honest[0].matrix()).norm() < 1e-15);
    }
}
