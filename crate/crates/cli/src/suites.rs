use std::collections::BTreeSet;

use anyhow::{bail, ensure, Result};
use majcert_core::concept::Distribution;
use majcert_core::majcert::{
    double_oracle_bounded, majority_certificates, occam_schedule, real_decomposition_bounds,
    real_majority_certificates, robust_majority_certificates, solve_game_full_lp, verify_real_decomposition,
};
use majcert_core::quantum::{
    adversary_search, compile_advice, conditional_soundness, decision_error, random_states, verifier_a,
    AdversaryBudget, Circuit, DensityMatrix, DECISION_BOUND,
};
use majcert_core::rng::substream;
use majcert_core::winnow::{
    epsilon_cover, fat_shattering_dim, l1_winnow, l2_corrupt, l2_family, l2_sample, safe_winnow, vc_dim,
    weak_certify_bound,
};
use majcert_core::{BooleanFunction, InputDomain, PConceptClass, RealFunction};
use rand::seq::index::sample;
use rand::Rng;
use sha2::{Digest, Sha256};

use crate::classes::{generate_class, GeneratedClass};
use crate::config::{
    DimsParams, EquivalenceParams, L1Params, L2Params, MajcertParams, OccamParams, QuantumParams, RealParams,
    SuiteParams, WinnowParams,
};
use crate::report::Record;

/// Largest gap allowed between the two game solvers.
pub const GAME_VALUE_TOL: f64 = 1e-6;
const TOL: f64 = 1e-12;

/// Seed of instance `index`, derived from the run seed.
pub fn instance_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Run instance `index` of a suite. Failures are recorded, never raised.
pub fn run_instance(params: &SuiteParams, index: usize, seed: u64) -> Record {
    let mut rec = Record::new(index, seed);
    let result = match params {
        SuiteParams::Majcert(p) => majcert(p, seed, &mut rec),
        SuiteParams::Realmajcert(p) => realmajcert(p, seed, &mut rec),
        SuiteParams::Winnow(p) => winnow(p, seed, &mut rec),
        SuiteParams::L1winnow(p) => l1(p, seed, &mut rec),
        SuiteParams::L2counter(p) => l2(p, seed, &mut rec),
        SuiteParams::Dims(p) => dims(p, seed, &mut rec),
        SuiteParams::Occam(p) => occam(p, seed, &mut rec),
        SuiteParams::QuantumProtocol(p) => quantum(p, seed, &mut rec),
        SuiteParams::Equivalence(p) => equivalence(p, seed, &mut rec),
    };
    match result {
        Ok(verified) => rec.verified = verified,
        Err(e) => {
            rec.verified = false;
            rec.error = Some(format!("{e:#}"));
        }
    }
    rec
}

fn class_for(spec: &crate::classes::ClassSpec, seed: u64, rec: &mut Record) -> Result<GeneratedClass> {
    let class = generate_class(spec, seed)?;
    rec.inputs_digest = class.digest();
    rec.int("class_size", class.len());
    Ok(class)
}

fn majcert(p: &MajcertParams, seed: u64, rec: &mut Record) -> Result<bool> {
    let class = class_for(&p.class, seed, rec)?;
    let s = class.boolean()?;
    let target = s.member(p.target % s.len()).clone();
    let size_bound = weak_certify_bound(s.len());
    rec.int("certificate_bound", size_bound);
    if p.robust {
        let d = robust_majority_certificates(s, &target, seed)?;
        rec.int("m", d.m).int("upper", d.upper).int("lower", d.lower);
        rec.int("max_certificate_size", d.max_certificate_size());
        rec.int("attempts", d.attempts as usize);
        rec.decomposition = Some(d.to_doc(s));
        Ok(d.verify(s) && d.max_certificate_size() <= size_bound)
    } else {
        let d = majority_certificates(s, &target, seed)?;
        rec.int("m", d.m).int("max_certificate_size", d.max_certificate_size());
        rec.int("strategy_support", d.strategy_support).num("strategy_value", d.strategy_value);
        rec.int("attempts", d.attempts as usize);
        rec.decomposition = Some(d.to_doc(s));
        Ok(d.verify(s) && d.max_certificate_size() <= size_bound)
    }
}

fn realmajcert(p: &RealParams, seed: u64, rec: &mut Record) -> Result<bool> {
    let s = class_for(&p.class, seed, rec)?.to_real();
    let target = s.member(p.target % s.len()).clone();
    let d = real_majority_certificates(&s, &target, p.eps, seed)?;
    let worst = real_decomposition_bounds(&s, &d).map_or(f64::INFINITY, |b| b.worst);
    rec.int("m", d.m).num("alpha", d.alpha).num("t", d.t).num("eps", d.eps);
    rec.int("max_points", d.max_points()).int("strategy_support", d.strategy_support);
    rec.num("game_penalty", d.game_penalty).num("worst_deviation", worst);
    rec.decomposition = Some(d.to_doc(&s));
    Ok(verify_real_decomposition(&s, &d))
}

fn sup_on(f: &RealFunction, g: &RealFunction, xs: impl IntoIterator<Item = usize>) -> f64 {
    xs.into_iter().map(|x| (f.get(x) - g.get(x)).abs()).fold(0.0, f64::max)
}

fn winnow(p: &WinnowParams, seed: u64, rec: &mut Record) -> Result<bool> {
    let s = class_for(&p.class, seed, rec)?.to_real();
    let domain = s.domain();
    ensure!(p.pinned <= domain.size(), "pinned set larger than the domain");
    let y: BTreeSet<usize> = sample(&mut substream(seed, 1), domain.size(), p.pinned).into_iter().collect();
    let cover = epsilon_cover(&s, p.eps)?;
    let f_star = s.member(0);
    let r = safe_winnow(&s, f_star, &y, p.eps, &cover)?;
    let log_cover = (cover.cover.len() as f64).log2();
    let pinned: Vec<usize> = y.iter().chain(&r.z).copied().collect();
    let first = s
        .members()
        .iter()
        .filter(|g| sup_on(&r.f, g, pinned.iter().copied()) <= r.delta)
        .all(|g| sup_on(&r.f, g, domain.inputs()) <= 3.0 * p.eps + TOL);
    let second = sup_on(&r.f, f_star, y.iter().copied()) <= p.eps / 5.0 + TOL;
    rec.int("z", r.z.len()).int("cover", cover.cover.len()).num("log2_cover", log_cover);
    rec.num("delta", r.delta).flag("pinned_closeness", first).flag("drift_on_y", second);
    rec.lines("trace", &r.trace);
    Ok(first && second && r.z.len() as f64 <= log_cover + 1e-9)
}

fn l1(p: &L1Params, seed: u64, rec: &mut Record) -> Result<bool> {
    let s = class_for(&p.class, seed, rec)?.to_real();
    let cover = epsilon_cover(&s, p.eps)?;
    let r = l1_winnow(&s, p.eps, &cover)?;
    let ratios = r.ratios();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let x_bound = 40.0 / p.eps * (cover.cover.len() as f64).ln();
    let post = s.members().iter().all(|g| {
        let l1: f64 = r.x.iter().map(|&x| (r.f.get(x) - g.get(x)).abs()).sum();
        l1 > 0.4 * p.eps || sup_on(&r.f, g, s.domain().inputs()) <= 2.0 * p.eps + TOL
    });
    rec.int("x", r.x.len()).num("x_bound", x_bound).int("steps", ratios.len());
    rec.num("max_ratio", max_ratio).num("ratio_limit", 1.0 - p.eps / 20.0);
    rec.lines("trace", &r.trace);
    Ok(post && ratios.iter().all(|&q| q < 1.0 - p.eps / 20.0) && r.x.len() as f64 <= x_bound + TOL)
}

fn l2(p: &L2Params, seed: u64, rec: &mut Record) -> Result<bool> {
    let n = p.n;
    let mut rng = substream(seed, 1);
    let f = if n <= 3 {
        let family = l2_family(n)?;
        family[rng.random_range(0..family.len())].clone()
    } else {
        l2_sample(n, 1, seed)?.remove(0)
    };
    let size = 1usize << n;
    let zeros: Vec<usize> = (0..size).filter(|&x| f.coefficients()[x] == 0).collect();
    ensure!(!zeros.is_empty(), "member has no zero input");
    let free = zeros[rng.random_range(0..zeros.len())];
    let x: BTreeSet<usize> = (0..size).filter(|&z| z != free && rng.random_bool(0.5)).collect();
    rec.inputs_digest = hex::encode(Sha256::digest(format!("l2 {n} {:?} {:?}", f.coefficients(), x)));
    let c = l2_corrupt(&f, &x)?;
    let bound = 1.0 / (n as f64).sqrt();
    let threshold = size as i64 - (n * n) as i64;
    rec.int("x", x.len()).num("delta_inf", c.delta_inf()).num("delta2_on_x", c.delta2_on_x());
    rec.num("bound", bound).flag("below_threshold", (x.len() as i64) < threshold);
    Ok(c.delta_inf() == 1.0 && c.delta2_on_x() <= bound + TOL)
}

fn dims(p: &DimsParams, seed: u64, rec: &mut Record) -> Result<bool> {
    let class = class_for(&p.class, seed, rec)?;
    let s = class.to_real();
    let mut gammas = p.gammas.clone();
    gammas.sort_by(f64::total_cmp);
    let mut fats = Vec::new();
    let mut exact = true;
    for &g in &gammas {
        let d = fat_shattering_dim(&s, g)?;
        exact &= d.is_exact();
        fats.push(d.value() as f64);
    }
    rec.nums("gammas", &gammas).nums("fat", &fats).flag("exact", exact);
    let antitone = fats.windows(2).all(|w| w[0] >= w[1]);
    let mut ok = antitone && exact;
    if let GeneratedClass::Boolean(b) = &class {
        let vc = vc_dim(b)?;
        rec.int("vc", vc.value());
        ok &= vc.value() as f64 <= (b.len() as f64).log2() + TOL;
        ok &= gammas
            .iter()
            .zip(&fats)
            .filter(|(&g, _)| g <= 0.5)
            .all(|(_, &f)| f as usize == vc.value());
    }
    Ok(ok)
}

fn occam(p: &OccamParams, seed: u64, rec: &mut Record) -> Result<bool> {
    let s = class_for(&p.class, seed, rec)?.to_real();
    let mut rng = substream(seed, 2);
    let weights: Vec<f64> = s.domain().inputs().map(|_| rng.random::<f64>() + 0.05).collect();
    let d = Distribution::normalized(s.domain(), weights)?;
    let r = occam_schedule(&s, s.member(0), &d, p.eps, p.trials, seed)?;
    rec.int("m", r.m).int("trials", r.trials).int("passes", r.passes).num("pass_rate", r.pass_rate());
    Ok(r.pass_rate() >= 0.5)
}

fn quantum_setup(p: &QuantumParams) -> Result<(Circuit, DensityMatrix, BooleanFunction)> {
    let q = Circuit::parse(&p.circuit)?;
    let [x, y, z] = p.advice;
    let rho = DensityMatrix::from_bloch(x, y, z)?;
    let len = p.language.len();
    if !len.is_power_of_two() || len < 2 {
        bail!("language table length {len} is not 2^n");
    }
    let domain = InputDomain::new(len.trailing_zeros())?;
    let bits: Vec<bool> = p.language.iter().map(|&b| b == 1).collect();
    Ok((q, rho, BooleanFunction::from_bits(domain, &bits)?))
}

/// The honest advice followed by the sampled states, as compiled.
pub fn quantum_class(p: &QuantumParams, seed: u64) -> Result<PConceptClass> {
    let (q, rho, language) = quantum_setup(p)?;
    let mut states = vec![rho];
    states.extend(random_states(1, p.sample_states, seed)?);
    Ok(majcert_core::quantum::induced_pconcept(&q, language.domain(), &states)?.class)
}

fn quantum(p: &QuantumParams, seed: u64, rec: &mut Record) -> Result<bool> {
    let (q, rho, language) = quantum_setup(p)?;
    let sample = random_states(1, p.sample_states, seed)?;
    let protocol = compile_advice(&q, &rho, &language, p.eps, &sample, seed)?;
    let class = quantum_class(p, seed)?;
    rec.inputs_digest = GeneratedClass::Real(class).digest();
    let honest = protocol.honest_state();
    let v = verifier_a(&protocol, &q, &honest)?;
    let err = decision_error(&protocol, &q, &honest)?;
    let sound = conditional_soundness(&protocol)?;
    let budget = AdversaryBudget {
        restarts: p.restarts,
        steps: p.steps,
        ..AdversaryBudget::default()
    };
    let probe = adversary_search(&protocol, &q, &budget, seed)?;
    rec.int("m", protocol.registers()).num("alpha", protocol.alpha);
    rec.int("class_size", protocol.induced.class.len());
    rec.num("honest_deviation", v.deviation).num("honest_decision_error", err);
    rec.num("compiled_class_worst_error", sound.worst_error);
    rec.num("search_decision_error", probe.decision_error).flag("search_violation", probe.violation);
    if let Some(factor) = p.broken_alpha_factor {
        let broken = adversary_search(&protocol.with_alpha_scaled(factor), &q, &budget, seed)?;
        rec.num("broken_decision_error", broken.decision_error);
        rec.flag("broken_violation", broken.violation);
    }
    rec.decomposition = Some(protocol.decomposition.to_doc(&protocol.induced.class));
    rec.protocol = Some(protocol.to_doc());
    Ok(v.deviation <= protocol.alpha && err <= DECISION_BOUND && sound.holds && !probe.violation)
}

fn equivalence(p: &EquivalenceParams, seed: u64, rec: &mut Record) -> Result<bool> {
    let class = class_for(&p.class, seed, rec)?;
    let s = class.boolean()?;
    let target = s.member(0).clone();
    let lp = solve_game_full_lp(s, &target, p.k)?;
    let oracle = double_oracle_bounded(s, &target, p.k)?;
    let gap = (lp.game_value - oracle.game_value).abs();
    rec.num("lp_value", lp.game_value).num("double_oracle_value", oracle.game_value).num("gap", gap);
    Ok(gap <= GAME_VALUE_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_seeds_differ() {
        let seeds: BTreeSet<u64> = (0..100).map(|i| instance_seed(7, i)).collect();
        assert_eq!(seeds.len(), 100);
        assert_eq!(instance_seed(7, 3), instance_seed(7, 3));
    }
}
