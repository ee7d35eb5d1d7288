use std::collections::BTreeSet;

use majcert_core::concept::Distribution;
use majcert_core::generate::{random_boolean, random_pconcept};
use majcert_core::majcert::{
    double_oracle_solve, majority_certificates, real_decomposition_bounds, real_majority_certificates,
    untrusted_oracle_evaluate, OracleOutput, DEFAULT_TARGET,
};
use majcert_core::quantum::{Circuit, DensityMatrix, Gate, GateKind};
use majcert_core::rng::substream;
use majcert_core::winnow::{
    binary_search_winnow, epsilon_cover, fat_shattering_dim, is_valid_cover, vc_dim, weak_certify,
    weak_certify_bound,
};
use majcert_core::{
    distance, pointwise_majority, BooleanFunction, Certificate, ConceptClass, InputDomain, Metric, PConceptClass,
    RealFunction,
};
use proptest::prelude::*;
use rand::Rng;

const TOL: f64 = 1e-9;

fn real_fn(n: u32) -> impl Strategy<Value = RealFunction> {
    let d = InputDomain::new(n).unwrap();
    prop::collection::vec(0.0..=1.0f64, d.size()).prop_map(move |v| RealFunction::new(d, v).unwrap())
}

fn subset(n: u32) -> impl Strategy<Value = Vec<usize>> {
    let size = 1usize << n;
    prop::collection::vec(any::<bool>(), size)
        .prop_map(|mask| mask.iter().enumerate().filter(|(_, &b)| b).map(|(x, _)| x).collect())
}

fn boolean_class() -> impl Strategy<Value = ConceptClass> {
    (2u32..=4, 1usize..=12, any::<u64>()).prop_map(|(n, size, seed)| {
        let d = InputDomain::new(n).unwrap();
        let size = if n == 2 { size.min(16) } else { size };
        random_boolean(d, size, seed).unwrap()
    })
}

fn certificate(d: InputDomain, pairs: &[(usize, bool)]) -> Certificate {
    let mut c = Certificate::empty(d);
    for &(x, b) in pairs {
        if c.get(x % d.size()).is_none() {
            c.assign(x % d.size(), b).unwrap();
        }
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_axioms(f in real_fn(3), g in real_fn(3), h in real_fn(3), xs in subset(3)) {
        for m in [Metric::Inf, Metric::Two, Metric::One] {
            let fg = distance(m, &f, &g, xs.iter().copied()).unwrap();
            let gf = distance(m, &g, &f, xs.iter().copied()).unwrap();
            let fh = distance(m, &f, &h, xs.iter().copied()).unwrap();
            let hg = distance(m, &h, &g, xs.iter().copied()).unwrap();
            prop_assert!(fg >= 0.0);
            prop_assert!((fg - gf).abs() <= TOL);
            prop_assert!(fg <= fh + hg + TOL);
        }
    }

    #[test]
    fn norm_chain(f in real_fn(3), g in real_fn(3), xs in subset(3)) {
        let inf = distance(Metric::Inf, &f, &g, xs.iter().copied()).unwrap();
        let two = distance(Metric::Two, &f, &g, xs.iter().copied()).unwrap();
        let one = distance(Metric::One, &f, &g, xs.iter().copied()).unwrap();
        let k = xs.len() as f64;
        prop_assert!(inf <= two + TOL && two <= one + TOL);
        prop_assert!(one <= k * inf + TOL);
        prop_assert!(two <= k.sqrt() * inf + TOL);
    }

    #[test]
    fn restriction_is_antitone(
        s in boolean_class(),
        base in prop::collection::vec((0usize..16, any::<bool>()), 0..3),
        more in prop::collection::vec((0usize..16, any::<bool>()), 0..3),
    ) {
        let d = s.domain();
        let c = certificate(d, &base);
        let mut bigger = c.clone();
        for (x, b) in more {
            let x = x % d.size();
            if bigger.get(x).is_none() {
                bigger.assign(x, b).unwrap();
            }
        }
        prop_assert!(c.is_subset_of(&bigger));
        let small: BTreeSet<usize> = s.restrict(&c).unwrap().indices().iter().copied().collect();
        let large: BTreeSet<usize> = s.restrict(&bigger).unwrap().indices().iter().copied().collect();
        prop_assert!(large.is_subset(&small));
    }

    #[test]
    fn majority_matches_counting(s in boolean_class(), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..8)) {
        let mut fs: Vec<BooleanFunction> = picks.iter().map(|i| s.member(i.index(s.len())).clone()).collect();
        if fs.len() % 2 == 0 {
            prop_assert!(pointwise_majority(&fs).is_err());
            fs.pop();
        }
        let maj = pointwise_majority(&fs).unwrap();
        for x in s.domain().inputs() {
            let ones = fs.iter().filter(|f| f.get(x)).count();
            prop_assert_eq!(maj.get(x), 2 * ones > fs.len());
        }
    }

    #[test]
    fn xor_shift_preserves_structure(
        s in boolean_class(),
        pick in any::<prop::sample::Index>(),
        pairs in prop::collection::vec((0usize..16, any::<bool>()), 0..4),
    ) {
        let f_star = s.member(pick.index(s.len())).clone();
        let t = s.xor_shift(&f_star).unwrap();
        prop_assert_eq!(t.len(), s.len());
        for i in 0..s.len() {
            for j in 0..s.len() {
                prop_assert_eq!(
                    s.member(i).hamming(s.member(j)).unwrap(),
                    t.member(i).hamming(t.member(j)).unwrap()
                );
            }
        }
        let c = certificate(s.domain(), &pairs);
        let shifted = c.shifted(&f_star).unwrap();
        prop_assert_eq!(s.restrict(&c).unwrap().len(), t.restrict(&shifted).unwrap().len());
    }

    #[test]
    fn weak_certify_guarantees(s in boolean_class(), pick in any::<prop::sample::Index>(), w in prop::collection::vec(0.01..1.0f64, 16)) {
        let d = s.domain();
        let f_star = s.member(pick.index(s.len())).clone();
        let dist = Distribution::normalized(d, w[..d.size()].to_vec()).unwrap();
        let r = weak_certify(&s, &f_star, &dist).unwrap();
        prop_assert!(r.error_mass <= 0.1 + 1e-12);
        prop_assert!(r.certificate.size() <= weak_certify_bound(s.len()));
        prop_assert!(s.is_isolated(&r.certificate, &r.f).unwrap());
        let mass: f64 = d.inputs().filter(|&x| r.f.get(x) != f_star.get(x)).map(|x| dist.weight(x)).sum();
        prop_assert!((mass - r.error_mass).abs() <= 1e-12);
    }

    #[test]
    fn binary_search_halves(s in boolean_class()) {
        let (f, c) = binary_search_winnow(&s);
        prop_assert!(s.is_isolated(&c, &f).unwrap());
        prop_assert!(c.size() as f64 <= (s.len() as f64).log2().ceil());
    }

    #[test]
    fn cover_is_valid_subset(n in 1u32..=3, size in 1usize..20, eps in 0.0..1.2f64, seed in any::<u64>()) {
        let s = random_pconcept(InputDomain::new(n).unwrap(), size, Some(5), seed);
        prop_assume!(s.is_ok());
        let s = s.unwrap();
        let c = epsilon_cover(&s, eps).unwrap();
        prop_assert!(is_valid_cover(&s, &c.cover, eps));
        prop_assert!(c.indices.iter().enumerate().all(|(k, &i)| c.cover.member(k) == s.member(i)));
    }

    #[test]
    fn boolean_dimensions_agree(s in boolean_class(), gamma in 0.01..=0.5f64) {
        let vc = vc_dim(&s).unwrap().value();
        prop_assert!(vc as f64 <= (s.len() as f64).log2() + 1e-12);
        let fat = fat_shattering_dim(&PConceptClass::from_boolean(&s), gamma).unwrap().value();
        prop_assert_eq!(fat, vc);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fat_antitone(seed in any::<u64>(), a in 0.01..0.5f64, b in 0.01..0.5f64) {
        let s = random_pconcept(InputDomain::new(2).unwrap(), 12, None, seed).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(fat_shattering_dim(&s, lo).unwrap().value() >= fat_shattering_dim(&s, hi).unwrap().value());
    }

    #[test]
    fn strategy_value_matches_scan(s in boolean_class(), pick in any::<prop::sample::Index>()) {
        let f_star = s.member(pick.index(s.len())).clone();
        let strat = double_oracle_solve(&s, &f_star, DEFAULT_TARGET).unwrap();
        let naive = s
            .domain()
            .inputs()
            .map(|x| {
                strat
                    .support
                    .iter()
                    .zip(&strat.weights)
                    .filter(|((_, f), _)| f.get(x) == f_star.get(x))
                    .map(|(_, w)| w)
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        prop_assert!((naive - strat.game_value).abs() <= 1e-9);
        prop_assert!(strat.value_history.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn decompositions_reverify(s in boolean_class(), pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let f_star = s.member(pick.index(s.len())).clone();
        let dec = majority_certificates(&s, &f_star, seed).unwrap();
        prop_assert_eq!(dec.funcs.len() % 2, 1);
        for (c, f) in dec.certs.iter().zip(&dec.funcs) {
            let alive: Vec<&BooleanFunction> = s.members().iter().filter(|g| c.is_consistent(g)).collect();
            prop_assert_eq!(alive, vec![f]);
        }
        for x in s.domain().inputs() {
            let agree = dec.funcs.iter().filter(|f| f.get(x) == f_star.get(x)).count();
            prop_assert!(2 * agree > dec.funcs.len());
        }
    }

    #[test]
    fn real_bounds_dominate_sampled_tuples(seed in 0u64..1000) {
        let s = random_pconcept(InputDomain::new(2).unwrap(), 8, Some(4), seed).unwrap();
        let dec = real_majority_certificates(&s, s.member(0), 0.3, seed).unwrap();
        let bounds = real_decomposition_bounds(&s, &dec).unwrap();
        let mut rng = substream(seed, 99);
        for _ in 0..20 {
            let picks: Vec<&RealFunction> = dec
                .funcs
                .iter()
                .zip(&dec.points)
                .map(|(f, xs)| {
                    let ok: Vec<&RealFunction> = s
                        .members()
                        .iter()
                        .filter(|g| xs.iter().all(|&x| (f.get(x) - g.get(x)).abs() <= dec.alpha + 1e-12))
                        .collect();
                    ok[rng.random_range(0..ok.len())]
                })
                .collect();
            for x in s.domain().inputs() {
                let avg = picks.iter().map(|g| g.get(x)).sum::<f64>() / picks.len() as f64;
                let t = dec.target.get(x);
                prop_assert!((t - avg).abs() <= (t - bounds.hi[x]).abs().max((t - bounds.lo[x]).abs()) + 1e-12);
            }
        }
    }

    #[test]
    fn oracle_never_wrong_on_class_claims(s in boolean_class(), pick in any::<prop::sample::Index>(), seed in any::<u64>(), claim_seed in any::<u64>()) {
        let f_star = s.member(pick.index(s.len())).clone();
        let dec = majcert_core::majcert::robust_majority_certificates(&s, &f_star, seed).unwrap();
        let mut rng = substream(claim_seed, 0);
        for _ in 0..10 {
            let claims: Vec<BooleanFunction> = (0..dec.m).map(|_| s.member(rng.random_range(0..s.len())).clone()).collect();
            for x in s.domain().inputs() {
                let out = untrusted_oracle_evaluate(&dec, &claims, x).unwrap();
                let wrong = if f_star.get(x) { OracleOutput::Zero } else { OracleOutput::One };
                prop_assert_ne!(out, wrong);
            }
        }
    }
}

fn gate() -> impl Strategy<Value = Gate> {
    (0u32..3, 0usize..5, prop::option::of(0u32..2), 1u32..3).prop_map(|(t, k, cond, off)| Gate {
        kind: match k {
            0 => GateKind::H,
            1 => GateKind::T,
            2 => GateKind::X,
            3 => GateKind::Z,
            _ => GateKind::Cnot { control: (t + off) % 3 },
        },
        target: t,
        condition: cond,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolution_keeps_states_valid(gates in prop::collection::vec(gate(), 0..15), seed in any::<u64>(), x in prop::collection::vec(any::<bool>(), 2)) {
        let q = Circuit::new(3, 0, gates).unwrap();
        let rho = DensityMatrix::random(2, &mut substream(seed, 0)).unwrap();
        let out = q.output_state(&x, &rho).unwrap();
        prop_assert!((out.trace() - 1.0).abs() <= TOL);
        prop_assert!(out.min_eigenvalue() >= -TOL);
        let p = q.accept_probability(&x, &rho).unwrap();
        prop_assert!((-TOL..=1.0 + TOL).contains(&p));
    }

    #[test]
    fn acceptance_is_affine(gates in prop::collection::vec(gate(), 0..10), seed in any::<u64>(), lambda in 0.0..=1.0f64) {
        let q = Circuit::new(3, 1, gates).unwrap();
        let mut rng = substream(seed, 0);
        let a = DensityMatrix::random(1, &mut rng).unwrap();
        let b = DensityMatrix::random(1, &mut rng).unwrap();
        let x = [true, false];
        let mix = q.accept_probability(&x, &a.mix(&b, lambda).unwrap()).unwrap();
        let lin = lambda * q.accept_probability(&x, &a).unwrap() + (1.0 - lambda) * q.accept_probability(&x, &b).unwrap();
        prop_assert!((mix - lin).abs() <= TOL);
    }

    #[test]
    fn parse_format_round_trip(gates in prop::collection::vec(gate(), 0..10)) {
        let q = Circuit::new(3, 2, gates).unwrap();
        prop_assert_eq!(Circuit::parse(&q.to_text()).unwrap(), q);
    }
}
