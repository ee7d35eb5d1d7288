use crate::concept::{BooleanFunction, Certificate, ConceptClass, Distribution, Input};
use crate::error::{Error, Result};

/// Members whose disagreement mass with the target exceeds this are "heavy"
/// and must be killed before the binary-search stage.
pub const HEAVY_THRESHOLD: f64 = 0.1;

pub(crate) fn ceil_log2(s: usize) -> usize {
    if s <= 1 {
        0
    } else {
        (usize::BITS - (s - 1).leading_zeros()) as usize
    }
}

fn ceil_log_ten_ninths(s: usize) -> usize {
    if s <= 1 {
        0
    } else {
        ((s as f64).ln() / (10.0f64 / 9.0).ln()).ceil() as usize
    }
}

/// `⌈log_{10/9}|S|⌉ + ⌈log2|S|⌉`, the certificate-size bound of
/// [`weak_certify`].
pub fn weak_certify_bound(class_size: usize) -> usize {
    ceil_log_ten_ninths(class_size) + ceil_log2(class_size)
}

/// Halve `alive` by fixing the smallest input on which its members disagree,
/// until one member remains. Returns that member's index.
fn halve_until_isolated(class: &ConceptClass, mut alive: Vec<usize>, cert: &mut Certificate) -> usize {
    let domain = class.domain();
    while alive.len() > 1 {
        let split = domain.inputs().find_map(|x| {
            let ones = alive.iter().filter(|&&i| class.member(i).get(x)).count();
            (ones > 0 && ones < alive.len()).then_some((x, ones))
        });
        // Members are distinct, so some input always splits them.
        let (x, ones) = split.expect("distinct members disagree somewhere");
        let zeros = alive.len() - ones;
        let bit = 2 * zeros > alive.len();
        cert.assign(x, bit).expect("input is unconstrained for a splitting set");
        alive.retain(|&i| class.member(i).get(x) == bit);
    }
    alive[0]
}

/// Isolate some member of `s` by repeatedly halving the surviving set.
///
/// At each step the smallest input `x` on which the survivors disagree is
/// fixed to 0 when at most half of them are 0 there, and to 1 otherwise.
pub fn binary_search_winnow(s: &ConceptClass) -> (BooleanFunction, Certificate) {
    let mut cert = Certificate::empty(s.domain());
    let i = halve_until_isolated(s, (0..s.len()).collect(), &mut cert);
    (s.member(i).clone(), cert)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakCertifyResult {
    pub f: BooleanFunction,
    /// Index of `f` in the class.
    pub index: usize,
    pub certificate: Certificate,
    /// `Pr_{x~D}[f(x) != f*(x)]`.
    pub error_mass: f64,
    /// Number of assignments made by the heavy-killing stage.
    pub stage_one: usize,
}

/// Find a member isolated by a small certificate that agrees with `f_star`
/// on at least 90% of `d`'s mass.
///
/// Heavy members are killed greedily by pinning inputs to `f_star`'s value,
/// choosing the input that kills the most heavy survivors (smallest input on
/// ties); the survivors are then isolated by [`binary_search_winnow`]'s rule.
pub fn weak_certify(
    s: &ConceptClass,
    f_star: &BooleanFunction,
    d: &Distribution,
) -> Result<WeakCertifyResult> {
    s.require_member(f_star)?;
    s.domain().ensure_same(d.domain())?;
    let domain = s.domain();
    let diffs: Vec<BooleanFunction> = s
        .members()
        .iter()
        .map(|g| g.xor(f_star))
        .collect::<Result<_>>()?;
    let mass: Vec<f64> = diffs.iter().map(|g| d.mass_of(g)).collect();

    let mut cert = Certificate::empty(domain);
    let mut alive: Vec<usize> = (0..s.len()).collect();
    loop {
        let heavy: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|&i| mass[i] > HEAVY_THRESHOLD)
            .collect();
        if heavy.is_empty() {
            break;
        }
        let mut best: Option<(Input, usize)> = None;
        for x in domain.inputs() {
            let kills = heavy.iter().filter(|&&i| diffs[i].get(x)).count();
            if kills > best.map_or(0, |(_, k)| k) {
                best = Some((x, kills));
            }
        }
        let (x, _) = best.ok_or_else(|| {
            Error::SolverDefect("heavy member survives but no input kills it".into())
        })?;
        cert.assign(x, f_star.get(x))?;
        alive.retain(|&i| !diffs[i].get(x));
    }
    let stage_one = cert.size();

    let index = halve_until_isolated(s, alive, &mut cert);
    let bound = weak_certify_bound(s.len());
    if cert.size() > bound {
        return Err(Error::PostconditionViolated {
            operation: "weak_certify",
            detail: format!("certificate size {} exceeds bound {bound}", cert.size()),
        });
    }
    let error_mass = mass[index];
    if error_mass > HEAVY_THRESHOLD {
        return Err(Error::PostconditionViolated {
            operation: "weak_certify",
            detail: format!("error mass {error_mass} exceeds {HEAVY_THRESHOLD}"),
        });
    }
    Ok(WeakCertifyResult {
        f: s.member(index).clone(),
        index,
        certificate: cert,
        error_mass,
        stage_one,
    })
}

/// A smallest certificate (at most `k` assignments) isolating member `i`,
/// or `None` if every isolating certificate is larger.
///
/// Iterative-deepening search over hitting sets: some input of every other
/// member's disagreement set must be pinned. Deterministic.
pub fn min_isolating_certificate(s: &ConceptClass, i: usize, k: usize) -> Option<Certificate> {
    let f = s.member(i);
    let diffs: Vec<Vec<Input>> = s
        .members()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, g)| {
            let mask = f.xor(g).expect("members share a domain");
            s.domain().inputs().filter(|&x| mask.get(x)).collect()
        })
        .collect();

    fn search(diffs: &[Vec<Input>], chosen: &mut Vec<Input>, limit: usize) -> bool {
        let unhit = diffs
            .iter()
            .find(|d| !d.iter().any(|x| chosen.contains(x)));
        let Some(unhit) = unhit else {
            return true;
        };
        if chosen.len() == limit {
            return false;
        }
        for &x in unhit {
            chosen.push(x);
            if search(diffs, chosen, limit) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    let mut chosen = Vec::new();
    for limit in 0..=k {
        if search(&diffs, &mut chosen, limit) {
            chosen.sort_unstable();
            let cert = Certificate::from_pairs(s.domain(), chosen.iter().map(|&x| (x, f.get(x))))
                .expect("inputs come from the domain");
            return Some(cert);
        }
        chosen.clear();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::InputDomain;
    use crate::generate::{point_functions, random_boolean};

    fn dom(n: u32) -> InputDomain {
        InputDomain::new(n).unwrap()
    }

    #[test]
    fn log_helpers() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(9), 4);
        assert_eq!(ceil_log2(16), 4);
        assert_eq!(weak_certify_bound(1), 0);
        // log_{10/9}(2) = 6.58
        assert_eq!(weak_certify_bound(2), 7 + 1);
    }

    #[test]
    fn binary_search_singleton() {
        let s = ConceptClass::new([BooleanFunction::ones(dom(2))]).unwrap();
        let (f, c) = binary_search_winnow(&s);
        assert_eq!(&f, s.member(0));
        assert!(c.is_empty());
    }

    #[test]
    fn binary_search_all_functions_on_one_bit() {
        let d = dom(1);
        let s = ConceptClass::new((0..4).map(|t| {
            BooleanFunction::from_bits(d, &[t & 2 != 0, t & 1 != 0]).unwrap()
        }))
        .unwrap();
        let (f, c) = binary_search_winnow(&s);
        assert_eq!(c.size(), 2);
        let r = s.restrict(&c).unwrap();
        assert_eq!(r.members().collect::<Vec<_>>(), vec![&f]);
        // First split at input 0: two zeros out of four, so pin 0.
        assert_eq!(c.get(0), Some(false));
    }

    #[test]
    fn binary_search_point_class() {
        let s = point_functions(dom(3), 8, 0).unwrap();
        let (f, c) = binary_search_winnow(&s);
        assert!(c.size() <= ceil_log2(s.len()));
        assert!(s.is_isolated(&c, &f).unwrap());
    }

    #[test]
    fn binary_search_respects_halving_bound_on_random_classes() {
        for seed in 0..50 {
            let s = random_boolean(dom(4), 1 + (seed as usize * 7) % 60, seed).unwrap();
            let (f, c) = binary_search_winnow(&s);
            assert!(c.size() <= ceil_log2(s.len()));
            assert!(s.is_isolated(&c, &f).unwrap());
        }
    }

    #[test]
    fn weak_certify_point_mass_agrees() {
        let s = random_boolean(dom(3), 20, 3).unwrap();
        let f_star = s.member(5).clone();
        for x0 in 0..8 {
            let d = Distribution::point_mass(s.domain(), x0).unwrap();
            let r = weak_certify(&s, &f_star, &d).unwrap();
            assert_eq!(r.f.get(x0), f_star.get(x0));
            assert!(s.is_isolated(&r.certificate, &r.f).unwrap());
        }
    }

    #[test]
    fn weak_certify_point_class_uniform() {
        let s = point_functions(dom(4), 16, 0).unwrap();
        let zero = s.member(0).clone();
        let d = Distribution::uniform(s.domain());
        let r = weak_certify(&s, &zero, &d).unwrap();
        // Every point function has weight 1/16, so nothing is heavy.
        assert_eq!(r.stage_one, 0);
        assert!(r.error_mass <= 1.0 / 16.0);
        assert!(s.is_isolated(&r.certificate, &r.f).unwrap());
    }

    #[test]
    fn weak_certify_singleton() {
        let f = BooleanFunction::point(dom(2), 1).unwrap();
        let s = ConceptClass::new([f.clone()]).unwrap();
        let r = weak_certify(&s, &f, &Distribution::uniform(s.domain())).unwrap();
        assert_eq!(r.f, f);
        assert!(r.certificate.is_empty());
        assert_eq!(r.error_mass, 0.0);
    }

    #[test]
    fn weak_certify_rejects_non_member() {
        let s = point_functions(dom(2), 4, 0).unwrap();
        let not_in = BooleanFunction::ones(dom(2));
        assert_eq!(
            weak_certify(&s, &not_in, &Distribution::uniform(s.domain())),
            Err(Error::NotAMember)
        );
    }

    #[test]
    fn min_isolating_certificates() {
        let s = point_functions(dom(3), 8, 0).unwrap();
        // Point functions are isolated by their one.
        let c = min_isolating_certificate(&s, 3, 1).unwrap();
        assert_eq!(c.size(), 1);
        assert!(s.is_isolated(&c, s.member(3)).unwrap());
        // Zero needs all eight inputs pinned.
        assert!(min_isolating_certificate(&s, 0, 7).is_none());
        let c0 = min_isolating_certificate(&s, 0, 8).unwrap();
        assert_eq!(c0.size(), 8);
    }
}
