use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::concept::{BooleanFunction, Certificate, ConceptClass, Input, InputDomain, PConceptClass, RealFunction};
use crate::error::{invalid, Result};

use super::boolean::{MajorityDecomposition, RobustDecomposition};
use super::real::{verify_real_decomposition, RealDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecompositionKind {
    Majority,
    Robust,
    Real,
}

/// A function table: hex for Boolean functions, values for real ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Table {
    Hex(String),
    Values(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    /// Inputs as lowercase hex.
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionDoc {
    pub kind: DecompositionKind,
    pub n: u32,
    pub target: Table,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    pub certs: Vec<CertificateDoc>,
    /// Index into `tables` for each slot.
    pub funcs: Vec<usize>,
    /// Distinct slot functions, in first-use order.
    pub tables: Vec<Table>,
    pub verified: bool,
    pub seed: u64,
}

fn hex_input(x: Input) -> String {
    format!("{x:x}")
}

fn parse_input(domain: InputDomain, s: &str) -> Result<Input> {
    let x = usize::from_str_radix(s, 16).map_err(|_| invalid(format!("bad input {s:?}")))?;
    domain.ensure_contains(x)?;
    Ok(x)
}

fn intern<K: Eq + std::hash::Hash>(keys: Vec<K>, mut table: impl FnMut(usize) -> Table) -> (Vec<usize>, Vec<Table>) {
    let mut seen: HashMap<K, usize> = HashMap::new();
    let mut tables = Vec::new();
    let mut refs = Vec::with_capacity(keys.len());
    for (i, k) in keys.into_iter().enumerate() {
        let next = seen.len();
        let r = *seen.entry(k).or_insert(next);
        if r == next {
            tables.push(table(i));
        }
        refs.push(r);
    }
    (refs, tables)
}

fn boolean_certs(certs: &[Certificate]) -> Vec<CertificateDoc> {
    certs
        .iter()
        .map(|c| CertificateDoc {
            points: c.iter().map(|(x, _)| hex_input(x)).collect(),
            bits: Some(c.iter().map(|(_, b)| b as u8).collect()),
            values: None,
        })
        .collect()
}

fn boolean_doc(
    kind: DecompositionKind,
    target: &BooleanFunction,
    certs: &[Certificate],
    funcs: &[BooleanFunction],
    verified: bool,
    seed: u64,
) -> DecompositionDoc {
    let (refs, tables) = intern(funcs.to_vec(), |i| Table::Hex(funcs[i].to_hex()));
    DecompositionDoc {
        kind,
        n: target.domain().bits(),
        target: Table::Hex(target.to_hex()),
        m: funcs.len(),
        alpha: None,
        eps: None,
        certs: boolean_certs(certs),
        funcs: refs,
        tables,
        verified,
        seed,
    }
}

impl MajorityDecomposition {
    pub fn to_doc(&self, s: &ConceptClass) -> DecompositionDoc {
        boolean_doc(DecompositionKind::Majority, &self.target, &self.certs, &self.funcs, self.verify(s), self.seed)
    }
}

impl RobustDecomposition {
    pub fn to_doc(&self, s: &ConceptClass) -> DecompositionDoc {
        boolean_doc(DecompositionKind::Robust, &self.target, &self.certs, &self.funcs, self.verify(s), self.seed)
    }
}

impl RealDecomposition {
    /// Certificates carry the slot function's values on its points.
    pub fn to_doc(&self, s: &PConceptClass) -> DecompositionDoc {
        let keys: Vec<Vec<u64>> = self
            .funcs
            .iter()
            .map(|f| f.values().iter().map(|v| v.to_bits()).collect())
            .collect();
        let (refs, tables) = intern(keys, |i| Table::Values(self.funcs[i].values().to_vec()));
        DecompositionDoc {
            kind: DecompositionKind::Real,
            n: self.target.domain().bits(),
            target: Table::Values(self.target.values().to_vec()),
            m: self.m,
            alpha: Some(self.alpha),
            eps: Some(self.eps),
            certs: self
                .funcs
                .iter()
                .zip(&self.points)
                .map(|(f, xs)| CertificateDoc {
                    points: xs.iter().map(|&x| hex_input(x)).collect(),
                    bits: None,
                    values: Some(xs.iter().map(|&x| f.get(x)).collect()),
                })
                .collect(),
            funcs: refs,
            tables,
            verified: verify_real_decomposition(s, self),
            seed: self.seed,
        }
    }
}

fn boolean_table(domain: InputDomain, t: &Table) -> Result<BooleanFunction> {
    match t {
        Table::Hex(h) => BooleanFunction::from_hex(domain, h),
        Table::Values(_) => Err(invalid("expected a hex table")),
    }
}

fn real_table(domain: InputDomain, t: &Table) -> Result<RealFunction> {
    match t {
        Table::Values(v) => RealFunction::new(domain, v.clone()),
        Table::Hex(_) => Err(invalid("expected a value table")),
    }
}

impl DecompositionDoc {
    fn check_shape(&self) -> Result<InputDomain> {
        let domain = InputDomain::new(self.n)?;
        if self.certs.len() != self.m || self.funcs.len() != self.m {
            return Err(invalid("slot count does not match m"));
        }
        if self.funcs.iter().any(|&r| r >= self.tables.len()) {
            return Err(invalid("function reference out of range"));
        }
        Ok(domain)
    }

    /// Rebuild certificates and slot functions of a Boolean document.
    pub fn boolean_parts(&self) -> Result<(BooleanFunction, Vec<Certificate>, Vec<BooleanFunction>)> {
        let domain = self.check_shape()?;
        let target = boolean_table(domain, &self.target)?;
        let tables: Vec<BooleanFunction> =
            self.tables.iter().map(|t| boolean_table(domain, t)).collect::<Result<_>>()?;
        let mut certs = Vec::with_capacity(self.m);
        for c in &self.certs {
            let bits = c.bits.as_ref().ok_or_else(|| invalid("certificate without bits"))?;
            if bits.len() != c.points.len() {
                return Err(invalid("certificate points and bits differ in length"));
            }
            let pairs = c
                .points
                .iter()
                .zip(bits)
                .map(|(p, &b)| Ok((parse_input(domain, p)?, b != 0)))
                .collect::<Result<Vec<_>>>()?;
            certs.push(Certificate::from_pairs(domain, pairs)?);
        }
        let funcs = self.funcs.iter().map(|&r| tables[r].clone()).collect();
        Ok((target, certs, funcs))
    }

    pub fn to_robust(&self, s: &ConceptClass) -> Result<RobustDecomposition> {
        let (target, certs, funcs) = self.boolean_parts()?;
        RobustDecomposition::new(s, target, certs, funcs)
    }

    pub fn to_real(&self) -> Result<RealDecomposition> {
        let domain = self.check_shape()?;
        let target = real_table(domain, &self.target)?;
        let tables: Vec<RealFunction> = self.tables.iter().map(|t| real_table(domain, t)).collect::<Result<_>>()?;
        let funcs: Vec<RealFunction> = self.funcs.iter().map(|&r| tables[r].clone()).collect();
        let mut points = Vec::with_capacity(self.m);
        for (c, f) in self.certs.iter().zip(&funcs) {
            let xs: BTreeSet<Input> = c.points.iter().map(|p| parse_input(domain, p)).collect::<Result<_>>()?;
            if let Some(values) = &c.values {
                if values.len() != xs.len() || xs.iter().zip(values).any(|(&x, &v)| f.get(x) != v) {
                    return Err(invalid("certificate values disagree with the slot function"));
                }
            }
            points.push(xs);
        }
        let alpha = self.alpha.ok_or_else(|| invalid("real document without alpha"))?;
        let eps = self.eps.ok_or_else(|| invalid("real document without eps"))?;
        Ok(RealDecomposition {
            target,
            funcs,
            points,
            alpha,
            eps,
            m: self.m,
            seed: self.seed,
            t: 0.4 * eps / 48.0 / alpha,
            game_penalty: f64::NAN,
            strategy_support: 0,
            stage_one_sizes: Vec::new(),
            attempts: 0,
        })
    }

    /// Re-verify the document against `s`, independent of its `verified` flag.
    pub fn reverify_boolean(&self, s: &ConceptClass) -> bool {
        let Ok((target, certs, funcs)) = self.boolean_parts() else {
            return false;
        };
        match self.kind {
            DecompositionKind::Majority => MajorityDecomposition {
                m: funcs.len(),
                target,
                certs,
                funcs,
                seed: self.seed,
                attempts: 0,
                strategy_value: 0.0,
                strategy_support: 0,
            }
            .verify(s),
            DecompositionKind::Robust => RobustDecomposition::new(s, target, certs, funcs).is_ok(),
            DecompositionKind::Real => false,
        }
    }

    pub fn reverify_real(&self, s: &PConceptClass) -> bool {
        self.kind == DecompositionKind::Real && self.to_real().is_ok_and(|d| verify_real_decomposition(s, &d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{point_functions, random_pconcept};
    use crate::majcert::{majority_certificates, real_majority_certificates, robust_majority_certificates};

    #[test]
    fn boolean_round_trip() {
        let s = point_functions(InputDomain::new(4).unwrap(), 16, 0).unwrap();
        let zero = s.member(0).clone();
        let d = majority_certificates(&s, &zero, 2).unwrap();
        let doc = d.to_doc(&s);
        assert!(doc.verified);
        assert!(doc.tables.len() <= 17);
        let text = serde_json::to_string(&doc).unwrap();
        let back: DecompositionDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert!(back.reverify_boolean(&s));

        let r = robust_majority_certificates(&s, &zero, 2).unwrap();
        let rd = r.to_doc(&s);
        assert_eq!(rd.to_robust(&s).unwrap().funcs, r.funcs);
    }

    #[test]
    fn tampered_document_fails() {
        let s = point_functions(InputDomain::new(4).unwrap(), 16, 0).unwrap();
        let d = majority_certificates(&s, s.member(0), 2).unwrap();
        let mut doc = d.to_doc(&s);
        doc.target = Table::Hex(BooleanFunction::ones(s.domain()).to_hex());
        assert!(!doc.reverify_boolean(&s));
    }

    #[test]
    fn real_round_trip() {
        let s = random_pconcept(InputDomain::new(3).unwrap(), 20, None, 4).unwrap();
        let d = real_majority_certificates(&s, s.member(0), 0.25, 4).unwrap();
        let doc = d.to_doc(&s);
        assert!(doc.verified);
        let text = serde_json::to_string(&doc).unwrap();
        let back: DecompositionDoc = serde_json::from_str(&text).unwrap();
        assert!(back.reverify_real(&s));
        let r = back.to_real().unwrap();
        assert_eq!(r.points, d.points);
        assert!(serde_json::from_str::<DecompositionDoc>(&text.replace("\"seed\"", "\"bogus\":1,\"seed\"")).is_err());
    }
}
