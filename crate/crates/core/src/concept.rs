//! Functions on `{0,1}^n`, certificates, finite concept classes, input
//! distributions, and the three restricted distance functionals.
//!
//! Every function is stored as an explicit table indexed by the input
//! `x ∈ 0..2^n`. Input bits are read MSB-first: bit `j` of `x` is the `j`-th
//! character of its `n`-bit binary spelling.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::ops::Range;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Index of an input string in `0..2^n`.
pub type Input = usize;

/// Absolute tolerance for comparing real-valued quantities that are not
/// required to be bit-exact.
pub const REAL_TOLERANCE: f64 = 1e-9;

/// The Boolean cube `{0,1}^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InputDomain {
    n: u32,
}

impl InputDomain {
    /// Largest supported `n` for Boolean tables.
    pub const MAX_BITS: u32 = 20;
    /// Largest supported `n` for real-valued tables.
    pub const MAX_REAL_BITS: u32 = 14;

    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > Self::MAX_BITS {
            return Err(invalid(format!(
                "number of input bits must be in 1..={}, got {n}",
                Self::MAX_BITS
            )));
        }
        Ok(Self { n })
    }

    pub fn bits(self) -> u32 {
        self.n
    }

    pub fn size(self) -> usize {
        1usize << self.n
    }

    pub fn inputs(self) -> Range<Input> {
        0..self.size()
    }

    pub fn contains(self, x: Input) -> bool {
        x < self.size()
    }

    /// Bit `j` of `x`, MSB-first.
    pub fn bit(self, x: Input, j: u32) -> bool {
        debug_assert!(j < self.n);
        (x >> (self.n - 1 - j)) & 1 == 1
    }

    /// All `n` bits of `x`, MSB-first.
    pub fn bits_of(self, x: Input) -> Vec<bool> {
        (0..self.n).map(|j| self.bit(x, j)).collect()
    }

    /// The `n`-character binary spelling of `x`.
    pub fn spell(self, x: Input) -> String {
        format!("{:0width$b}", x, width = self.n as usize)
    }

    pub fn ensure_same(self, other: InputDomain) -> Result<()> {
        if self != other {
            return Err(Error::DomainMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn ensure_contains(self, x: Input) -> Result<()> {
        if !self.contains(x) {
            return Err(invalid(format!(
                "input {x} outside domain of size {}",
                self.size()
            )));
        }
        Ok(())
    }

    pub(crate) fn ensure_real(self) -> Result<()> {
        if self.n > Self::MAX_REAL_BITS {
            return Err(invalid(format!(
                "real-valued tables support n <= {}, got {}",
                Self::MAX_REAL_BITS,
                self.n
            )));
        }
        Ok(())
    }
}

/// A total Boolean function stored as a bit-packed truth table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    domain: InputDomain,
    words: Vec<u64>,
}

impl BooleanFunction {
    pub fn zeros(domain: InputDomain) -> Self {
        let words = vec![0; domain.size().div_ceil(64)];
        Self { domain, words }
    }

    pub fn ones(domain: InputDomain) -> Self {
        Self::from_fn(domain, |_| true)
    }

    /// The point function that is 1 exactly at `y`.
    pub fn point(domain: InputDomain, y: Input) -> Result<Self> {
        domain.ensure_contains(y)?;
        let mut f = Self::zeros(domain);
        f.set(y, true);
        Ok(f)
    }

    pub fn from_fn(domain: InputDomain, mut value: impl FnMut(Input) -> bool) -> Self {
        let mut f = Self::zeros(domain);
        for x in domain.inputs() {
            if value(x) {
                f.set(x, true);
            }
        }
        f
    }

    pub fn from_bits(domain: InputDomain, bits: &[bool]) -> Result<Self> {
        if bits.len() != domain.size() {
            return Err(invalid(format!(
                "truth table has {} entries, expected {}",
                bits.len(),
                domain.size()
            )));
        }
        Ok(Self::from_fn(domain, |x| bits[x]))
    }

    pub fn domain(&self) -> InputDomain {
        self.domain
    }

    #[inline]
    pub fn get(&self, x: Input) -> bool {
        (self.words[x >> 6] >> (x & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: Input, value: bool) {
        let mask = 1u64 << (x & 63);
        if value {
            self.words[x >> 6] |= mask;
        } else {
            self.words[x >> 6] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor(&self, other: &BooleanFunction) -> Result<BooleanFunction> {
        self.domain.ensure_same(other.domain)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Self {
            domain: self.domain,
            words,
        })
    }

    pub fn hamming(&self, other: &BooleanFunction) -> Result<usize> {
        Ok(self.xor(other)?.count_ones())
    }

    /// The same table viewed as a `{0,1}`-valued real function.
    pub fn to_real(&self) -> RealFunction {
        RealFunction {
            domain: self.domain,
            values: self
                .domain
                .inputs()
                .map(|x| if self.get(x) { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    /// Hex encoding of the table, MSB-first: the first nibble holds
    /// `f(0) f(1) f(2) f(3)` with `f(0)` as its high bit. Tables shorter
    /// than a nibble are right-padded with zeros.
    pub fn to_hex(&self) -> String {
        let size = self.domain.size();
        let nibbles = size.div_ceil(4);
        let mut out = String::with_capacity(nibbles);
        for k in 0..nibbles {
            let mut v = 0u32;
            for i in 0..4 {
                let x = 4 * k + i;
                v <<= 1;
                if x < size && self.get(x) {
                    v |= 1;
                }
            }
            out.push(char::from_digit(v, 16).unwrap());
        }
        out
    }

    pub fn from_hex(domain: InputDomain, hex: &str) -> Result<Self> {
        let size = domain.size();
        let hex = hex.trim();
        if hex.len() != size.div_ceil(4) {
            return Err(invalid(format!(
                "hex table has {} digits, expected {}",
                hex.len(),
                size.div_ceil(4)
            )));
        }
        let mut f = Self::zeros(domain);
        for (k, c) in hex.chars().enumerate() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| invalid(format!("bad hex digit {c:?}")))?;
            for i in 0..4 {
                let x = 4 * k + i;
                let bit = (v >> (3 - i)) & 1 == 1;
                if x < size {
                    f.set(x, bit);
                } else if bit {
                    return Err(invalid("nonzero padding bit in hex table"));
                }
            }
        }
        Ok(f)
    }
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BooleanFunction(n={}, {})", self.domain.n, self.to_hex())
    }
}

/// A total function `{0,1}^n -> [0,1]`.
#[derive(Clone, PartialEq)]
pub struct RealFunction {
    domain: InputDomain,
    values: Vec<f64>,
}

impl RealFunction {
    pub fn new(domain: InputDomain, values: Vec<f64>) -> Result<Self> {
        domain.ensure_real()?;
        if values.len() != domain.size() {
            return Err(invalid(format!(
                "real table has {} entries, expected {}",
                values.len(),
                domain.size()
            )));
        }
        if let Some((x, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(invalid(format!("value {v} at input {x} outside [0,1]")));
        }
        Ok(Self { domain, values })
    }

    pub fn constant(domain: InputDomain, c: f64) -> Result<Self> {
        Self::new(domain, vec![c; domain.size()])
    }

    pub fn from_fn(domain: InputDomain, value: impl FnMut(Input) -> f64) -> Result<Self> {
        Self::new(domain, domain.inputs().map(value).collect())
    }

    pub fn domain(&self) -> InputDomain {
        self.domain
    }

    #[inline]
    pub fn get(&self, x: Input) -> f64 {
        self.values[x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn bit_key(&self) -> Vec<u64> {
        self.values.iter().map(|v| v.to_bits()).collect()
    }
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealFunction(n={}, {:?})", self.domain.n, self.values)
    }
}

/// A partial Boolean function: a finite set of `input -> bit` constraints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Certificate {
    domain: InputDomain,
    assignments: BTreeMap<Input, bool>,
}

impl Certificate {
    pub fn empty(domain: InputDomain) -> Self {
        Self {
            domain,
            assignments: BTreeMap::new(),
        }
    }

    pub fn from_pairs(
        domain: InputDomain,
        pairs: impl IntoIterator<Item = (Input, bool)>,
    ) -> Result<Self> {
        let mut c = Self::empty(domain);
        for (x, b) in pairs {
            c.assign(x, b)?;
        }
        Ok(c)
    }

    /// Constrain `x` to `bit`. Re-assigning the same value is a no-op;
    /// a conflicting value is rejected.
    pub fn assign(&mut self, x: Input, bit: bool) -> Result<()> {
        self.domain.ensure_contains(x)?;
        match self.assignments.insert(x, bit) {
            Some(prev) if prev != bit => {
                self.assignments.insert(x, prev);
                Err(invalid(format!("conflicting assignment at input {x}")))
            }
            _ => Ok(()),
        }
    }

    pub fn domain(&self) -> InputDomain {
        self.domain
    }

    /// `|C|`, the number of constrained inputs.
    pub fn size(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn get(&self, x: Input) -> Option<bool> {
        self.assignments.get(&x).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Input, bool)> + '_ {
        self.assignments.iter().map(|(&x, &b)| (x, b))
    }

    pub fn is_consistent(&self, f: &BooleanFunction) -> bool {
        f.domain() == self.domain && self.iter().all(|(x, b)| f.get(x) == b)
    }

    /// `C ⊆ C'` as assignment sets.
    pub fn is_subset_of(&self, other: &Certificate) -> bool {
        self.iter().all(|(x, b)| other.get(x) == Some(b))
    }

    /// The certificate with every constrained bit XOR-ed with `mask(x)`.
    pub fn shifted(&self, mask: &BooleanFunction) -> Result<Certificate> {
        self.domain.ensure_same(mask.domain())?;
        Ok(Certificate {
            domain: self.domain,
            assignments: self.iter().map(|(x, b)| (x, b ^ mask.get(x))).collect(),
        })
    }
}

impl fmt::Debug for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Certificate{")?;
        for (i, (x, b)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}->{}", self.domain.spell(x), b as u8)?;
        }
        f.write_str("}")
    }
}

/// Approximate constraints `|f(x) - a_x| <= tolerance` on a finite set of
/// points.
#[derive(Clone, Debug, PartialEq)]
pub struct RealCertificate {
    domain: InputDomain,
    targets: BTreeMap<Input, f64>,
    tolerance: f64,
}

impl RealCertificate {
    pub fn new(domain: InputDomain, targets: BTreeMap<Input, f64>, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(invalid(format!("tolerance must be positive, got {tolerance}")));
        }
        for (&x, &a) in &targets {
            domain.ensure_contains(x)?;
            if !(0.0..=1.0).contains(&a) {
                return Err(invalid(format!("target {a} at input {x} outside [0,1]")));
            }
        }
        Ok(Self {
            domain,
            targets,
            tolerance,
        })
    }

    /// Pin `f` on `points` with the given tolerance.
    pub fn around(f: &RealFunction, points: &BTreeSet<Input>, tolerance: f64) -> Result<Self> {
        let targets = points.iter().map(|&x| (x, f.get(x))).collect();
        Self::new(f.domain(), targets, tolerance)
    }

    pub fn points(&self) -> impl Iterator<Item = Input> + '_ {
        self.targets.keys().copied()
    }

    pub fn targets(&self) -> &BTreeMap<Input, f64> {
        &self.targets
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn admits(&self, g: &RealFunction) -> bool {
        g.domain() == self.domain
            && self
                .targets
                .iter()
                .all(|(&x, &a)| (g.get(x) - a).abs() <= self.tolerance)
    }
}

/// A finite, duplicate-free, non-empty set of Boolean functions on one domain.
#[derive(Clone, Debug, PartialEq)]
pub struct ConceptClass {
    domain: InputDomain,
    members: Vec<BooleanFunction>,
}

impl ConceptClass {
    /// Build a class, dropping later duplicates and keeping insertion order.
    pub fn new(members: impl IntoIterator<Item = BooleanFunction>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        let mut domain = None;
        for f in members {
            match domain {
                None => domain = Some(f.domain()),
                Some(d) => d.ensure_same(f.domain())?,
            }
            if seen.insert(f.clone()) {
                kept.push(f);
            }
        }
        let domain = domain.ok_or_else(|| invalid("concept class must be non-empty"))?;
        Ok(Self {
            domain,
            members: kept,
        })
    }

    pub fn domain(&self) -> InputDomain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[BooleanFunction] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &BooleanFunction {
        &self.members[i]
    }

    pub fn index_of(&self, f: &BooleanFunction) -> Option<usize> {
        self.members.iter().position(|g| g == f)
    }

    pub fn require_member(&self, f: &BooleanFunction) -> Result<usize> {
        self.domain.ensure_same(f.domain())?;
        self.index_of(f).ok_or(Error::NotAMember)
    }

    /// `S[C]`: the members consistent with every assignment of `C`.
    pub fn restrict(&self, c: &Certificate) -> Result<Restriction<'_>> {
        self.domain.ensure_same(c.domain())?;
        let indices = (0..self.len())
            .filter(|&i| c.is_consistent(&self.members[i]))
            .collect();
        Ok(Restriction {
            class: self,
            indices,
        })
    }

    /// Whether `S[C] = {f}`.
    pub fn is_isolated(&self, c: &Certificate, f: &BooleanFunction) -> Result<bool> {
        let i = self.require_member(f)?;
        let r = self.restrict(c)?;
        Ok(r.indices == [i])
    }

    /// `{g ⊕ f* : g ∈ S}`, in member order.
    pub fn xor_shift(&self, f_star: &BooleanFunction) -> Result<ConceptClass> {
        self.require_member(f_star)?;
        let members = self
            .members
            .iter()
            .map(|g| g.xor(f_star))
            .collect::<Result<Vec<_>>>()?;
        // XOR by a fixed table is injective, so no duplicates appear.
        Ok(Self {
            domain: self.domain,
            members,
        })
    }

    pub(crate) fn from_unique(domain: InputDomain, members: Vec<BooleanFunction>) -> Self {
        debug_assert!(!members.is_empty());
        Self { domain, members }
    }
}

/// A possibly-empty view `S[C]` of a concept class.
#[derive(Clone, Debug)]
pub struct Restriction<'a> {
    class: &'a ConceptClass,
    indices: Vec<usize>,
}

impl<'a> Restriction<'a> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Member indices in the parent class.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn members(&self) -> impl Iterator<Item = &'a BooleanFunction> + '_ {
        self.indices.iter().map(|&i| self.class.member(i))
    }

    pub fn to_class(&self) -> Option<ConceptClass> {
        if self.is_empty() {
            return None;
        }
        Some(ConceptClass::from_unique(
            self.class.domain,
            self.members().cloned().collect(),
        ))
    }
}

/// A finite, duplicate-free, non-empty set of `[0,1]`-valued functions.
#[derive(Clone, Debug, PartialEq)]
pub struct PConceptClass {
    domain: InputDomain,
    members: Vec<RealFunction>,
}

impl PConceptClass {
    /// Build a class, dropping later duplicates (bitwise table equality) and
    /// keeping insertion order.
    pub fn new(members: impl IntoIterator<Item = RealFunction>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        let mut domain = None;
        for f in members {
            match domain {
                None => domain = Some(f.domain()),
                Some(d) => d.ensure_same(f.domain())?,
            }
            if seen.insert(f.bit_key()) {
                kept.push(f);
            }
        }
        let domain = domain.ok_or_else(|| invalid("p-concept class must be non-empty"))?;
        Ok(Self {
            domain,
            members: kept,
        })
    }

    pub fn from_boolean(class: &ConceptClass) -> Self {
        Self {
            domain: class.domain(),
            members: class.members().iter().map(BooleanFunction::to_real).collect(),
        }
    }

    pub fn domain(&self) -> InputDomain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[RealFunction] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &RealFunction {
        &self.members[i]
    }

    pub fn index_of(&self, f: &RealFunction) -> Option<usize> {
        let key = f.bit_key();
        self.members.iter().position(|g| g.bit_key() == key)
    }

    pub fn require_member(&self, f: &RealFunction) -> Result<usize> {
        self.domain.ensure_same(f.domain())?;
        self.index_of(f).ok_or(Error::NotAMember)
    }

    /// The sub-class at the given member indices (kept in the given order).
    pub fn subclass(&self, indices: &[usize]) -> Result<PConceptClass> {
        if indices.is_empty() {
            return Err(invalid("sub-class must be non-empty"));
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(invalid(format!("member index {i} out of range")));
        }
        Self::new(indices.iter().map(|&i| self.members[i].clone()))
    }
}

/// A probability distribution over the inputs of a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    domain: InputDomain,
    weights: Vec<f64>,
}

impl Distribution {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(domain: InputDomain, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != domain.size() {
            return Err(invalid(format!(
                "distribution has {} weights, expected {}",
                weights.len(),
                domain.size()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("distribution weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(invalid(format!("distribution weights sum to {total}, not 1")));
        }
        Ok(Self { domain, weights })
    }

    /// Rescale non-negative weights to sum to one.
    pub fn normalized(domain: InputDomain, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().filter(|w| w.is_finite()).sum();
        if total.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(invalid("distribution needs positive total weight"));
        }
        Self::new(domain, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(domain: InputDomain) -> Self {
        let p = 1.0 / domain.size() as f64;
        Self {
            domain,
            weights: vec![p; domain.size()],
        }
    }

    pub fn point_mass(domain: InputDomain, x: Input) -> Result<Self> {
        domain.ensure_contains(x)?;
        let mut weights = vec![0.0; domain.size()];
        weights[x] = 1.0;
        Ok(Self { domain, weights })
    }

    pub fn domain(&self) -> InputDomain {
        self.domain
    }

    pub fn weight(&self, x: Input) -> f64 {
        self.weights[x]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Pr_{x~D}[f(x) = 1]`.
    pub fn mass_of(&self, f: &BooleanFunction) -> f64 {
        self.domain
            .inputs()
            .filter(|&x| f.get(x))
            .map(|x| self.weights[x])
            .sum()
    }

    /// Draw `count` inputs i.i.d. (with replacement).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<Input> {
        let index = WeightedIndex::new(&self.weights).expect("validated weights");
        (0..count).map(|_| index.sample(rng)).collect()
    }
}

/// Which restricted distance functional to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// `max_{x∈X} |f(x) - g(x)|`, zero on the empty set.
    Inf,
    /// `sqrt(Σ_{x∈X} (f(x) - g(x))^2)`.
    Two,
    /// `Σ_{x∈X} |f(x) - g(x)|`.
    One,
}

/// Distance between `f` and `g` restricted to the inputs `xs`.
pub fn distance(
    metric: Metric,
    f: &RealFunction,
    g: &RealFunction,
    xs: impl IntoIterator<Item = Input>,
) -> Result<f64> {
    f.domain().ensure_same(g.domain())?;
    let domain = f.domain();
    let mut acc = 0.0f64;
    for x in xs {
        domain.ensure_contains(x)?;
        let d = (f.get(x) - g.get(x)).abs();
        match metric {
            Metric::Inf => acc = acc.max(d),
            Metric::Two => acc += d * d,
            Metric::One => acc += d,
        }
    }
    Ok(match metric {
        Metric::Two => acc.sqrt(),
        _ => acc,
    })
}

/// Distance over the whole domain.
pub fn distance_full(metric: Metric, f: &RealFunction, g: &RealFunction) -> Result<f64> {
    distance(metric, f, g, f.domain().inputs())
}

/// `E_{x~D} |f(x) - g(x)|`.
pub fn distance_expected(f: &RealFunction, g: &RealFunction, d: &Distribution) -> Result<f64> {
    f.domain().ensure_same(g.domain())?;
    f.domain().ensure_same(d.domain())?;
    Ok(f.domain()
        .inputs()
        .map(|x| d.weight(x) * (f.get(x) - g.get(x)).abs())
        .sum())
}

// Unchecked kernels for inner loops over validated members.

#[inline]
pub(crate) fn sup_on<'x>(f: &RealFunction, g: &RealFunction, xs: impl IntoIterator<Item = &'x Input>) -> f64 {
    xs.into_iter()
        .map(|&x| (f.values[x] - g.values[x]).abs())
        .fold(0.0, f64::max)
}

#[inline]
pub(crate) fn sum_abs_on<'x>(f: &RealFunction, g: &RealFunction, xs: impl IntoIterator<Item = &'x Input>) -> f64 {
    xs.into_iter().map(|&x| (f.values[x] - g.values[x]).abs()).sum()
}

#[inline]
pub(crate) fn sup_full(f: &RealFunction, g: &RealFunction) -> f64 {
    f.values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn expected_abs(f: &RealFunction, g: &RealFunction, d: &Distribution) -> f64 {
    f.values
        .iter()
        .zip(&g.values)
        .zip(&d.weights)
        .map(|((a, b), w)| w * (a - b).abs())
        .sum()
}

/// `S[C]` as member indices; see [`ConceptClass::restrict`].
pub fn restrict_class<'a>(s: &'a ConceptClass, c: &Certificate) -> Result<Restriction<'a>> {
    s.restrict(c)
}

pub fn is_isolated(s: &ConceptClass, c: &Certificate, f: &BooleanFunction) -> Result<bool> {
    s.is_isolated(c, f)
}

pub fn xor_shift(s: &ConceptClass, f_star: &BooleanFunction) -> Result<ConceptClass> {
    s.xor_shift(f_star)
}

/// Pointwise strict majority of an odd number of functions.
pub fn pointwise_majority(fs: &[BooleanFunction]) -> Result<BooleanFunction> {
    let first = fs.first().ok_or_else(|| invalid("majority of an empty list"))?;
    if fs.len() % 2 == 0 {
        return Err(invalid(format!(
            "majority needs an odd number of functions, got {}",
            fs.len()
        )));
    }
    let domain = first.domain();
    for f in fs {
        domain.ensure_same(f.domain())?;
    }
    let half = fs.len() / 2;
    Ok(BooleanFunction::from_fn(domain, |x| {
        fs.iter().filter(|f| f.get(x)).count() > half
    }))
}

/// Per-input count of functions that are 1 there.
pub fn vote_counts(fs: &[BooleanFunction]) -> Result<Vec<usize>> {
    let first = fs.first().ok_or_else(|| invalid("vote count of an empty list"))?;
    let domain = first.domain();
    for f in fs {
        domain.ensure_same(f.domain())?;
    }
    Ok(domain
        .inputs()
        .map(|x| fs.iter().filter(|f| f.get(x)).count())
        .collect())
}

/// Pointwise arithmetic mean.
pub fn pointwise_average(fs: &[RealFunction]) -> Result<RealFunction> {
    let first = fs.first().ok_or_else(|| invalid("average of an empty list"))?;
    let domain = first.domain();
    for f in fs {
        domain.ensure_same(f.domain())?;
    }
    let m = fs.len() as f64;
    let values = domain
        .inputs()
        .map(|x| {
            let mean = fs.iter().map(|f| f.get(x)).sum::<f64>() / m;
            mean.clamp(0.0, 1.0)
        })
        .collect();
    RealFunction::new(domain, values)
}
