//! Seeded generators for the class families used in experiments.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;

use crate::concept::{BooleanFunction, ConceptClass, InputDomain, PConceptClass, RealFunction};
use crate::error::{invalid, Error, Result};
use crate::rng::{substream, stream};

/// Largest class any generator will build.
pub const MAX_CLASS_SIZE: usize = 1 << 16;

fn check_size(size: usize) -> Result<()> {
    if size == 0 {
        return Err(invalid("class size must be positive"));
    }
    if size > MAX_CLASS_SIZE {
        return Err(Error::BudgetExceeded {
            what: "class size",
            count: size as u64,
            limit: MAX_CLASS_SIZE as u64,
        });
    }
    Ok(())
}

/// `size` distinct uniformly random truth tables.
pub fn random_boolean(domain: InputDomain, size: usize, seed: u64) -> Result<ConceptClass> {
    check_size(size)?;
    let exponent = domain.size();
    if exponent < 64 && (size as u128) > (1u128 << exponent) {
        return Err(invalid(format!(
            "only 2^{exponent} distinct functions exist on n={}",
            domain.bits()
        )));
    }
    let mut rng = substream(seed, stream::GENERATE);
    let mut seen = HashSet::with_capacity(size);
    let mut members = Vec::with_capacity(size);
    while members.len() < size {
        let f = BooleanFunction::from_fn(domain, |_| rng.random::<bool>());
        if seen.insert(f.clone()) {
            members.push(f);
        }
    }
    ConceptClass::new(members)
}

/// The zero function followed by `count` point functions. When `count`
/// is below `2^n` the points are a seeded random subset, listed in
/// increasing order.
pub fn point_functions(domain: InputDomain, count: usize, seed: u64) -> Result<ConceptClass> {
    if count > domain.size() {
        return Err(invalid(format!(
            "requested {count} point functions, domain has {} inputs",
            domain.size()
        )));
    }
    check_size(count + 1)?;
    let mut points: Vec<usize> = if count == domain.size() {
        domain.inputs().collect()
    } else {
        let mut rng = substream(seed, stream::GENERATE);
        sample(&mut rng, domain.size(), count).into_vec()
    };
    points.sort_unstable();
    let mut members = vec![BooleanFunction::zeros(domain)];
    for y in points {
        members.push(BooleanFunction::point(domain, y)?);
    }
    ConceptClass::new(members)
}

/// `size` random `[0,1]`-valued functions. With `levels = Some(k)` every
/// value is drawn from the grid `{0, 1/k, ..., 1}`; otherwise uniformly.
/// Tables are redrawn until `size` distinct members exist.
pub fn random_pconcept(
    domain: InputDomain,
    size: usize,
    levels: Option<u32>,
    seed: u64,
) -> Result<PConceptClass> {
    check_size(size)?;
    domain.ensure_real()?;
    if let Some(k) = levels {
        if k == 0 {
            return Err(invalid("grid needs at least one level step"));
        }
        let distinct = (k as f64 + 1.0).powf(domain.size() as f64);
        if distinct < size as f64 {
            return Err(invalid(format!("grid admits fewer than {size} distinct functions")));
        }
    }
    let mut rng = substream(seed, stream::GENERATE);
    let mut members = Vec::with_capacity(size);
    let mut seen = HashSet::with_capacity(size);
    while members.len() < size {
        let values: Vec<f64> = domain
            .inputs()
            .map(|_| match levels {
                Some(k) => rng.random_range(0..=k) as f64 / k as f64,
                None => rng.random::<f64>(),
            })
            .collect();
        let key: Vec<u64> = values.iter().map(|v| v.to_bits()).collect();
        if seen.insert(key) {
            members.push(RealFunction::new(domain, values)?);
        }
    }
    PConceptClass::new(members)
}

/// The constant functions `k/steps` for `k = 0..=steps`.
pub fn constants_grid(domain: InputDomain, steps: u32) -> Result<PConceptClass> {
    if steps == 0 {
        return Err(invalid("constants grid needs at least one step"));
    }
    check_size(steps as usize + 1)?;
    let members = (0..=steps)
        .map(|k| RealFunction::constant(domain, k as f64 / steps as f64))
        .collect::<Result<Vec<_>>>()?;
    PConceptClass::new(members)
}
