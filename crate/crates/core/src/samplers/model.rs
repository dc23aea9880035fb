//! Random frequency models and their samplers.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::engine::{FrequencyVector, MASS_TOL};
use crate::error::{Error, Result};

/// Redraws allowed when certifying stick-breaking tail mass.
const CERTIFY_ATTEMPTS: usize = 1000;

/// Tail bound applied to configured stick-breaking models unless set to `null`.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-9;

fn default_tail_tolerance() -> Option<f64> {
    Some(DEFAULT_TAIL_TOLERANCE)
}

/// Stick-breaking with i.i.d. `Beta(a, b)` breaks, truncated after `depth` atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StickBreaking {
    pub a: f64,
    pub b: f64,
    pub depth: usize,
    /// Reject draws whose leftover mass exceeds this bound.
    #[serde(default = "default_tail_tolerance")]
    pub tail_tolerance: Option<f64>,
}

impl StickBreaking {
    /// Uniform breaks, the record-value model. Uncertified; see [`Self::certified`].
    pub fn uniform(depth: usize) -> Self {
        StickBreaking {
            a: 1.0,
            b: 1.0,
            depth,
            tail_tolerance: None,
        }
    }

    pub fn certified(mut self, tolerance: f64) -> Self {
        self.tail_tolerance = Some(tolerance);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b > 0.0 && self.a.is_finite() && self.b.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "beta shapes must be positive, got ({}, {})",
                self.a, self.b
            )));
        }
        if self.depth == 0 {
            return Err(Error::InvalidModel(
                "truncation depth must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomFreqModel {
    /// Point mass at one frequency vector.
    Fixed(FrequencyVector),
    StickBreaking(StickBreaking),
    /// Size-biased random order of fixed proper frequencies.
    SizeBiasedOfRanked(FrequencyVector),
}

impl RandomFreqModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            RandomFreqModel::Fixed(_) => Ok(()),
            RandomFreqModel::StickBreaking(sb) => sb.validate(),
            RandomFreqModel::SizeBiasedOfRanked(f) => {
                if f.is_proper() {
                    Ok(())
                } else {
                    Err(Error::Improper { dust: f.dust() })
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<FrequencyVector> {
        match self {
            RandomFreqModel::Fixed(f) => Ok(f.clone()),
            RandomFreqModel::StickBreaking(sb) => stickbreaking_freqs(sb, rng),
            RandomFreqModel::SizeBiasedOfRanked(f) => size_biased_permutation(f, rng),
        }
    }

    /// Exact law as weighted frequency vectors, for models with finite support.
    pub fn exact_support(&self) -> Result<Vec<(FrequencyVector, f64)>> {
        match self {
            RandomFreqModel::Fixed(f) => Ok(vec![(f.clone(), 1.0)]),
            RandomFreqModel::StickBreaking(_) => Err(Error::NotFinite),
            RandomFreqModel::SizeBiasedOfRanked(f) => Ok(size_biased_orderings(f)?
                .into_iter()
                .map(|(atoms, w)| (f.reordered(atoms), w))
                .collect()),
        }
    }
}

/// One stick-breaking draw: `P_k = H_k * prod_{i<k} (1 - H_i)`, leftover mass as dust.
pub fn stickbreaking_freqs<R: Rng + ?Sized>(
    model: &StickBreaking,
    rng: &mut R,
) -> Result<FrequencyVector> {
    model.validate()?;
    let beta = Beta::new(model.a, model.b)
        .map_err(|e| Error::InvalidModel(format!("beta({}, {}): {e}", model.a, model.b)))?;
    let attempts = if model.tail_tolerance.is_some() {
        CERTIFY_ATTEMPTS
    } else {
        1
    };
    for _ in 0..attempts {
        let mut atoms = Vec::with_capacity(model.depth);
        let mut remaining = 1.0;
        for _ in 0..model.depth {
            let h: f64 = beta.sample(rng);
            atoms.push(remaining * h);
            remaining *= 1.0 - h;
        }
        if model.tail_tolerance.is_some_and(|tol| remaining > tol) {
            continue;
        }
        return FrequencyVector::with_dust(atoms, remaining);
    }
    Err(Error::TailNotCertified {
        tolerance: model.tail_tolerance.unwrap_or(0.0),
        attempts,
    })
}

fn require_proper(f: &FrequencyVector) -> Result<()> {
    if f.dust() > MASS_TOL {
        Err(Error::Improper { dust: f.dust() })
    } else {
        Ok(())
    }
}

/// Successive picks without replacement, proportional to frequency. Zero atoms are dropped.
pub fn size_biased_permutation<R: Rng + ?Sized>(
    f: &FrequencyVector,
    rng: &mut R,
) -> Result<FrequencyVector> {
    require_proper(f)?;
    let mut remaining: Vec<f64> = f.atoms().iter().copied().filter(|&a| a > 0.0).collect();
    let mut order = Vec::with_capacity(remaining.len());
    while remaining.len() > 1 {
        let total: f64 = remaining.iter().sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = remaining.len() - 1;
        for (i, &a) in remaining.iter().enumerate() {
            acc += a;
            if target < acc {
                pick = i;
                break;
            }
        }
        order.push(remaining.remove(pick));
    }
    order.extend(remaining);
    Ok(f.reordered(order))
}

/// Every distinct size-biased ordering of the nonzero atoms with its probability.
pub fn size_biased_orderings(f: &FrequencyVector) -> Result<Vec<(Vec<f64>, f64)>> {
    fn rec(
        remaining: &mut Vec<f64>,
        prefix: &mut Vec<f64>,
        weight: f64,
        out: &mut Vec<(Vec<f64>, f64)>,
    ) {
        if remaining.is_empty() {
            match out.iter_mut().find(|(seq, _)| same_values(seq, prefix)) {
                Some((_, w)) => *w += weight,
                None => out.push((prefix.clone(), weight)),
            }
            return;
        }
        let total: f64 = remaining.iter().sum();
        for i in 0..remaining.len() {
            let a = remaining.remove(i);
            prefix.push(a);
            rec(remaining, prefix, weight * a / total, out);
            prefix.pop();
            remaining.insert(i, a);
        }
    }

    require_proper(f)?;
    let mut remaining: Vec<f64> = f.atoms().iter().copied().filter(|&a| a > 0.0).collect();
    if remaining.len() > 8 {
        return Err(Error::CapExceeded {
            what: "atoms for exact size-biased enumeration",
            requested: remaining.len(),
            cap: 8,
        });
    }
    let mut out = Vec::new();
    rec(&mut remaining, &mut Vec::new(), 1.0, &mut out);
    Ok(out)
}

pub(crate) fn same_values(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}
