use std::collections::BTreeMap;

use crate::engine::table::{PeppfTable, ADDITION_TOL};
use crate::error::{Error, Result};
use crate::partition::{enumerate_partitions, Composition, SetPartition};

/// Exact distribution over the partitions of `[m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionLaw {
    m: usize,
    probabilities: BTreeMap<SetPartition, f64>,
}

impl PartitionLaw {
    /// Law assigning each partition of `[m]` the value `prob(composition)`.
    pub fn from_fn<F>(m: usize, cap: usize, prob: F) -> Result<Self>
    where
        F: Fn(&Composition) -> f64,
    {
        let probabilities: BTreeMap<_, _> = enumerate_partitions(m, cap)?
            .map(|p| {
                let v = prob(&p.composition());
                (p, v)
            })
            .collect();
        let law = PartitionLaw { m, probabilities };
        law.check_mass()?;
        Ok(law)
    }

    /// Unchecked law from explicit entries.
    pub fn from_entries(m: usize, entries: impl IntoIterator<Item = (SetPartition, f64)>) -> Self {
        PartitionLaw {
            m,
            probabilities: entries.into_iter().collect(),
        }
    }

    fn check_mass(&self) -> Result<()> {
        let mass = self.total_mass();
        let negative = self.probabilities.values().any(|&v| v < -ADDITION_TOL);
        if negative || (mass - 1.0).abs() > ADDITION_TOL {
            return Err(Error::Mass { m: self.m, mass });
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.values().sum()
    }

    /// Probability of `p`; zero for partitions absent from the support.
    pub fn prob(&self, p: &SetPartition) -> f64 {
        self.probabilities.get(p).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SetPartition, f64)> {
        self.probabilities.iter().map(|(p, &v)| (p, v))
    }
}

/// Law of the partition of `[m]` induced by a PEPPF table.
pub fn partition_law(t: &PeppfTable, m: usize, cap: usize) -> Result<PartitionLaw> {
    if m > t.max_level() {
        return Err(Error::CapExceeded {
            what: "ground set size above table level",
            requested: m,
            cap: t.max_level(),
        });
    }
    PartitionLaw::from_fn(m, cap, |c| t.at(c))
}

/// Half the L1 distance between two laws on the same ground set.
pub fn tv_distance(a: &PartitionLaw, b: &PartitionLaw) -> Result<f64> {
    if a.m != b.m {
        return Err(Error::GroundSetMismatch {
            left: a.m,
            right: b.m,
        });
    }
    let mut l1 = 0.0;
    for (p, v) in a.iter() {
        l1 += (v - b.prob(p)).abs();
    }
    for (p, v) in b.iter() {
        if !a.probabilities.contains_key(p) {
            l1 += v.abs();
        }
    }
    Ok((0.5 * l1).clamp(0.0, 1.0))
}
