//! Total-variation distance between shifted windows and their exchangeable limit.
//!
//! Two routes compute the same sequence. The table route shifts a PEPPF table
//! `n` times, so it needs level `m + n_max`. The chain route propagates the
//! order-of-appearance frequencies through the exact top-to-random kernel and
//! mixes extreme PEPPFs over the resulting law; it handles large `n` but only
//! proper, strictly positive, finite atoms.

use serde::Serialize;

use crate::chain::exact_kernel;
use crate::engine::law::{partition_law, tv_distance, PartitionLaw};
use crate::engine::table::{build_table, shift_peppf};
use crate::engine::{extreme_peppf, paintbox_eppf, FrequencyVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileRoute {
    Table,
    Chain,
}

/// `tv[n]` is the distance after `n` shifts, `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceProfile {
    pub m: usize,
    pub route: ProfileRoute,
    pub tv: Vec<f64>,
}

impl ConvergenceProfile {
    pub fn last(&self) -> f64 {
        *self.tv.last().expect("profile has n = 0")
    }

    /// Fails unless the final distance is below `threshold`.
    pub fn check_threshold(&self, threshold: f64) -> Result<()> {
        if self.last() < threshold {
            Ok(())
        } else {
            Err(Error::AboveThreshold {
                last: self.last(),
                threshold,
            })
        }
    }
}

fn limit_law(f: &FrequencyVector, m: usize, cap: usize) -> Result<PartitionLaw> {
    PartitionLaw::from_fn(m, cap, |c| paintbox_eppf(f, c))
}

/// Table route; refuses `m + n_max` above `cap`.
pub fn convergence_profile(
    f: &FrequencyVector,
    m: usize,
    n_max: usize,
    cap: usize,
) -> Result<ConvergenceProfile> {
    let limit = limit_law(f, m, cap)?;
    let mut table = build_table(|c| extreme_peppf(f, c), m + n_max, cap, "extreme")?;
    let mut tv = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        tv.push(tv_distance(&partition_law(&table, m, cap)?, &limit)?);
        if n < n_max {
            table = shift_peppf(&table)?;
        }
    }
    Ok(ConvergenceProfile {
        m,
        route: ProfileRoute::Table,
        tv,
    })
}

/// Chain route; `f` must be proper with strictly positive atoms.
pub fn convergence_profile_by_chain(
    f: &FrequencyVector,
    m: usize,
    n_max: usize,
    cap: usize,
) -> Result<ConvergenceProfile> {
    let chain = exact_kernel(f.atoms())?;
    let limit = limit_law(f, m, cap)?;
    let start = chain
        .state_index(f.atoms())
        .expect("initial ordering is a state");
    let mut dist = vec![0.0; chain.states().len()];
    dist[start] = 1.0;

    let mut tv = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let law = PartitionLaw::from_fn(m, cap, |c| {
            chain
                .states()
                .iter()
                .zip(&dist)
                .filter(|(_, &w)| w > 0.0)
                .map(|(s, &w)| w * extreme_peppf(&f.reordered(s.clone()), c))
                .sum()
        })?;
        tv.push(tv_distance(&law, &limit)?);
        if n < n_max {
            dist = chain.step(&dist);
        }
    }
    Ok(ConvergenceProfile {
        m,
        route: ProfileRoute::Chain,
        tv,
    })
}

/// Table route when `m + n_max <= cap`, chain route otherwise.
pub fn convergence_profile_auto(
    f: &FrequencyVector,
    m: usize,
    n_max: usize,
    cap: usize,
) -> Result<ConvergenceProfile> {
    if m + n_max <= cap {
        convergence_profile(f, m, n_max, cap)
    } else {
        convergence_profile_by_chain(f, m, n_max, cap).map_err(|e| match e {
            Error::InvalidFrequency(_) | Error::Improper { .. } => Error::CapExceeded {
                what: "table level m + n_max",
                requested: m + n_max,
                cap,
            },
            other => other,
        })
    }
}
