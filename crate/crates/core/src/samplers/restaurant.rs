//! Fixed-frequency Chinese restaurant, paintbox, and the coupling of the two
//! driven by shared uniforms.

use rand::Rng;
use serde::Serialize;

use crate::engine::FrequencyVector;
use crate::error::{Error, Result};
use crate::partition::SetPartition;
use crate::rng::par_draws;
use crate::stats::Estimate;

/// Table for uniform `u` when `open` tables exist: `Some(j)` (0-based) if `u`
/// falls in `[R_j, R_{j+1})` with `j < open`, `None` for a new table.
fn seat(u: f64, cumulative: &[f64], open: usize) -> Option<usize> {
    let reach = open.min(cumulative.len());
    if reach == 0 || u >= cumulative[reach - 1] {
        return None;
    }
    Some(cumulative[..reach].partition_point(|&r| r <= u))
}

/// Atom whose interval `[R_{j-1}, R_j)` contains `u`; `None` in the dust.
fn paint(u: f64, cumulative: &[f64]) -> Option<usize> {
    seat(u, cumulative, cumulative.len())
}

fn crp_alloc(uniforms: &[f64], cumulative: &[f64]) -> Vec<usize> {
    let mut alloc = Vec::with_capacity(uniforms.len());
    let mut open = 0;
    for (i, &u) in uniforms.iter().enumerate() {
        let table = if i == 0 {
            None
        } else {
            seat(u, cumulative, open)
        };
        match table {
            Some(j) => alloc.push(j + 1),
            None => {
                open += 1;
                alloc.push(open);
            }
        }
    }
    alloc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Paint {
    Atom(usize),
    Dust(usize),
}

fn paint_labels(uniforms: &[f64], cumulative: &[f64]) -> Vec<Paint> {
    uniforms
        .iter()
        .enumerate()
        .map(|(i, &u)| paint(u, cumulative).map_or(Paint::Dust(i), Paint::Atom))
        .collect()
}

fn require_elements(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidPartition("need at least one element".into()))
    } else {
        Ok(())
    }
}

/// Partition of `[n]` from the restaurant with fixed table frequencies `f`.
pub fn crp_sample<R: Rng + ?Sized>(
    f: &FrequencyVector,
    n: usize,
    rng: &mut R,
) -> Result<SetPartition> {
    require_elements(n)?;
    let cumulative = f.cumulative_sums();
    // customer 1 consumes no randomness
    let uniforms: Vec<f64> = std::iter::once(0.0)
        .chain((1..n).map(|_| rng.random::<f64>()))
        .collect();
    SetPartition::from_alloc(crp_alloc(&uniforms, &cumulative))
}

/// Partition of `[n]` from i.i.d. uniforms painted by the atom intervals of `f`.
pub fn paintbox_sample<R: Rng + ?Sized>(
    f: &FrequencyVector,
    n: usize,
    rng: &mut R,
) -> Result<SetPartition> {
    require_elements(n)?;
    let cumulative = f.cumulative_sums();
    let uniforms: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    SetPartition::from_labels(&paint_labels(&uniforms, &cumulative))
}

/// Both window partitions of one coupled draw, plus what is needed to audit it.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledDraw {
    /// Restaurant partition restricted to `{n+1, ..., n+m}`.
    pub restaurant: SetPartition,
    /// Paintbox partition restricted to the same window.
    pub paintbox: SetPartition,
    pub mismatch: bool,
    /// `R_inf - R_{K_n}`.
    pub deficit: f64,
    /// `K_n`, tables opened by elements `1..=n`; zero when `n = 0`.
    pub tables_open: usize,
    /// Raw restaurant table (1-based) of each window element.
    pub window_tables: Vec<usize>,
    /// Raw atom (1-based) of each window element, `None` in the dust.
    pub window_atoms: Vec<Option<usize>>,
}

/// Runs the restaurant and the paintbox on the same uniforms `U_1..U_{n+m}`.
pub fn coupled_sample<R: Rng + ?Sized>(
    f: &FrequencyVector,
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<CoupledDraw> {
    require_elements(m)?;
    let cumulative = f.cumulative_sums();
    let uniforms: Vec<f64> = (0..n + m).map(|_| rng.random::<f64>()).collect();
    let alloc = crp_alloc(&uniforms, &cumulative);
    let labels = paint_labels(&uniforms, &cumulative);

    let tables_open = alloc[..n].iter().copied().max().unwrap_or(0);
    let deficit = (f.total() - f.cumulative(tables_open)).max(0.0);
    let restaurant = SetPartition::from_labels(&alloc[n..])?;
    let paintbox = SetPartition::from_labels(&labels[n..])?;
    Ok(CoupledDraw {
        mismatch: restaurant != paintbox,
        restaurant,
        paintbox,
        deficit,
        tables_open,
        window_tables: alloc[n..].to_vec(),
        window_atoms: labels[n..]
            .iter()
            .map(|l| match l {
                Paint::Atom(j) => Some(j + 1),
                Paint::Dust(_) => None,
            })
            .collect(),
    })
}

/// Empirical mismatch rate against the bound `m * E(R_inf - R_{K_n})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingEstimate {
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub mismatch: Estimate,
    /// `m * deficit`.
    pub bound: Estimate,
    /// Per-draw `m * deficit - mismatch`; its standard error is the joint one.
    pub slack: Estimate,
}

impl CouplingEstimate {
    /// Mismatch rate at most the bound plus `sigmas` joint standard errors.
    pub fn holds(&self, sigmas: f64) -> bool {
        self.mismatch.mean <= self.bound.mean + sigmas * self.slack.stderr
    }
}

/// Monte Carlo over `samples` coupled draws, seeded per draw.
pub fn coupling_bound(
    f: &FrequencyVector,
    n: usize,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<CouplingEstimate> {
    let draws = par_draws(seed, samples.max(1), |rng, _| {
        coupled_sample(f, n, m, rng).map(|d| (d.mismatch, d.deficit))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mismatch: Vec<f64> = draws.iter().map(|&(x, _)| f64::from(u8::from(x))).collect();
    let bound: Vec<f64> = draws.iter().map(|&(_, d)| m as f64 * d).collect();
    let slack: Vec<f64> = bound.iter().zip(&mismatch).map(|(b, x)| b - x).collect();
    Ok(CouplingEstimate {
        n,
        m,
        samples: draws.len(),
        mismatch: Estimate::from_samples(&mismatch),
        bound: Estimate::from_samples(&bound),
        slack: Estimate::from_samples(&slack),
    })
}
