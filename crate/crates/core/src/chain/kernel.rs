//! Exact top-to-random kernels on the orderings of a finite proper multiset.

use std::collections::HashSet;
use std::io::Write;

use itertools::Itertools;
use rayon::prelude::*;

use crate::chain::steps::{insert_first_at, move_to_front};
use crate::engine::MASS_TOL;
use crate::error::{Error, Result};
use crate::samplers::{hazards, same_values};

/// Largest state space built exactly (all orderings of six distinct atoms).
pub const STATE_CAP: usize = 720;
/// Residual at which power iteration stops.
pub const STATIONARY_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 100_000;

/// Top-to-random chain over the distinct orderings of an atom multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOrderChain {
    states: Vec<Vec<f64>>,
    kernel: Vec<Vec<f64>>,
}

impl FiniteOrderChain {
    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    pub fn state_index(&self, atoms: &[f64]) -> Option<usize> {
        self.states.iter().position(|s| same_values(s, atoms))
    }

    /// One step of a row distribution: `dist * K`.
    pub fn step(&self, dist: &[f64]) -> Vec<f64> {
        let mut next = vec![0.0; self.states.len()];
        for (row, &w) in self.kernel.iter().zip(dist) {
            if w == 0.0 {
                continue;
            }
            for (out, &k) in next.iter_mut().zip(row) {
                *out += w * k;
            }
        }
        next
    }

    pub fn label(&self, i: usize) -> String {
        self.states[i].iter().map(|v| v.to_string()).join("|")
    }

    /// CSV matrix with state labels `v1|v2|...` on both axes.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["state".to_string()];
        header.extend((0..self.states.len()).map(|i| self.label(i)));
        w.write_record(&header)?;
        for (i, row) in self.kernel.iter().enumerate() {
            let mut record = vec![self.label(i)];
            record.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn validate_atoms(atoms: &[f64]) -> Result<()> {
    if atoms.is_empty() {
        return Err(Error::InvalidFrequency("no atoms".into()));
    }
    if let Some(bad) = atoms.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(Error::InvalidFrequency(format!(
            "exact kernels need strictly positive atoms, got {bad}"
        )));
    }
    let total: f64 = atoms.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::Improper { dust: 1.0 - total });
    }
    Ok(())
}

fn distinct_orderings(atoms: &[f64]) -> Result<Vec<Vec<f64>>> {
    let k = atoms.len();
    let too_many = |requested| Error::CapExceeded {
        what: "chain states",
        requested,
        cap: STATE_CAP,
    };
    if k > 9 {
        return Err(too_many(k));
    }
    let mut seen = HashSet::new();
    let mut states: Vec<Vec<f64>> = Vec::new();
    for perm in (0..k).permutations(k) {
        let seq: Vec<f64> = perm.iter().map(|&i| atoms[i]).collect();
        if seen.insert(seq.iter().map(|v| v.to_bits()).collect::<Vec<u64>>()) {
            states.push(seq);
            if states.len() > STATE_CAP {
                return Err(too_many(states.len()));
            }
        }
    }
    Ok(states)
}

/// Kernel over all distinct orderings of `atoms` (proper, strictly positive).
///
/// States are listed in permutation order of the input, so the input ordering
/// comes first.
pub fn exact_kernel(atoms: &[f64]) -> Result<FiniteOrderChain> {
    validate_atoms(atoms)?;
    let states = distinct_orderings(atoms)?;
    let k = atoms.len();
    let kernel = states
        .par_iter()
        .map(|s| {
            let h = hazards(s, k);
            let mut row = vec![0.0; states.len()];
            let mut survive = 1.0;
            for (x, &hx) in h.iter().enumerate() {
                // the last position takes the remaining mass
                let p = if x + 1 == k { survive } else { survive * hx };
                survive *= 1.0 - hx;
                let target = insert_first_at(s, x + 1);
                let t = states
                    .iter()
                    .position(|c| same_values(c, &target))
                    .expect("reordering of a state is a state");
                row[t] += p;
            }
            row
        })
        .collect();
    Ok(FiniteOrderChain { states, kernel })
}

/// Fixed row vector of the kernel by power iteration from uniform.
pub fn stationary_distribution(chain: &FiniteOrderChain) -> Result<Vec<f64>> {
    let n = chain.states.len();
    let mut pi = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let next = chain.step(&pi);
        residual = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if residual < STATIONARY_TOL {
            let total: f64 = pi.iter().sum();
            return Ok(pi.into_iter().map(|p| p / total).collect());
        }
    }
    Err(Error::NotConverged {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

/// Move-to-front kernel: from state `y`, the atom of value `v` goes first with probability `v`.
pub fn random_to_top_kernel(chain: &FiniteOrderChain) -> Vec<Vec<f64>> {
    chain
        .states
        .iter()
        .map(|s| {
            let mut row = vec![0.0; chain.states.len()];
            for (j, &v) in s.iter().enumerate() {
                let target = move_to_front(s, j + 1);
                let t = chain.state_index(&target).expect("reordering is a state");
                row[t] += v;
            }
            row
        })
        .collect()
}

/// `max |pi(x) P(x, y) - pi(y) Q(y, x)|` with `Q` the move-to-front kernel.
pub fn reversal_check(chain: &FiniteOrderChain, pi: &[f64]) -> f64 {
    let reverse = random_to_top_kernel(chain);
    let n = chain.states.len();
    let mut worst: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            let gap = pi[x] * chain.kernel[x][y] - pi[y] * reverse[y][x];
            worst = worst.max(gap.abs());
        }
    }
    worst
}

fn tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Worst total variation to `pi` over point-mass starts, after `t = 0..=steps` steps.
pub fn worst_start_tv(chain: &FiniteOrderChain, pi: &[f64], steps: usize) -> Vec<f64> {
    let n = chain.states.len();
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = vec![0.0; n];
            r[i] = 1.0;
            r
        })
        .collect();
    let mut out = Vec::with_capacity(steps + 1);
    for t in 0..=steps {
        out.push(rows.iter().map(|r| tv(r, pi)).fold(0.0, f64::max));
        if t < steps {
            rows = rows.iter().map(|r| chain.step(r)).collect();
        }
    }
    out
}
