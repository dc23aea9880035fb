//! Moment identities of frequencies in size-biased order.
//!
//! For exchangeable partitions, `E g(P_1..P_k) W = E g(P_sigma(1)..P_sigma(k)) W`
//! with weight `W = prod_{i<k} (1 - R_i)`. Taking
//! `g(x) = x_k / prod_{i<k} (1 - x_1 - ... - x_i)` turns the left side into
//! `E P_k`; each permutation `sigma` gives one identity.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::par_draws;
use crate::samplers::RandomFreqModel;
use crate::stats::Estimate;

/// The supported instances, named by the permutation applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Identity {
    /// `E P_2` via `sigma = (2, 1)`.
    #[serde(rename = "sigma-21")]
    Sigma21,
    /// `E P_3` via the cyclic `sigma = (2, 3, 1)`.
    #[serde(rename = "sigma-231")]
    Sigma231,
    #[serde(rename = "sigma-321")]
    Sigma321,
    #[serde(rename = "sigma-312")]
    Sigma312,
    #[serde(rename = "sigma-132")]
    Sigma132,
    #[serde(rename = "sigma-213")]
    Sigma213,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::Sigma21,
        Identity::Sigma231,
        Identity::Sigma321,
        Identity::Sigma312,
        Identity::Sigma132,
        Identity::Sigma213,
    ];

    /// 1-based permutation.
    pub fn sigma(self) -> &'static [usize] {
        match self {
            Identity::Sigma21 => &[2, 1],
            Identity::Sigma231 => &[2, 3, 1],
            Identity::Sigma321 => &[3, 2, 1],
            Identity::Sigma312 => &[3, 1, 2],
            Identity::Sigma132 => &[1, 3, 2],
            Identity::Sigma213 => &[2, 1, 3],
        }
    }

    pub fn name(self) -> String {
        let digits: String = self.sigma().iter().map(|d| d.to_string()).collect();
        format!("sigma-{digits}")
    }

    /// `(P_k, g(P_sigma) W)` for one frequency sequence.
    ///
    /// Factors `(1 - R_i) / (1 - S_i)` whose index sets coincide cancel to 1,
    /// where `S_i` sums the first `i` permuted frequencies.
    pub fn sides(self, atoms: &[f64]) -> (f64, f64) {
        let sigma = self.sigma();
        let k = sigma.len();
        let p = |i: usize| atoms.get(i - 1).copied().unwrap_or(0.0);
        let left = p(k);
        let mut right = p(sigma[k - 1]);
        let (mut r, mut s) = (0.0, 0.0);
        for i in 1..k {
            r += p(i);
            s += p(sigma[i - 1]);
            let same_set = {
                let mut head: Vec<usize> = sigma[..i].to_vec();
                head.sort_unstable();
                head.iter().copied().eq(1..=i)
            };
            if !same_set {
                right *= (1.0 - r) / (1.0 - s);
            }
        }
        (left, right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub mode: Mode,
    pub left: f64,
    pub right: f64,
    pub discrepancy: f64,
    /// Standard error of the per-draw difference; zero in exact mode.
    pub stderr: f64,
}

/// Evaluates both sides of `id` under `model`.
pub fn moment_identity(
    model: &RandomFreqModel,
    id: Identity,
    mode: Mode,
    samples: usize,
    seed: u64,
) -> Result<IdentityReport> {
    model.validate()?;
    let (left, right, stderr) = match mode {
        Mode::Exact => {
            let (mut left, mut right) = (0.0, 0.0);
            for (f, w) in model.exact_support()? {
                let (l, r) = id.sides(f.atoms());
                left += w * l;
                right += w * r;
            }
            (left, right, 0.0)
        }
        Mode::MonteCarlo => {
            let pairs = par_draws(seed, samples.max(1), |rng, _| {
                model.sample(rng).map(|f| id.sides(f.atoms()))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let l: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let r: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let d: Vec<f64> = pairs.iter().map(|p| p.0 - p.1).collect();
            (
                Estimate::from_samples(&l).mean,
                Estimate::from_samples(&r).mean,
                Estimate::from_samples(&d).stderr,
            )
        }
    };
    Ok(IdentityReport {
        identity: id.name(),
        mode,
        left,
        right,
        discrepancy: (left - right).abs(),
        stderr,
    })
}
