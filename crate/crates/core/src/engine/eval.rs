//! Pointwise evaluation of partition probability functions.

use crate::engine::FrequencyVector;
use crate::error::Result;
use crate::partition::Composition;
use crate::rng::par_draws;
use crate::samplers::RandomFreqModel;
use crate::stats::Estimate;

/// PEPPF of the partition with fixed frequencies `f`:
/// `prod_i (1 - R_{i-1}) * P_i^(n_i - 1)`, with `0^0 = 1`.
pub fn extreme_peppf(f: &FrequencyVector, c: &Composition) -> f64 {
    let mut prob = 1.0;
    let mut cumulative = 0.0_f64;
    for (i, &size) in c.parts().iter().enumerate() {
        let p = f.atom(i);
        // powi(0) is 1 even for p = 0
        prob *= (1.0 - cumulative).max(0.0) * p.powi(size as i32 - 1);
        cumulative += p;
    }
    prob
}

/// Probability that an i.i.d. paintbox sample of size `n` induces one given
/// partition of composition `c`.
///
/// Sums over injective assignments of clusters to atoms, where singleton
/// clusters may also land in the dust. Parts are visited in decreasing order,
/// so the value is bit-for-bit identical for every rearrangement of `c`.
pub fn paintbox_eppf(f: &FrequencyVector, c: &Composition) -> f64 {
    fn assign(parts: &[usize], atoms: &[f64], used: &mut [bool], dust: f64) -> f64 {
        let Some((&size, rest)) = parts.split_first() else {
            return 1.0;
        };
        let mut total = 0.0;
        for j in 0..atoms.len() {
            if used[j] || atoms[j] <= 0.0 {
                continue;
            }
            used[j] = true;
            total += atoms[j].powi(size as i32) * assign(rest, atoms, used, dust);
            used[j] = false;
        }
        if size == 1 && dust > 0.0 {
            total += dust * assign(rest, atoms, used, dust);
        }
        total
    }

    let parts = c.sorted_parts();
    let mut used = vec![false; f.atoms().len()];
    assign(&parts, f.atoms(), &mut used, f.dust())
}

/// Monte Carlo estimate of `E extreme_peppf(F, c)` over frequencies `F` drawn from `model`.
pub fn mc_peppf(
    model: &RandomFreqModel,
    c: &Composition,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    let values = par_draws(seed, samples.max(1), |rng, _| {
        model.sample(rng).map(|f| extreme_peppf(&f, c))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_samples(&values))
}
