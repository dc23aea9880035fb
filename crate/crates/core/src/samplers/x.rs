//! The number of clusters open when the first cluster receives its second element.

use rand::Rng;
use serde::Serialize;

use crate::engine::FrequencyVector;
use crate::error::{Error, Result};

/// Default number of customers seated before a draw of X is censored.
pub const STEP_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum XDraw {
    Finite(usize),
    /// The first cluster is a singleton (`P_1 = 0`).
    Infinite,
    /// No second element within the step cap.
    Censored,
}

/// Seats customers one at a time until one joins table 1, and reports the
/// number of tables open at that moment.
pub fn sample_x<R: Rng + ?Sized>(
    f: &FrequencyVector,
    rng: &mut R,
    step_cap: usize,
) -> Result<XDraw> {
    if step_cap < 2 {
        return Err(Error::InvalidModel(format!(
            "step cap must be at least 2, got {step_cap}"
        )));
    }
    let first = f.atom(0);
    if first <= 0.0 {
        return Ok(XDraw::Infinite);
    }
    let mut open = 1;
    let mut reach = first;
    for _ in 2..=step_cap {
        let u: f64 = rng.random();
        if u < first {
            return Ok(XDraw::Finite(open));
        }
        if u >= reach {
            reach += f.atom(open);
            open += 1;
        }
    }
    Ok(XDraw::Censored)
}

/// Stopping probabilities `H_1..H_j`: `H_1 = P_1`, `H_i = P_1 / (1 - P_2 - ... - P_i)`.
pub(crate) fn hazards(atoms: &[f64], j: usize) -> Vec<f64> {
    let first = atoms.first().copied().unwrap_or(0.0);
    let mut out = Vec::with_capacity(j);
    let mut others = 0.0;
    for i in 1..=j {
        if i >= 2 {
            others += atoms.get(i - 1).copied().unwrap_or(0.0);
        }
        let denom = 1.0 - others;
        out.push(if denom > 0.0 {
            (first / denom).min(1.0)
        } else {
            1.0
        });
    }
    out
}

fn require_first(f: &FrequencyVector) -> Result<()> {
    if f.atom(0) > 0.0 {
        Ok(())
    } else {
        Err(Error::UndefinedMass)
    }
}

/// `P(X = j | frequencies) = H_j * prod_{i<j} (1 - H_i)`, for `j >= 1`.
pub fn x_pmf(f: &FrequencyVector, j: usize) -> Result<f64> {
    require_first(f)?;
    if j == 0 {
        return Ok(0.0);
    }
    let h = hazards(f.atoms(), j);
    Ok(h[j - 1] * h[..j - 1].iter().map(|x| 1.0 - x).product::<f64>())
}

/// `P(X > j | frequencies) = prod_{i<=j} (1 - H_i)`.
pub fn x_tail(f: &FrequencyVector, j: usize) -> Result<f64> {
    require_first(f)?;
    Ok(hazards(f.atoms(), j).iter().map(|x| 1.0 - x).product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{par_draws, substream};
    use crate::stats::chi_square_gof;

    fn atoms(a: &[f64]) -> FrequencyVector {
        FrequencyVector::new(a.to_vec()).unwrap()
    }

    #[test]
    fn pmf_examples() {
        let f = atoms(&[0.5, 0.3, 0.2]);
        assert!((x_pmf(&f, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((x_pmf(&f, 2).unwrap() - 5.0 / 14.0).abs() < 1e-15);
        assert!((x_pmf(&f, 3).unwrap() - 1.0 / 7.0).abs() < 1e-15);
        assert!(x_pmf(&f, 4).unwrap().abs() < 1e-15);
        let half = FrequencyVector::new(vec![0.5]).unwrap();
        for j in 1..30 {
            assert!((x_pmf(&half, j).unwrap() - 0.5f64.powi(j as i32)).abs() < 1e-15);
        }
        assert_eq!(x_pmf(&atoms(&[1.0]), 1).unwrap(), 1.0);
        assert!(matches!(
            x_pmf(&FrequencyVector::all_dust(), 1),
            Err(Error::UndefinedMass)
        ));
    }

    #[test]
    fn partial_sums_match_tail() {
        let fs = [
            atoms(&[0.5, 0.3, 0.2]),
            FrequencyVector::new(vec![0.5]).unwrap(),
            FrequencyVector::new(vec![0.2, 0.3, 0.1, 0.05]).unwrap(),
        ];
        for f in &fs {
            let mut partial = 0.0;
            for j in 1..=40 {
                partial += x_pmf(f, j).unwrap();
                assert!((partial - (1.0 - x_tail(f, j).unwrap())).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pmf_matches_restaurant_path_sums() {
        // P(X = 2) as the geometric series over waits at table 2.
        let f = atoms(&[0.5, 0.3, 0.2]);
        let series: f64 = (0..200).map(|l| (1.0 - 0.5) * 0.3f64.powi(l) * 0.5).sum();
        assert!((x_pmf(&f, 2).unwrap() - series).abs() < 1e-15);
    }

    #[test]
    fn degenerate_draws() {
        let mut rng = substream(1, 0);
        for _ in 0..100 {
            assert_eq!(
                sample_x(&atoms(&[1.0]), &mut rng, STEP_CAP).unwrap(),
                XDraw::Finite(1)
            );
            assert_eq!(
                sample_x(&FrequencyVector::all_dust(), &mut rng, STEP_CAP).unwrap(),
                XDraw::Infinite
            );
        }
        assert!(sample_x(&atoms(&[1.0]), &mut rng, 1).is_err());
        let tiny = FrequencyVector::new(vec![1e-9]).unwrap();
        assert_eq!(sample_x(&tiny, &mut rng, 10).unwrap(), XDraw::Censored);
    }

    #[test]
    fn empirical_law_of_x() {
        let f = atoms(&[0.5, 0.3, 0.2]);
        let draws = par_draws(41, 100_000, |rng, _| sample_x(&f, rng, STEP_CAP).unwrap());
        let mut counts = [0u64; 3];
        for d in draws {
            match d {
                XDraw::Finite(j) => counts[j - 1] += 1,
                other => panic!("unexpected {other:?}"),
            }
        }
        let expected: Vec<f64> = (1..=3).map(|j| x_pmf(&f, j).unwrap()).collect();
        assert!(chi_square_gof(&counts, &expected).p_value > 1e-3);
    }
}
