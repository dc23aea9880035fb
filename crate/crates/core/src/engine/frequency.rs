use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for `sum(atoms) + dust = 1` and for properness.
pub const MASS_TOL: f64 = 1e-12;

/// Cluster frequencies in order of appearance plus the dust mass.
///
/// Atoms past the end of the list have frequency zero: clusters born from dust
/// are singletons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFrequencies", into = "RawFrequencies")]
pub struct FrequencyVector {
    atoms: Vec<f64>,
    dust: f64,
}

#[derive(Serialize, Deserialize)]
struct RawFrequencies {
    atoms: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dust: Option<f64>,
}

impl TryFrom<RawFrequencies> for FrequencyVector {
    type Error = Error;

    fn try_from(raw: RawFrequencies) -> Result<Self> {
        match raw.dust {
            Some(dust) => FrequencyVector::with_dust(raw.atoms, dust),
            None => FrequencyVector::new(raw.atoms),
        }
    }
}

impl From<FrequencyVector> for RawFrequencies {
    fn from(f: FrequencyVector) -> Self {
        RawFrequencies {
            atoms: f.atoms,
            dust: Some(f.dust),
        }
    }
}

impl FrequencyVector {
    /// Atoms with the dust taken as the remainder `1 - sum(atoms)`.
    pub fn new(atoms: Vec<f64>) -> Result<Self> {
        let total: f64 = atoms.iter().sum();
        let dust = if (1.0 - total).abs() <= MASS_TOL {
            0.0
        } else {
            1.0 - total
        };
        FrequencyVector::with_dust(atoms, dust)
    }

    pub fn with_dust(atoms: Vec<f64>, dust: f64) -> Result<Self> {
        if let Some(bad) = atoms
            .iter()
            .find(|a| !a.is_finite() || **a < 0.0 || **a > 1.0)
        {
            return Err(Error::InvalidFrequency(format!(
                "atom {bad} outside [0, 1]"
            )));
        }
        if !dust.is_finite() || !(-MASS_TOL..=1.0 + MASS_TOL).contains(&dust) {
            return Err(Error::InvalidFrequency(format!(
                "dust {dust} outside [0, 1]"
            )));
        }
        let total: f64 = atoms.iter().sum();
        if total > 1.0 + MASS_TOL {
            return Err(Error::InvalidFrequency(format!("atoms sum to {total} > 1")));
        }
        if (total + dust - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidFrequency(format!(
                "atoms {total} + dust {dust} != 1"
            )));
        }
        Ok(FrequencyVector {
            atoms,
            dust: dust.clamp(0.0, 1.0),
        })
    }

    /// No atoms; every element is a singleton.
    pub fn all_dust() -> Self {
        FrequencyVector {
            atoms: Vec::new(),
            dust: 1.0,
        }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn dust(&self) -> f64 {
        self.dust
    }

    /// Frequency of the `i`-th cluster, 0-based; zero past the list.
    pub fn atom(&self, i: usize) -> f64 {
        self.atoms.get(i).copied().unwrap_or(0.0)
    }

    /// `R_i`: the summed frequency of the first `i` clusters.
    pub fn cumulative(&self, i: usize) -> f64 {
        self.atoms.iter().take(i).sum()
    }

    /// Prefix sums `R_1, ..., R_len`.
    pub fn cumulative_sums(&self) -> Vec<f64> {
        self.atoms
            .iter()
            .scan(0.0, |acc, &a| {
                *acc += a;
                Some(*acc)
            })
            .collect()
    }

    /// `R_inf`, the total atomic mass.
    pub fn total(&self) -> f64 {
        self.atoms.iter().sum()
    }

    pub fn is_proper(&self) -> bool {
        self.dust <= MASS_TOL
    }

    /// Nonzero atoms in decreasing order.
    pub fn ranked(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self.atoms.iter().copied().filter(|&a| a > 0.0).collect();
        r.sort_by(|a, b| b.total_cmp(a));
        r
    }

    /// Same dust, new atom order; caller guarantees the multiset is preserved.
    pub(crate) fn reordered(&self, atoms: Vec<f64>) -> FrequencyVector {
        FrequencyVector {
            atoms,
            dust: self.dust,
        }
    }
}

impl fmt::Display for FrequencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "atoms(")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")?;
        if self.dust > 0.0 {
            write!(f, " + dust {}", self.dust)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FrequencyVector::new(vec![0.5, 0.3, 0.2])
            .unwrap()
            .is_proper());
        let f = FrequencyVector::new(vec![0.5]).unwrap();
        assert_eq!(f.dust(), 0.5);
        assert!(!f.is_proper());
        assert!(FrequencyVector::new(vec![0.7, 0.4]).is_err());
        assert!(FrequencyVector::new(vec![-0.1]).is_err());
        assert!(FrequencyVector::with_dust(vec![0.5], 0.4).is_err());
        assert!(FrequencyVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn views() {
        let f = FrequencyVector::new(vec![0.2, 0.5, 0.0, 0.3]).unwrap();
        assert_eq!(f.atom(1), 0.5);
        assert_eq!(f.atom(9), 0.0);
        assert!((f.cumulative(2) - 0.7).abs() < 1e-15);
        assert_eq!(f.ranked(), vec![0.5, 0.3, 0.2]);
        assert_eq!(f.cumulative_sums().len(), 4);
    }

    #[test]
    fn json_round_trip() {
        let f = FrequencyVector::with_dust(vec![0.25], 0.75).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: FrequencyVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let implicit: FrequencyVector = serde_json::from_str(r#"{"atoms":[0.6,0.4]}"#).unwrap();
        assert!(implicit.is_proper());
        assert!(serde_json::from_str::<FrequencyVector>(r#"{"atoms":[0.9,0.4]}"#).is_err());
    }
}
