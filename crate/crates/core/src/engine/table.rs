//! Tabulated partition probability functions and the operators acting on them.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{compositions_of, compositions_up_to, Composition};

/// Default bound on the table level.
pub const TABLE_CAP: usize = 10;
/// Tolerance for `p(1) = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Tolerance for the addition rules and accumulated mass checks.
pub const ADDITION_TOL: f64 = 1e-10;

/// Values of a partition probability function on all compositions of `n <= max_level`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeppfTable {
    max_level: usize,
    generator: String,
    values: BTreeMap<Composition, f64>,
}

/// Worst violation of the addition rules.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub argmax: Option<Composition>,
}

/// Largest difference between two rearrangements of the same parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub symmetric: bool,
    pub max_asymmetry: f64,
    pub witness: Option<((Composition, f64), (Composition, f64))>,
}

impl PeppfTable {
    /// Tabulates `eval` without validating; see [`build_table`].
    pub fn tabulate<F>(eval: F, max_level: usize, cap: usize, generator: &str) -> Result<Self>
    where
        F: Fn(&Composition) -> f64 + Sync,
    {
        check_level(max_level, cap)?;
        let comps = compositions_up_to(max_level);
        let vals: Vec<f64> = comps.par_iter().map(&eval).collect();
        Ok(PeppfTable {
            max_level,
            generator: generator.to_string(),
            values: comps.into_iter().zip(vals).collect(),
        })
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn generator(&self) -> &str {
        &self.generator
    }

    /// Value at `c`; `None` above the table level.
    pub fn get(&self, c: &Composition) -> Option<f64> {
        self.values.get(c).copied()
    }

    pub(crate) fn at(&self, c: &Composition) -> f64 {
        self.values[c]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Composition, f64)> {
        self.values.iter().map(|(c, &v)| (c, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks range, normalization and the addition rules.
    pub fn validate(&self) -> Result<ResidualReport> {
        for (c, v) in self.iter() {
            if !v.is_finite() || !(-NORMALIZATION_TOL..=1.0 + NORMALIZATION_TOL).contains(&v) {
                return Err(Error::OutOfRange {
                    composition: c.to_string(),
                    value: v,
                });
            }
        }
        let one = Composition::new(vec![1]).expect("nonempty");
        let p1 = self.at(&one);
        if (p1 - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Normalization { value: p1 });
        }
        let report = check_addition_rules(self);
        if report.max_residual >= ADDITION_TOL {
            return Err(Error::AdditionRule {
                composition: report
                    .argmax
                    .as_ref()
                    .map(ToString::to_string)
                    .unwrap_or_default(),
                residual: report.max_residual,
            });
        }
        Ok(report)
    }

    pub fn to_json(&self) -> TableFile {
        TableFile {
            header: TableHeader {
                max_level: self.max_level,
                generator: self.generator.clone(),
            },
            values: self.iter().map(|(c, v)| (c.to_string(), v)).collect(),
        }
    }

    /// Reads a table without validating it.
    pub fn from_json(file: &TableFile) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (key, &v) in &file.values {
            let c: Composition = key.parse()?;
            if c.size() > file.header.max_level {
                return Err(Error::Parse(format!(
                    "composition {key} above level {}",
                    file.header.max_level
                )));
            }
            values.insert(c, v);
        }
        if file.header.max_level == 0 {
            return Err(Error::Parse("table level must be positive".into()));
        }
        if let Some(missing) = compositions_up_to(file.header.max_level)
            .into_iter()
            .find(|c| !values.contains_key(c))
        {
            return Err(Error::Parse(format!("missing composition {missing}")));
        }
        Ok(PeppfTable {
            max_level: file.header.max_level,
            generator: file.header.generator.clone(),
            values,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: TableFile = serde_json::from_str(&text)?;
        PeppfTable::from_json(&file)
    }
}

/// On-disk table: `{"header": {...}, "values": {"2-1": 0.24, ...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableFile {
    pub header: TableHeader,
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableHeader {
    pub max_level: usize,
    pub generator: String,
}

fn check_level(max_level: usize, cap: usize) -> Result<()> {
    if max_level == 0 {
        return Err(Error::InvalidComposition(
            "table level must be positive".into(),
        ));
    }
    if max_level > cap {
        return Err(Error::CapExceeded {
            what: "table level",
            requested: max_level,
            cap,
        });
    }
    Ok(())
}

/// Tabulates `eval` up to `max_level` and rejects tables that are not a valid PEPPF.
pub fn build_table<F>(eval: F, max_level: usize, cap: usize, generator: &str) -> Result<PeppfTable>
where
    F: Fn(&Composition) -> f64 + Sync,
{
    let table = PeppfTable::tabulate(eval, max_level, cap, generator)?;
    table.validate()?;
    Ok(table)
}

/// `p(c) - p(c, 1) - sum_i p(c with part i incremented)` for every `c` below the top level.
pub fn check_addition_rules(t: &PeppfTable) -> ResidualReport {
    let mut report = ResidualReport {
        max_residual: 0.0,
        argmax: None,
    };
    for n in 1..t.max_level {
        for c in compositions_of(n) {
            let children: f64 = t.at(&c.with_new_singleton())
                + (0..c.len()).map(|i| t.at(&c.incremented(i))).sum::<f64>();
            let residual = (t.at(&c) - children).abs();
            if residual > report.max_residual || report.argmax.is_none() {
                report.max_residual = residual;
                report.argmax = Some(c);
            }
        }
    }
    report
}

/// PEPPF of the partition with element 1 removed and the rest relabeled.
///
/// Element 1 either was a singleton, giving `p(1, c)`, or belonged to the
/// cluster that is `i`-th in the window. That cluster then has least element
/// 1 and comes first, giving `p(n_i + 1, c without part i)`.
pub fn shift_peppf(t: &PeppfTable) -> Result<PeppfTable> {
    let shifted = shift_with(t, Composition::incremented_to_front)?;
    shifted.validate()?;
    Ok(shifted)
}

/// Shift variant that increments the absorbing part where it stands.
///
/// Agrees with [`shift_peppf`] on symmetric tables only and does not preserve
/// normalization in general. Kept unvalidated as a regression reference.
pub fn shift_in_place_increment(t: &PeppfTable) -> Result<PeppfTable> {
    shift_with(t, Composition::incremented)
}

fn shift_with(
    t: &PeppfTable,
    absorb: fn(&Composition, usize) -> Composition,
) -> Result<PeppfTable> {
    if t.max_level < 2 {
        return Err(Error::InvalidComposition(
            "shifting needs a table of level at least 2".into(),
        ));
    }
    let max_level = t.max_level - 1;
    let comps = compositions_up_to(max_level);
    let vals: Vec<f64> = comps
        .par_iter()
        .map(|c| {
            t.at(&c.with_leading_singleton())
                + (0..c.len()).map(|i| t.at(&absorb(c, i))).sum::<f64>()
        })
        .collect();
    Ok(PeppfTable {
        max_level,
        generator: format!("shift({})", t.generator),
        values: comps.into_iter().zip(vals).collect(),
    })
}

/// Largest and smallest value among rearrangements of one multiset of parts.
type Extremes = ((Composition, f64), (Composition, f64));

/// Compares every composition with all rearrangements of its parts.
pub fn is_symmetric(t: &PeppfTable, tol: f64) -> SymmetryReport {
    let mut groups: HashMap<Vec<usize>, Extremes> = HashMap::new();
    // iterate in table order so the witness is deterministic
    for (c, v) in t.iter() {
        groups
            .entry(c.sorted_parts())
            .and_modify(|(lo, hi)| {
                if v < lo.1 {
                    *lo = (c.clone(), v);
                }
                if v > hi.1 {
                    *hi = (c.clone(), v);
                }
            })
            .or_insert_with(|| ((c.clone(), v), (c.clone(), v)));
    }
    let mut worst: Option<((Composition, f64), (Composition, f64))> = None;
    let mut max_asymmetry = 0.0;
    let mut keys: Vec<_> = groups.keys().cloned().collect();
    keys.sort();
    for key in keys {
        let (lo, hi) = &groups[&key];
        let gap = hi.1 - lo.1;
        if gap > max_asymmetry {
            max_asymmetry = gap;
            worst = Some((hi.clone(), lo.clone()));
        }
    }
    SymmetryReport {
        symmetric: max_asymmetry <= tol,
        max_asymmetry,
        witness: worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{extreme_peppf, paintbox_eppf, FrequencyVector};

    fn atoms(a: &[f64]) -> FrequencyVector {
        FrequencyVector::new(a.to_vec()).unwrap()
    }

    fn comp(parts: &[usize]) -> Composition {
        Composition::new(parts.to_vec()).unwrap()
    }

    fn extreme_table(f: &FrequencyVector, level: usize) -> PeppfTable {
        build_table(|c| extreme_peppf(f, c), level, TABLE_CAP, "extreme").unwrap()
    }

    fn paintbox_table(f: &FrequencyVector, level: usize) -> PeppfTable {
        build_table(|c| paintbox_eppf(f, c), level, TABLE_CAP, "paintbox").unwrap()
    }

    #[test]
    fn build_examples() {
        let t = extreme_table(&atoms(&[0.6, 0.4]), 4);
        assert!(check_addition_rules(&t).max_residual < 1e-12);
        assert_eq!(t.len(), 15);
        let t = paintbox_table(&atoms(&[0.6, 0.4]), 4);
        assert!(is_symmetric(&t, 1e-12).symmetric);
    }

    #[test]
    fn broken_table_rejected_at_level_one() {
        let err = build_table(
            |c| if c.parts() == [1] { 1.0 } else { 0.0 },
            3,
            TABLE_CAP,
            "broken",
        )
        .unwrap_err();
        match err {
            Error::AdditionRule {
                composition,
                residual,
            } => {
                assert_eq!(composition, "1");
                assert_eq!(residual, 1.0);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn table_cap_enforced() {
        assert!(matches!(
            PeppfTable::tabulate(|_| 0.0, 11, TABLE_CAP, "x"),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn addition_rules_for_three_atoms() {
        let t = extreme_table(&atoms(&[0.5, 0.3, 0.2]), 6);
        assert!(check_addition_rules(&t).max_residual < 1e-12);
    }

    #[test]
    fn shift_examples() {
        let t = extreme_table(&atoms(&[0.6, 0.4]), 4);
        let s = shift_peppf(&t).unwrap();
        assert_eq!(s.max_level(), 3);
        assert!((s.at(&comp(&[2])) - 0.52).abs() < 1e-12);
        assert!((s.at(&comp(&[1, 1])) - 0.48).abs() < 1e-12);
    }

    #[test]
    fn in_place_variant_loses_mass() {
        let t = extreme_table(&atoms(&[0.6, 0.4]), 3);
        let s = shift_in_place_increment(&t).unwrap();
        let mass = s.at(&comp(&[2])) + s.at(&comp(&[1, 1]));
        assert!((mass - 0.92).abs() < 1e-12);
        let report = check_addition_rules(&s);
        assert!((report.max_residual - 0.08).abs() < 1e-12);
        assert_eq!(report.argmax, Some(comp(&[1])));
        assert!(s.validate().is_err());
    }

    #[test]
    fn paintbox_tables_are_shift_invariant() {
        for f in [
            atoms(&[0.6, 0.4]),
            atoms(&[0.5, 0.3, 0.2]),
            FrequencyVector::new(vec![0.5]).unwrap(),
            FrequencyVector::new(vec![0.3, 0.25]).unwrap(),
        ] {
            let t = paintbox_table(&f, 7);
            let s = shift_peppf(&t).unwrap();
            for (c, v) in s.iter() {
                assert!((v - t.at(c)).abs() < 1e-12, "{f} at {c}");
            }
        }
    }

    #[test]
    fn symmetry_witness() {
        let report = is_symmetric(&extreme_table(&atoms(&[0.6, 0.4]), 3), 1e-12);
        assert!(!report.symmetric);
        let ((hi_c, hi), (lo_c, lo)) = report.witness.unwrap();
        assert_eq!(hi_c, comp(&[2, 1]));
        assert_eq!(lo_c, comp(&[1, 2]));
        assert!((hi - 0.24).abs() < 1e-15);
        assert!((lo - 0.16).abs() < 1e-15);
        let level_one = extreme_table(&atoms(&[0.6, 0.4]), 1);
        assert!(is_symmetric(&level_one, 0.0).symmetric);
    }

    #[test]
    fn json_round_trip() {
        let t = extreme_table(&atoms(&[0.5, 0.3, 0.2]), 5);
        let text = serde_json::to_string(&t.to_json()).unwrap();
        let file: TableFile = serde_json::from_str(&text).unwrap();
        let back = PeppfTable::from_json(&file).unwrap();
        assert_eq!(back, t);
        back.validate().unwrap();
    }

    #[test]
    fn import_rejects_incomplete_tables() {
        let mut file = extreme_table(&atoms(&[0.6, 0.4]), 3).to_json();
        file.values.remove("1-2");
        assert!(PeppfTable::from_json(&file).is_err());
    }
}
