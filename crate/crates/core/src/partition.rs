//! Set partitions of `[n]` in restricted-growth form and compositions of `n`.
//!
//! A partition is stored only as its allocation sequence `A_1..A_n` with
//! 1-based cluster labels in order of appearance. Cluster lists are derived.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default bound on `m` for exhaustive enumeration (Bell(10) = 115975).
pub const ENUMERATION_CAP: usize = 10;

/// Ordered cluster sizes, in order of appearance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition(Vec<usize>);

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidComposition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidComposition(format!("zero part in {parts:?}")));
        }
        Ok(Composition(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Total `n`.
    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of parts `k`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Appends a singleton part.
    pub fn with_new_singleton(&self) -> Composition {
        let mut parts = self.0.clone();
        parts.push(1);
        Composition(parts)
    }

    /// Prepends a singleton part.
    pub fn with_leading_singleton(&self) -> Composition {
        let mut parts = Vec::with_capacity(self.0.len() + 1);
        parts.push(1);
        parts.extend_from_slice(&self.0);
        Composition(parts)
    }

    /// Increments part `i` where it stands.
    pub fn incremented(&self, i: usize) -> Composition {
        let mut parts = self.0.clone();
        parts[i] += 1;
        Composition(parts)
    }

    /// Increments part `i` and moves it to the front.
    pub fn incremented_to_front(&self, i: usize) -> Composition {
        let mut parts = Vec::with_capacity(self.0.len());
        parts.push(self.0[i] + 1);
        parts.extend(
            self.0
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &p)| p),
        );
        Composition(parts)
    }

    /// Parts sorted in decreasing order; equal for all rearrangements.
    pub fn sorted_parts(&self) -> Vec<usize> {
        let mut parts = self.0.clone();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for Composition {
    type Err = Error;

    /// Parses the table key form `"n1-n2-...-nk"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split('-')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("composition {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Composition::new(parts)
    }
}

impl serde::Serialize for Composition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// All compositions of `n`, in lexicographic order of their parts.
pub fn compositions_of(n: usize) -> Vec<Composition> {
    fn rec(remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if remaining == 0 {
            out.push(Composition(prefix.clone()));
            return;
        }
        for first in 1..=remaining {
            prefix.push(first);
            rec(remaining - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(1 << n.saturating_sub(1));
    if n > 0 {
        rec(n, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// All compositions of every `n` in `1..=max_level`, level by level.
pub fn compositions_up_to(max_level: usize) -> Vec<Composition> {
    (1..=max_level).flat_map(compositions_of).collect()
}

/// A partition of `[n]` encoded by its allocation sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    alloc: Vec<usize>,
}

impl SetPartition {
    /// Validates a restricted-growth allocation sequence with 1-based labels.
    pub fn from_alloc(alloc: Vec<usize>) -> Result<Self> {
        if alloc.is_empty() {
            return Err(Error::InvalidPartition("empty allocation sequence".into()));
        }
        let mut max = 0;
        for (i, &a) in alloc.iter().enumerate() {
            if a == 0 || a > max + 1 {
                return Err(Error::InvalidPartition(format!(
                    "label {a} at position {} breaks restricted growth",
                    i + 1
                )));
            }
            max = max.max(a);
        }
        Ok(SetPartition { alloc })
    }

    /// Canonical relabeling of arbitrary labels by order of first appearance.
    pub fn from_labels<T: PartialEq>(labels: &[T]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidPartition("no elements".into()));
        }
        let mut seen: Vec<&T> = Vec::new();
        let alloc = labels
            .iter()
            .map(|l| match seen.iter().position(|s| *s == l) {
                Some(i) => i + 1,
                None => {
                    seen.push(l);
                    seen.len()
                }
            })
            .collect();
        Ok(SetPartition { alloc })
    }

    /// Builds a partition from clusters of 1-based elements covering `[n]`.
    pub fn from_clusters(clusters: &[Vec<usize>]) -> Result<Self> {
        let n: usize = clusters.iter().map(Vec::len).sum();
        let mut labels = vec![0usize; n];
        for (j, cluster) in clusters.iter().enumerate() {
            if cluster.is_empty() {
                return Err(Error::InvalidPartition("empty cluster".into()));
            }
            for &e in cluster {
                if e == 0 || e > n || labels[e - 1] != 0 {
                    return Err(Error::InvalidPartition(format!(
                        "element {e} missing, repeated or out of range"
                    )));
                }
                labels[e - 1] = j + 1;
            }
        }
        SetPartition::from_labels(&labels)
    }

    pub fn alloc(&self) -> &[usize] {
        &self.alloc
    }

    /// Size of the ground set.
    pub fn len(&self) -> usize {
        self.alloc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alloc.is_empty()
    }

    pub fn num_clusters(&self) -> usize {
        self.alloc.iter().copied().max().unwrap_or(0)
    }

    /// Clusters of 1-based elements in order of appearance.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut clusters = vec![Vec::new(); self.num_clusters()];
        for (i, &a) in self.alloc.iter().enumerate() {
            clusters[a - 1].push(i + 1);
        }
        clusters
    }

    pub fn composition(&self) -> Composition {
        let mut parts = vec![0usize; self.num_clusters()];
        for &a in &self.alloc {
            parts[a - 1] += 1;
        }
        Composition(parts)
    }

    /// Restricts to `{n+1, ..., len}` and relabels the window as `[len - n]`.
    pub fn restrict_shift(&self, n: usize) -> Result<SetPartition> {
        if n >= self.alloc.len() {
            return Err(Error::InvalidPartition(format!(
                "shift {n} leaves an empty window of [{}]",
                self.alloc.len()
            )));
        }
        SetPartition::from_labels(&self.alloc[n..])
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.alloc.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for SetPartition {
    type Err = Error;

    /// Parses the comma-separated allocation form, e.g. `"1,2,1,3,2"`.
    fn from_str(s: &str) -> Result<Self> {
        let alloc = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("partition {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        SetPartition::from_alloc(alloc)
    }
}

/// Lexicographic stream of restricted-growth sequences of a fixed length.
#[derive(Debug, Clone)]
pub struct Partitions {
    current: Option<Vec<usize>>,
}

impl Iterator for Partitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        let current = self.current.take()?;
        let out = SetPartition {
            alloc: current.clone(),
        };
        // prefix maxima decide which positions may still grow
        let mut prefix_max = Vec::with_capacity(current.len());
        let mut max = 0;
        for &a in &current {
            prefix_max.push(max);
            max = max.max(a);
        }
        let mut next = current;
        for i in (1..next.len()).rev() {
            if next[i] <= prefix_max[i] {
                next[i] += 1;
                for a in &mut next[i + 1..] {
                    *a = 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Every partition of `[m]`, refusing `m` above `cap`.
pub fn enumerate_partitions(m: usize, cap: usize) -> Result<Partitions> {
    if m == 0 {
        return Err(Error::InvalidPartition(
            "ground set must be nonempty".into(),
        ));
    }
    if m > cap {
        return Err(Error::CapExceeded {
            what: "partition enumeration size",
            requested: m,
            cap,
        });
    }
    Ok(Partitions {
        current: Some(vec![1; m]),
    })
}
