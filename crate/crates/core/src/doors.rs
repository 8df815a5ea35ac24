//! Door labels, door sets and distributions over doors.
//!
//! Doors are numbered from 1, as they are painted on the stage. Every
//! distribution indexed by door stores door `d` at position `d - 1`.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance on the normalization of user-supplied distributions.
pub const INPUT_TOLERANCE: f64 = 1e-12;

/// Tolerance on derived quantities (joint tables, posteriors, averages).
pub const DERIVED_TOLERANCE: f64 = 1e-9;

/// A set of doors, kept sorted and duplicate-free.
///
/// The derived ordering is lexicographic on the sorted door list, which is the
/// order used everywhere sets are enumerated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DoorSet(Vec<usize>);

impl DoorSet {
    pub fn new(doors: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = doors.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        DoorSet(v)
    }

    pub fn single(door: usize) -> Self {
        DoorSet(vec![door])
    }

    pub fn doors(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, door: usize) -> bool {
        self.0.binary_search(&door).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for DoorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.iter().join("+"))
    }
}

impl FromStr for DoorSet {
    type Err = Error;

    /// Parses `3` or `2+3`.
    fn from_str(s: &str) -> Result<Self> {
        let mut doors = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let door: usize = part
                .parse()
                .map_err(|_| Error::Format(format!("bad door `{part}` in door set `{s}`")))?;
            doors.push(door);
        }
        let set = DoorSet::new(doors.iter().copied());
        if set.len() != doors.len() {
            return Err(Error::Format(format!("repeated door in door set `{s}`")));
        }
        Ok(set)
    }
}

impl Serialize for DoorSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DoorSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// What the player sees before the final choice: the initial pick and the set
/// of doors the host opened.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Observation {
    pub pick: usize,
    pub opened: DoorSet,
}

impl Observation {
    pub fn new(pick: usize, opened: DoorSet) -> Self {
        Observation { pick, opened }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={},O={}", self.pick, self.opened)
    }
}

impl FromStr for Observation {
    type Err = Error;

    /// Parses the `p=<door>,O=<door[+door...]>` syntax.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("bad observation `{s}`, expected p=<door>,O=<door[+door...]>"));
        let (lhs, rhs) = s.split_once(',').ok_or_else(bad)?;
        let pick = lhs
            .trim()
            .strip_prefix("p=")
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        let opened = rhs.trim().strip_prefix("O=").ok_or_else(bad)?.parse()?;
        Ok(Observation { pick, opened })
    }
}

impl Serialize for Observation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Observation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Why a vector of weights fails to be a probability distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum DistIssue {
    Empty,
    NonFinite { index: usize },
    Negative { index: usize, value: f64 },
    Sum(f64),
}

impl fmt::Display for DistIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistIssue::Empty => write!(f, "empty distribution"),
            DistIssue::NonFinite { index } => write!(f, "non-finite weight at position {index}"),
            DistIssue::Negative { index, value } => {
                write!(f, "negative weight {value} at position {index}")
            }
            DistIssue::Sum(s) => write!(f, "weights sum to {s}, not 1"),
        }
    }
}

/// Checks non-negativity and unit sum within `tol`.
pub fn check_weights(weights: impl IntoIterator<Item = f64>, tol: f64) -> Result<(), DistIssue> {
    let mut sum = 0.0;
    let mut n = 0;
    for (index, w) in weights.into_iter().enumerate() {
        if !w.is_finite() {
            return Err(DistIssue::NonFinite { index });
        }
        if w < 0.0 {
            return Err(DistIssue::Negative { index, value: w });
        }
        sum += w;
        n += 1;
    }
    if n == 0 {
        return Err(DistIssue::Empty);
    }
    if (sum - 1.0).abs() > tol {
        return Err(DistIssue::Sum(sum));
    }
    Ok(())
}

/// A probability distribution over doors `1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DoorDistribution {
    weights: Vec<f64>,
}

impl DoorDistribution {
    /// Wraps raw weights without checking them; see [`DoorDistribution::check`].
    pub fn from_weights(weights: Vec<f64>) -> Self {
        DoorDistribution { weights }
    }

    pub fn uniform(n_doors: usize) -> Self {
        DoorDistribution { weights: vec![1.0 / n_doors as f64; n_doors] }
    }

    /// All mass on `door` ("P ≡ 1" style degenerate laws).
    pub fn point(n_doors: usize, door: usize) -> Self {
        let mut weights = vec![0.0; n_doors];
        weights[door - 1] = 1.0;
        DoorDistribution { weights }
    }

    pub fn n_doors(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Probability of `door`; zero for doors out of range.
    pub fn prob(&self, door: usize) -> f64 {
        door.checked_sub(1)
            .and_then(|i| self.weights.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn check(&self, tol: f64) -> Result<(), DistIssue> {
        check_weights(self.weights.iter().copied(), tol)
    }

    /// Door with the largest mass; the lowest door wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &w) in self.weights.iter().enumerate() {
            if w > self.weights[best] {
                best = i;
            }
        }
        best + 1
    }
}

/// `n choose k`, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// All `k`-subsets of `universe` (assumed sorted), in lexicographic order.
pub fn k_subsets(universe: &[usize], k: usize) -> impl Iterator<Item = DoorSet> + '_ {
    universe.iter().copied().combinations(k).map(DoorSet)
}
