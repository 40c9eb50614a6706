//! Chip configurations on integer vertices.
//!
//! [`UnlabeledConfig`] is a finite multiset of indistinguishable chips, stored
//! sparsely. [`LabeledConfig`] assigns each labeled chip a vertex. Both are
//! plain values; all operations here are pure.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = i64;
pub type Label = u32;

/// Finite multiset of unlabeled chips. Zero counts are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnlabeledConfig {
    counts: BTreeMap<Vertex, u64>,
    total: u64,
}

impl UnlabeledConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// A single chip at `v`.
    pub fn delta(v: Vertex) -> Self {
        let mut c = Self::new();
        c.add(v, 1);
        c
    }

    /// One chip on each vertex of `[a, b]`; empty when `a > b`.
    pub fn delta_interval(a: Vertex, b: Vertex) -> Self {
        let mut c = Self::new();
        for v in a..=b {
            c.add(v, 1);
        }
        c
    }

    /// `n` chips at the origin.
    pub fn n_delta0(n: i64) -> Result<Self> {
        if n < 0 {
            return Err(Error::NegativeCount(n));
        }
        let mut c = Self::new();
        c.add(0, n as u64);
        Ok(c)
    }

    /// Builds a configuration from `(vertex, count)` pairs. Repeated vertices
    /// accumulate; zero counts are dropped.
    pub fn from_counts<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, i64)>,
    {
        let mut c = Self::new();
        for (v, k) in pairs {
            if k < 0 {
                return Err(Error::NegativeCount(k));
            }
            c.add(v, k as u64);
        }
        Ok(c)
    }

    pub fn get(&self, v: Vertex) -> u64 {
        self.counts.get(&v).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// `(vertex, count)` pairs in increasing vertex order.
    pub fn iter(&self) -> impl Iterator<Item = (Vertex, u64)> + '_ {
        self.counts.iter().map(|(&v, &k)| (v, k))
    }

    pub fn support(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.counts.keys().copied()
    }

    /// Leftmost occupied vertex; `None` stands for `min(∅) = +∞`.
    pub fn min(&self) -> Option<Vertex> {
        self.counts.keys().next().copied()
    }

    /// Rightmost occupied vertex; `None` stands for `max(∅) = −∞`.
    pub fn max(&self) -> Option<Vertex> {
        self.counts.keys().next_back().copied()
    }

    pub fn add(&mut self, v: Vertex, k: u64) {
        if k == 0 {
            return;
        }
        *self.counts.entry(v).or_insert(0) += k;
        self.total += k;
    }

    pub fn remove(&mut self, v: Vertex, k: u64) -> Result<()> {
        let held = self.get(v);
        if held < k {
            return Err(Error::InsufficientChips {
                vertex: v,
                held,
                needed: k,
            });
        }
        if held == k {
            self.counts.remove(&v);
        } else {
            self.counts.insert(v, held - k);
        }
        self.total -= k;
        Ok(())
    }

    /// Moves one chip from `v` to `v + 1`.
    pub fn shift_right(&mut self, v: Vertex) -> Result<()> {
        self.remove(v, 1)?;
        self.add(v + 1, 1);
        Ok(())
    }

    pub fn sum(&self, other: &UnlabeledConfig) -> UnlabeledConfig {
        let mut out = self.clone();
        for (v, k) in other.iter() {
            out.add(v, k);
        }
        out
    }

    /// `φ_ℓ(c) = Σ_{i ≤ ℓ} (i − ℓ − 1)·c(i)`.
    pub fn phi(&self, ell: Vertex) -> Result<i64> {
        let mut acc: i64 = 0;
        for (v, k) in self.counts.range(..=ell) {
            let weight = v
                .checked_sub(ell)
                .and_then(|d| d.checked_sub(1))
                .ok_or(Error::Overflow("phi"))?;
            let term = weight
                .checked_mul(count_i64(*k)?)
                .ok_or(Error::Overflow("phi"))?;
            acc = acc.checked_add(term).ok_or(Error::Overflow("phi"))?;
        }
        Ok(acc)
    }

    /// `φ_∞(c) = Σ i·c(i)`, the rank function of the rightward order.
    pub fn phi_inf(&self) -> Result<i64> {
        self.iter().try_fold(0i64, |acc, (v, k)| {
            v.checked_mul(count_i64(k)?)
                .and_then(|t| acc.checked_add(t))
                .ok_or(Error::Overflow("phi_inf"))
        })
    }

    /// `φ²_∞(c) = Σ i²·c(i)`.
    pub fn phi2_inf(&self) -> Result<i64> {
        self.iter().try_fold(0i64, |acc, (v, k)| {
            v.checked_mul(v)
                .and_then(|sq| sq.checked_mul(count_i64(k).ok()?))
                .and_then(|t| acc.checked_add(t))
                .ok_or(Error::Overflow("phi2_inf"))
        })
    }

    /// Number of `i` in `[min, max]` with both `i` and `i + 1` unoccupied.
    pub fn gamma(&self) -> u64 {
        let support: Vec<Vertex> = self.support().collect();
        support
            .windows(2)
            .map(|w| (w[1] - w[0] - 2).max(0) as u64)
            .sum()
    }

    pub fn statistics(&self, ell: Vertex) -> Result<StatisticsBundle> {
        Ok(StatisticsBundle {
            phi_ell: self.phi(ell)?,
            phi_inf: self.phi_inf()?,
            phi2_inf: self.phi2_inf()?,
            gamma: self.gamma(),
        })
    }
}

fn count_i64(k: u64) -> Result<i64> {
    i64::try_from(k).map_err(|_| Error::Overflow("chip count"))
}

impl fmt::Display for UnlabeledConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (v, k) in self.iter() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if k == 1 {
                write!(f, "δ{v}")?;
            } else {
                write!(f, "{k}δ{v}")?;
            }
        }
        Ok(())
    }
}

/// The four statistics tracked under unlabeled firing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatisticsBundle {
    pub phi_ell: i64,
    pub phi_inf: i64,
    pub phi2_inf: i64,
    pub gamma: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Equal,
    Less,
    Greater,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub order: Order,
    /// `d` is `c` with exactly one chip moved one vertex to the right.
    pub is_cover: bool,
}

/// Compares configurations of equal size in the rightward order: `c ≤ d`
/// when `d` is reachable from `c` by moving chips to the right, i.e. every
/// prefix count `Σ_{i≤j} d(i)` is at most the matching prefix count of `c`.
pub fn compare(c: &UnlabeledConfig, d: &UnlabeledConfig) -> Result<Comparison> {
    if c.total() != d.total() {
        return Err(Error::UnequalTotals {
            left: c.total(),
            right: d.total(),
        });
    }
    let mut vertices: Vec<Vertex> = c.support().chain(d.support()).collect();
    vertices.sort_unstable();
    vertices.dedup();

    let (mut pc, mut pd) = (0u64, 0u64);
    let (mut c_below, mut d_below) = (false, false);
    for &v in &vertices {
        pc += c.get(v);
        pd += d.get(v);
        match pc.cmp(&pd) {
            std::cmp::Ordering::Less => d_below = true,
            std::cmp::Ordering::Greater => c_below = true,
            std::cmp::Ordering::Equal => {}
        }
    }
    // Prefix sums are piecewise constant between support points, so checking
    // at every support vertex covers all j. `c_below` records a prefix where
    // c holds more chips, i.e. c sits further left there.
    let order = match (c_below, d_below) {
        (false, false) => Order::Equal,
        (false, true) => Order::Greater,
        (true, false) => Order::Less,
        (true, true) => Order::Incomparable,
    };
    Ok(Comparison {
        order,
        is_cover: order == Order::Less && is_cover(c, d),
    })
}

fn is_cover(c: &UnlabeledConfig, d: &UnlabeledConfig) -> bool {
    let mut diffs = Vec::new();
    let mut vertices: Vec<Vertex> = c.support().chain(d.support()).collect();
    vertices.sort_unstable();
    vertices.dedup();
    for v in vertices {
        let delta = d.get(v) as i128 - c.get(v) as i128;
        if delta != 0 {
            diffs.push((v, delta));
            if diffs.len() > 2 {
                return false;
            }
        }
    }
    matches!(diffs.as_slice(), [(a, -1), (b, 1)] if *b == *a + 1)
}

/// A finite assignment of labeled chips to vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledConfig {
    positions: BTreeMap<Label, Vertex>,
}

impl LabeledConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Chips `1..=n` all at the origin.
    pub fn delta_n(n: i64) -> Result<Self> {
        if n < 0 {
            return Err(Error::NegativeCount(n));
        }
        Ok(Self {
            positions: (1..=n as Label).map(|l| (l, 0)).collect(),
        })
    }

    /// Chip `i + 1` at `positions[i]`.
    pub fn from_positions(positions: &[Vertex]) -> Self {
        Self {
            positions: positions
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as Label + 1, v))
                .collect(),
        }
    }

    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Vertex)>,
    {
        let mut positions = BTreeMap::new();
        for (label, v) in pairs {
            if label < 1 || label > Label::MAX as i64 {
                return Err(Error::BadLabel(label));
            }
            positions.insert(label as Label, v);
        }
        Ok(Self { positions })
    }

    /// Reads a permutation written left to right along consecutive vertices
    /// starting at `start`.
    pub fn from_permutation(perm: &[Label], start: Vertex) -> Self {
        Self {
            positions: perm
                .iter()
                .enumerate()
                .map(|(i, &l)| (l, start + i as Vertex))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, label: Label) -> Option<Vertex> {
        self.positions.get(&label).copied()
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.positions.keys().copied()
    }

    /// `(label, vertex)` pairs in increasing label order.
    pub fn iter(&self) -> impl Iterator<Item = (Label, Vertex)> + '_ {
        self.positions.iter().map(|(&l, &v)| (l, v))
    }

    pub fn max_label(&self) -> Option<Label> {
        self.positions.keys().next_back().copied()
    }

    pub fn set(&mut self, label: Label, v: Vertex) {
        self.positions.insert(label, v);
    }

    /// True when the label set is exactly `{1, …, n}`.
    pub fn has_standard_labels(&self, n: usize) -> bool {
        self.positions.len() == n && self.max_label().map_or(n == 0, |m| m as usize == n)
    }

    pub fn require_standard_labels(&self, n: usize) -> Result<()> {
        if self.has_standard_labels(n) {
            Ok(())
        } else {
            Err(Error::LabelSetMismatch {
                expected: n,
                found: self.len(),
            })
        }
    }

    /// Positions in label order.
    pub fn positions(&self) -> Vec<Vertex> {
        self.positions.values().copied().collect()
    }

    /// The underlying unlabeled configuration `[C]`.
    pub fn underlying(&self) -> UnlabeledConfig {
        let mut c = UnlabeledConfig::new();
        for &v in self.positions.values() {
            c.add(v, 1);
        }
        c
    }

    /// `ψ_k(C) = Σ_{ℓ ≤ k} C(ℓ)`; every label in `1..=k` must be present.
    pub fn psi(&self, k: Label) -> Result<i64> {
        (1..=k).try_fold(0i64, |acc, label| {
            let v = self.position(label).ok_or(Error::MissingLabel(label))?;
            acc.checked_add(v).ok_or(Error::Overflow("psi"))
        })
    }

    /// Reflects about the origin and swaps chip `i` with chip `n + 1 − i`.
    pub fn dual(&self, n: usize) -> Result<LabeledConfig> {
        self.require_standard_labels(n)?;
        let n = n as Label;
        Ok(Self {
            positions: self.iter().map(|(l, v)| (n + 1 - l, -v)).collect(),
        })
    }

    /// Chips with labels outside `labels`.
    pub fn without(&self, labels: &[Label]) -> LabeledConfig {
        Self {
            positions: self.iter().filter(|(l, _)| !labels.contains(l)).collect(),
        }
    }

    /// `[C|≥k]`: the unlabeled configuration of chips with label at least `k`.
    pub fn restrict_geq(&self, k: Label) -> UnlabeledConfig {
        let mut c = UnlabeledConfig::new();
        for (_, &v) in self.positions.range(k..) {
            c.add(v, 1);
        }
        c
    }

    /// Reads the labels left to right when every occupied vertex holds one
    /// chip and the support is an interval.
    pub fn as_permutation(&self) -> Option<Vec<Label>> {
        let mut by_vertex: Vec<(Vertex, Label)> = self.iter().map(|(l, v)| (v, l)).collect();
        by_vertex.sort_unstable();
        let consecutive = by_vertex.windows(2).all(|w| w[1].0 == w[0].0 + 1);
        consecutive.then(|| by_vertex.into_iter().map(|(_, l)| l).collect())
    }
}

impl fmt::Display for LabeledConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}:{v}")?;
        }
        f.write_str("}")
    }
}

/// What [`make_config`] should build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigKind {
    DeltaInterval(Vertex, Vertex),
    NDelta0(i64),
    Explicit(Vec<(Vertex, i64)>),
    DeltaN(i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Config {
    Unlabeled(UnlabeledConfig),
    Labeled(LabeledConfig),
}

pub fn make_config(kind: ConfigKind) -> Result<Config> {
    Ok(match kind {
        ConfigKind::DeltaInterval(a, b) => Config::Unlabeled(UnlabeledConfig::delta_interval(a, b)),
        ConfigKind::NDelta0(n) => Config::Unlabeled(UnlabeledConfig::n_delta0(n)?),
        ConfigKind::Explicit(pairs) => Config::Unlabeled(UnlabeledConfig::from_counts(pairs)?),
        ConfigKind::DeltaN(n) => Config::Labeled(LabeledConfig::delta_n(n)?),
    })
}
