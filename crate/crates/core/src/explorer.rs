//! Exhaustive search of labeled firing sequences.
//!
//! A state is the position vector of chips `1..=n`, packed one byte per chip
//! into a `u128` (so at most 16 chips, positions in `[-128, 127]`). The
//! reachable-state graph is acyclic because every firing sequence
//! terminates, which lets the exact probability code in `montecarlo` walk it
//! in post-order.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::config::{Label, LabeledConfig, UnlabeledConfig, Vertex};
use crate::engine::{
    check_label_bounds, stabilize_labeled, stabilize_unlabeled, RunOptions, Strategy,
};
use crate::error::{Error, Result};
use crate::graph::{LocalStructure, PathGraph};

/// Largest chip count the packed state can hold.
pub const MAX_CHIPS: usize = 16;

const OFFSET: i64 = 128;

/// Packed position vectors for `n` chips.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Codec {
    pub n: usize,
}

impl Codec {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_CHIPS {
            return Err(Error::Infeasible(format!(
                "{n} chips exceed the {MAX_CHIPS}-chip state encoding"
            )));
        }
        Ok(Self { n })
    }

    pub fn encode(&self, pos: &[Vertex]) -> Result<u128> {
        let mut s = 0u128;
        for (k, &v) in pos.iter().enumerate() {
            let b = v + OFFSET;
            if !(0..=255).contains(&b) {
                return Err(Error::Infeasible(format!(
                    "position {v} outside the packed range"
                )));
            }
            s |= (b as u128) << (8 * k);
        }
        Ok(s)
    }

    pub fn position(&self, s: u128, k: usize) -> Vertex {
        ((s >> (8 * k)) & 0xff) as Vertex - OFFSET
    }

    pub fn decode(&self, s: u128) -> Vec<Vertex> {
        (0..self.n).map(|k| self.position(s, k)).collect()
    }

    pub fn to_config(self, s: u128) -> LabeledConfig {
        LabeledConfig::from_positions(&self.decode(s))
    }
}

/// Successor generation on packed states.
pub(crate) struct Space<'g> {
    pub graph: &'g PathGraph,
    pub codec: Codec,
}

impl<'g> Space<'g> {
    pub fn new(graph: &'g PathGraph, n: usize) -> Result<Self> {
        Ok(Self {
            graph,
            codec: Codec::new(n)?,
        })
    }

    /// Appends every successor of `s` in canonical move order (vertex, then
    /// lexicographic chip list) to `out`, and the number of moves at each
    /// unstable vertex to `groups`.
    pub fn expand(&self, s: u128, out: &mut Vec<u128>, groups: &mut Vec<usize>) -> Result<()> {
        let n = self.codec.n;
        let mut order: [(Vertex, usize); MAX_CHIPS] = [(0, 0); MAX_CHIPS];
        for (k, slot) in order.iter_mut().enumerate().take(n) {
            *slot = (self.codec.position(s, k), k);
        }
        let order = &mut order[..n];
        order.sort_unstable();
        let mut start = 0;
        while start < n {
            let v = order[start].0;
            let mut end = start + 1;
            while end < n && order[end].0 == v {
                end += 1;
            }
            let local = self.graph.local(v);
            let d = local.outdeg() as usize;
            let chips: Vec<usize> = order[start..end].iter().map(|&(_, k)| k).collect();
            if chips.len() >= d {
                let before = out.len();
                let mut failed = None;
                crate::engine::for_each_combination(chips.len(), d, |idx| {
                    match self.apply(s, local, idx.iter().map(|&i| chips[i])) {
                        Ok(next) => out.push(next),
                        Err(e) => failed = Some(e),
                    }
                });
                if let Some(e) = failed {
                    return Err(e);
                }
                groups.push(out.len() - before);
            }
            start = end;
        }
        Ok(())
    }

    fn apply(
        &self,
        s: u128,
        local: LocalStructure,
        chosen: impl Iterator<Item = usize>,
    ) -> Result<u128> {
        let chosen: Vec<usize> = chosen.collect();
        let (left, right) = (local.left as usize, local.right as usize);
        let mut next = s;
        for &k in &chosen[..left] {
            if (s >> (8 * k)) & 0xff == 0 {
                return Err(Error::Infeasible("a chip left the packed range".into()));
            }
            next -= 1u128 << (8 * k);
        }
        for &k in &chosen[chosen.len() - right..] {
            if (s >> (8 * k)) & 0xff == 0xff {
                return Err(Error::Infeasible("a chip left the packed range".into()));
            }
            next += 1u128 << (8 * k);
        }
        Ok(next)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub max_states: Option<u64>,
    pub max_seconds: Option<f64>,
}

impl Limits {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn states(max_states: u64) -> Self {
        Self {
            max_states: Some(max_states),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exploration {
    #[default]
    DepthFirst,
    BreadthFirst,
    /// Level-synchronous search with each level expanded in parallel.
    Parallel,
}

/// The stable configurations reachable from a start configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableSet {
    pub n: usize,
    pub graph: PathGraph,
    pub stables: BTreeSet<LabeledConfig>,
    /// Distinct labeled states visited, start and terminals included.
    pub reachable_states: u64,
    /// False when a limit cut the search short.
    pub exact: bool,
}

impl StableSet {
    pub fn len(&self) -> usize {
        self.stables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stables.is_empty()
    }

    /// True when every member has positions weakly increasing in label.
    pub fn all_sorted(&self) -> bool {
        self.stables.iter().all(is_sorted)
    }

    pub fn contains(&self, c: &LabeledConfig) -> bool {
        self.stables.contains(c)
    }
}

fn is_sorted(c: &LabeledConfig) -> bool {
    c.positions().windows(2).all(|w| w[0] <= w[1])
}

struct Budget {
    limits: Limits,
    started: Instant,
}

impl Budget {
    fn over_time(&self) -> bool {
        self.limits
            .max_seconds
            .is_some_and(|s| self.started.elapsed() > Duration::from_secs_f64(s))
    }

    fn over_states(&self, states: usize) -> bool {
        self.limits.max_states.is_some_and(|m| states as u64 > m)
    }
}

pub fn enumerate_stables(
    graph: &PathGraph,
    start: &LabeledConfig,
    limits: Limits,
) -> Result<StableSet> {
    enumerate_stables_with(graph, start, limits, Exploration::DepthFirst)
}

/// Visits every labeled state reachable from `start` (labels `1..=n`) and
/// collects the stable ones.
pub fn enumerate_stables_with(
    graph: &PathGraph,
    start: &LabeledConfig,
    limits: Limits,
    mode: Exploration,
) -> Result<StableSet> {
    let n = start.len();
    start.require_standard_labels(n)?;
    graph.check_support(&start.underlying())?;
    let space = Space::new(graph, n)?;
    let root = space.codec.encode(&start.positions())?;
    let budget = Budget {
        limits,
        started: Instant::now(),
    };
    let (terminals, visited, exact) = match mode {
        Exploration::DepthFirst | Exploration::BreadthFirst => {
            sequential(&space, root, &budget, mode)?
        }
        Exploration::Parallel => parallel(&space, root, &budget)?,
    };
    Ok(StableSet {
        n,
        graph: graph.clone(),
        stables: terminals
            .into_iter()
            .map(|s| space.codec.to_config(s))
            .collect(),
        reachable_states: visited,
        exact,
    })
}

fn sequential(
    space: &Space,
    root: u128,
    budget: &Budget,
    mode: Exploration,
) -> Result<(Vec<u128>, u64, bool)> {
    let mut seen: FxHashSet<u128> = FxHashSet::default();
    let mut work = std::collections::VecDeque::from([root]);
    seen.insert(root);
    let mut terminals = Vec::new();
    let (mut succ, mut groups) = (Vec::new(), Vec::new());
    let mut expanded = 0u64;
    while let Some(s) = match mode {
        Exploration::BreadthFirst => work.pop_front(),
        _ => work.pop_back(),
    } {
        expanded += 1;
        // reading the clock on every state would dominate small expansions
        if budget.over_states(seen.len()) || (expanded.is_multiple_of(1024) && budget.over_time()) {
            return Ok((terminals, seen.len() as u64, false));
        }
        succ.clear();
        groups.clear();
        space.expand(s, &mut succ, &mut groups)?;
        if succ.is_empty() {
            terminals.push(s);
        }
        for &t in &succ {
            if seen.insert(t) {
                work.push_back(t);
            }
        }
    }
    Ok((terminals, seen.len() as u64, true))
}

fn parallel(space: &Space, root: u128, budget: &Budget) -> Result<(Vec<u128>, u64, bool)> {
    let mut seen: FxHashSet<u128> = FxHashSet::default();
    seen.insert(root);
    let mut frontier = vec![root];
    let mut terminals = Vec::new();
    while !frontier.is_empty() {
        if budget.over_states(seen.len()) || budget.over_time() {
            return Ok((terminals, seen.len() as u64, false));
        }
        let expanded: Vec<(u128, Vec<u128>)> = frontier
            .par_iter()
            .map(|&s| {
                let (mut succ, mut groups) = (Vec::new(), Vec::new());
                space.expand(s, &mut succ, &mut groups).map(|_| (s, succ))
            })
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for (s, succ) in expanded {
            if succ.is_empty() {
                terminals.push(s);
            }
            for t in succ {
                if seen.insert(t) {
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    Ok((terminals, seen.len() as u64, true))
}

/// A stable configuration read as a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermView {
    /// Labels read left to right along the support.
    pub perm: Vec<Label>,
    pub inversions: u64,
}

impl PermView {
    pub fn new(perm: Vec<Label>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n + 1];
        for &l in &perm {
            if l == 0 || l as usize > n || std::mem::replace(&mut seen[l as usize], true) {
                return Err(Error::NotPermutation(format!("{perm:?}")));
            }
        }
        let inversions = inversions(&perm);
        Ok(Self { perm, inversions })
    }

    pub fn from_config(c: &LabeledConfig) -> Result<Self> {
        let perm = c
            .as_permutation()
            .ok_or_else(|| Error::NotPermutation(c.to_string()))?;
        Self::new(perm)
    }

    /// Parses a compact word such as `23154` (single digits) or a
    /// comma-separated list such as `2,3,1,5,4`.
    pub fn parse(word: &str) -> Result<Self> {
        let bad = || Error::NotPermutation(word.to_string());
        let perm: Vec<Label> = if word.contains(',') {
            word.split(',')
                .map(|p| p.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            word.chars()
                .map(|ch| ch.to_digit(10).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        Self::new(perm)
    }

    /// The configuration on `[−m, m]` for `n = 2m + 1` chips (or starting at
    /// `−n/2` in general).
    pub fn centred_config(&self) -> LabeledConfig {
        LabeledConfig::from_permutation(&self.perm, -(self.perm.len() as Vertex / 2))
    }

    pub fn word(&self) -> String {
        let parts: Vec<String> = self.perm.iter().map(Label::to_string).collect();
        parts.join(if self.perm.len() < 10 { "" } else { "," })
    }
}

fn inversions(perm: &[Label]) -> u64 {
    let mut count = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            count += u64::from(perm[i] > perm[j]);
        }
    }
    count
}

/// The two necessary conditions for membership in the stable set of `Δⁿ`
/// on `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermConditions {
    /// Every chip within the position bounds `−⌊(n+1−k)/2⌋ ≤ D(k) ≤ ⌊k/2⌋`.
    pub bounds_ok: bool,
    /// For each missing label `j` in `1..=n+1`: relabelling the other chips
    /// order-preservingly, adding chip `j` at the origin and stabilizing on
    /// `Z` gives sorted positions.
    pub add_chip_ok: bool,
}

/// Evaluates both conditions on a stable configuration with labels `1..=n`.
pub fn config_conditions(c: &LabeledConfig) -> Result<PermConditions> {
    let n = c.len();
    let bounds_ok = check_label_bounds(c, n)?;
    let line = PathGraph::line();
    let mut add_chip_ok = true;
    for j in 1..=n as Label + 1 {
        let mut grown = LabeledConfig::new();
        for (l, v) in c.iter() {
            grown.set(if l < j { l } else { l + 1 }, v);
        }
        grown.set(j, 0);
        let r = stabilize_labeled(
            &line,
            &grown,
            &Strategy::LeftmostVertex,
            RunOptions::default(),
        )?;
        if !is_sorted(&r.final_config) {
            add_chip_ok = false;
            break;
        }
    }
    Ok(PermConditions {
        bounds_ok,
        add_chip_ok,
    })
}

pub fn perm_conditions(perm: &PermView) -> Result<PermConditions> {
    config_conditions(&perm.centred_config())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermAnalysis {
    pub perm: String,
    pub inversions: u64,
    pub bounds_ok: bool,
    pub add_chip_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub n: usize,
    pub count: usize,
    pub max_inversions: u64,
    pub per_perm: Vec<PermAnalysis>,
}

/// Inversions and the two membership conditions for every member of a set
/// whose members are permutations (odd `n` on `Z`).
pub fn analyze(set: &StableSet) -> Result<Analysis> {
    let mut per_perm = Vec::with_capacity(set.len());
    for c in &set.stables {
        let view = PermView::from_config(c)?;
        let cond = config_conditions(c)?;
        per_perm.push(PermAnalysis {
            perm: view.word(),
            inversions: view.inversions,
            bounds_ok: cond.bounds_ok,
            add_chip_ok: cond.add_chip_ok,
        });
    }
    Ok(Analysis {
        n: set.n,
        count: set.len(),
        max_inversions: per_perm.iter().map(|p| p.inversions).max().unwrap_or(0),
        per_perm,
    })
}

/// Which conjecture to test, with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum Conjecture {
    /// `Z⟨S⟩` sorts `Δⁿ` when the min/max hypotheses hold.
    Loops { s: Vec<Vertex>, n: u64 },
    /// `rZ` sorts `Δⁿ` when `2r` divides `n`.
    Parallel { r: u64, n: u64 },
    /// `r(Z⟨S⟩)` sorts `Δ^{rn}` when the min/max hypotheses hold for `Z⟨S⟩`.
    Combined { s: Vec<Vertex>, r: u64, n: u64 },
    /// The stable set of `Δⁿ` on `Z` (odd `n`) has at most `⌊n/2⌋`
    /// inversions per member, attained.
    Inversions { n: u64 },
}

/// The min/max hypotheses on `Z⟨S⟩` and the balance condition, with
/// `S' = S ∩ [min+1, max−1]` taken on the stabilization of `nδ₀`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopHypotheses {
    pub n: u64,
    pub min_n: Option<Vertex>,
    pub max_n: Option<Vertex>,
    pub min_prev: Option<Vertex>,
    pub max_prev: Option<Vertex>,
    pub min_drops: bool,
    pub max_rises: bool,
    pub balanced: bool,
    /// Exactly two of the three conditions holding would contradict the claim
    /// that any two imply the third.
    pub consistent: bool,
}

impl LoopHypotheses {
    pub fn hold(&self) -> bool {
        self.min_drops && self.max_rises
    }
}

pub fn loop_graph(s: &[Vertex]) -> PathGraph {
    PathGraph::line_with_loops(s.iter().copied())
}

/// Evaluates the hypotheses by unlabeled stabilization of `nδ₀` and `(n−1)δ₀`.
pub fn loop_hypotheses(s: &[Vertex], n: u64) -> Result<LoopHypotheses> {
    if n == 0 {
        return Err(Error::Precondition(
            "the loop hypotheses need n >= 1".into(),
        ));
    }
    let graph = loop_graph(s);
    let stab = |k: u64| -> Result<UnlabeledConfig> {
        let c = UnlabeledConfig::n_delta0(k as i64)?;
        Ok(
            stabilize_unlabeled(&graph, &c, &Strategy::LeftmostVertex, RunOptions::default())?
                .final_config,
        )
    };
    let (now, prev) = (stab(n)?, stab(n - 1)?);
    let (min_n, max_n, min_prev, max_prev) = (now.min(), now.max(), prev.min(), prev.max());
    // an empty configuration has min = +∞ and max = −∞
    let min_drops = match (min_n, min_prev) {
        (Some(a), Some(b)) => a < b,
        (Some(_), None) => true,
        _ => false,
    };
    let max_rises = match (max_n, max_prev) {
        (Some(a), Some(b)) => a > b,
        (Some(_), None) => true,
        _ => false,
    };
    let balanced = match (min_n, max_n) {
        (Some(lo), Some(hi)) => {
            let inner: BTreeSet<Vertex> = s.iter().copied().filter(|&i| lo < i && i < hi).collect();
            inner.iter().sum::<Vertex>() == 0
        }
        _ => true,
    };
    let holding = [min_drops, max_rises, balanced]
        .iter()
        .filter(|&&b| b)
        .count();
    Ok(LoopHypotheses {
        n,
        min_n,
        max_n,
        min_prev,
        max_prev,
        min_drops,
        max_rises,
        balanced,
        consistent: holding != 2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub conjecture: Conjecture,
    /// Canonical text of the graph that was searched.
    pub graph: String,
    pub chips: u64,
    pub hypothesis_holds: bool,
    pub loop_hypotheses: Option<LoopHypotheses>,
    /// `Some(true)` when an exhaustive search found only sorted terminals,
    /// `Some(false)` when any unsorted terminal was found.
    pub sorts: Option<bool>,
    pub stable_count: usize,
    pub reachable_states: u64,
    pub max_inversions: Option<u64>,
    /// For the inversion conjecture: whether the maximum equals `⌊n/2⌋`.
    pub inversions_match: Option<bool>,
    pub exact: bool,
    /// A sorting failure under the hypotheses, or for the inversion
    /// conjecture a maximum other than `⌊n/2⌋`.
    pub counterexample: bool,
}

/// Evaluates a conjecture's hypotheses and runs the exhaustive search.
pub fn check_conjecture(conjecture: &Conjecture, limits: Limits) -> Result<ConjectureReport> {
    let (graph, chips, hypothesis_holds, loop_hyp) = match conjecture {
        Conjecture::Loops { s, n } => {
            let h = loop_hypotheses(s, *n)?;
            (loop_graph(s), *n, h.hold(), Some(h))
        }
        Conjecture::Parallel { r, n } => {
            let graph = PathGraph::line().with_multiplicity(*r)?;
            (graph, *n, *n % (2 * r) == 0, None)
        }
        Conjecture::Combined { s, r, n } => {
            let h = loop_hypotheses(s, *n)?;
            let chips = r.checked_mul(*n).ok_or(Error::Overflow("chip count"))?;
            (
                loop_graph(s).with_multiplicity(*r)?,
                chips,
                h.hold(),
                Some(h),
            )
        }
        Conjecture::Inversions { n } => {
            if n % 2 == 0 {
                return Err(Error::Precondition(format!(
                    "the inversion conjecture needs odd n, got {n}"
                )));
            }
            (PathGraph::line(), *n, true, None)
        }
    };
    if chips as usize > MAX_CHIPS {
        return Err(Error::Infeasible(format!(
            "{chips} chips is beyond exhaustive search (at most {MAX_CHIPS})"
        )));
    }
    let start = LabeledConfig::delta_n(chips as i64)?;
    let set = enumerate_stables_with(&graph, &start, limits, Exploration::Parallel)?;
    let any_unsorted = set.stables.iter().any(|c| !is_sorted(c));
    let sorts = if any_unsorted {
        Some(false)
    } else {
        set.exact.then_some(true)
    };
    let (max_inversions, inversions_match) = match conjecture {
        Conjecture::Inversions { n } if set.exact => {
            let max = set
                .stables
                .iter()
                .map(|c| PermView::from_config(c).map(|p| p.inversions))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or(0);
            (Some(max), Some(max == n / 2))
        }
        _ => (None, None),
    };
    Ok(ConjectureReport {
        conjecture: conjecture.clone(),
        graph: graph.to_string(),
        chips,
        hypothesis_holds,
        loop_hypotheses: loop_hyp,
        sorts,
        stable_count: set.len(),
        reachable_states: set.reachable_states,
        max_inversions,
        inversions_match,
        exact: set.exact,
        counterexample: match conjecture {
            Conjecture::Inversions { .. } => inversions_match == Some(false),
            _ => hypothesis_holds && sorts == Some(false),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn z() -> PathGraph {
        PathGraph::line()
    }

    fn delta(n: i64) -> LabeledConfig {
        LabeledConfig::delta_n(n).unwrap()
    }

    fn words(set: &StableSet) -> BTreeSet<String> {
        set.stables
            .iter()
            .map(|c| PermView::from_config(c).unwrap().word())
            .collect()
    }

    #[test]
    fn codec_round_trip() {
        let codec = Codec::new(4).unwrap();
        let pos = vec![-3, 0, 127, -128];
        assert_eq!(codec.decode(codec.encode(&pos).unwrap()), pos);
        assert!(codec.encode(&[128]).is_err());
        assert!(Codec::new(17).is_err());
    }

    #[test]
    fn expand_matches_legal_moves() {
        let c = LabeledConfig::from_positions(&[0, 0, 0, 1, 1, -1, 0]);
        let line = z();
        let space = Space::new(&line, 7).unwrap();
        let s = space.codec.encode(&c.positions()).unwrap();
        let (mut succ, mut groups) = (Vec::new(), Vec::new());
        space.expand(s, &mut succ, &mut groups).unwrap();
        let want: Vec<u128> = crate::engine::legal_moves(&z(), &c)
            .iter()
            .map(|mv| {
                space
                    .codec
                    .encode(&crate::engine::fire(&z(), &c, mv).unwrap().positions())
                    .unwrap()
            })
            .collect();
        assert_eq!(succ, want);
        assert_eq!(groups, vec![6, 1]);
    }

    #[test]
    fn small_stable_sets() {
        let d3 = enumerate_stables(&z(), &delta(3), Limits::unlimited()).unwrap();
        assert!(d3.exact);
        assert_eq!(
            words(&d3),
            BTreeSet::from(["132".into(), "123".into(), "213".into()])
        );
        let d4 = enumerate_stables(&z(), &delta(4), Limits::unlimited()).unwrap();
        assert_eq!(
            d4.stables.iter().cloned().collect::<Vec<_>>(),
            vec![LabeledConfig::from_positions(&[-2, -1, 1, 2])]
        );
        let d1 = enumerate_stables(&z(), &delta(1), Limits::unlimited()).unwrap();
        assert_eq!(d1.len(), 1);
        assert_eq!(d1.reachable_states, 1);
        assert_eq!(
            enumerate_stables(&z(), &delta(5), Limits::unlimited())
                .unwrap()
                .len(),
            12
        );
    }

    #[test]
    fn exploration_order_does_not_matter() {
        for (g, n) in [("Z", 5), ("Z loops=0:1", 5), ("Z r=2", 4), ("N", 4)] {
            let graph = parse_graph(g).unwrap();
            let sets: Vec<StableSet> = [
                Exploration::DepthFirst,
                Exploration::BreadthFirst,
                Exploration::Parallel,
            ]
            .into_iter()
            .map(|m| enumerate_stables_with(&graph, &delta(n), Limits::unlimited(), m).unwrap())
            .collect();
            assert!(sets.windows(2).all(|w| w[0] == w[1]), "{g}");
        }
    }

    #[test]
    fn limits_flag_partial_results() {
        let set = enumerate_stables(&z(), &delta(7), Limits::states(50)).unwrap();
        assert!(!set.exact);
        // one expansion may overshoot the cap by its successor count
        assert!(set.reachable_states < 50 + 21);
    }

    #[test]
    fn analysis_of_five_chips() {
        let set = enumerate_stables(&z(), &delta(5), Limits::unlimited()).unwrap();
        let a = analyze(&set).unwrap();
        assert_eq!(a.max_inversions, 2);
        assert!(a.per_perm.iter().all(|p| p.bounds_ok && p.add_chip_ok));

        let odd = PermView::parse("23154").unwrap();
        assert_eq!(odd.inversions, 3);
        let cond = perm_conditions(&odd).unwrap();
        assert!(cond.bounds_ok && cond.add_chip_ok);
        assert!(!set.contains(&odd.centred_config()));

        let d4 = enumerate_stables(&z(), &delta(4), Limits::unlimited()).unwrap();
        assert!(analyze(&d4).is_err());
        let d1 = enumerate_stables(&z(), &delta(1), Limits::unlimited()).unwrap();
        assert_eq!(analyze(&d1).unwrap().max_inversions, 0);
    }

    #[test]
    fn perm_view_rejects_non_permutations() {
        assert!(PermView::parse("1224").is_err());
        assert!(PermView::parse("130").is_err());
        assert_eq!(PermView::parse("2,1,3").unwrap().inversions, 1);
    }

    #[test]
    fn conjecture_examples() {
        let r =
            check_conjecture(&Conjecture::Parallel { r: 2, n: 4 }, Limits::unlimited()).unwrap();
        assert!(r.hypothesis_holds && r.sorts == Some(true));
        assert_eq!(r.stable_count, 1);

        let r =
            check_conjecture(&Conjecture::Loops { s: vec![0], n: 4 }, Limits::unlimited()).unwrap();
        assert!(!r.hypothesis_holds);
        let r =
            check_conjecture(&Conjecture::Loops { s: vec![0], n: 5 }, Limits::unlimited()).unwrap();
        assert!(r.hypothesis_holds && r.sorts == Some(true));

        let r =
            check_conjecture(&Conjecture::Loops { s: vec![], n: 3 }, Limits::unlimited()).unwrap();
        let h = r.loop_hypotheses.unwrap();
        assert!(!h.min_drops && !r.hypothesis_holds);
        assert_eq!(r.sorts, Some(false));
        assert!(!r.counterexample);

        let r = check_conjecture(&Conjecture::Inversions { n: 5 }, Limits::unlimited()).unwrap();
        assert_eq!(
            (r.max_inversions, r.inversions_match),
            (Some(2), Some(true))
        );
        assert!(check_conjecture(&Conjecture::Inversions { n: 4 }, Limits::unlimited()).is_err());
        assert!(matches!(
            check_conjecture(&Conjecture::Parallel { r: 2, n: 20 }, Limits::unlimited()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn loop_hypotheses_on_the_plain_line() {
        // Z: n even adds a chip at each end, n odd fills the origin
        for n in 1..=12 {
            let h = loop_hypotheses(&[], n).unwrap();
            assert_eq!(h.hold(), n % 2 == 0 || n == 1, "n={n}");
            assert!(h.balanced && h.consistent);
        }
    }
}
