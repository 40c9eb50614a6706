//! Vector firing by positive roots.
//!
//! A labeled configuration with labels `1..=n` is the vector of its chip
//! positions. Firing chips `i < j` together adds `e_j − e_i`, allowed exactly
//! when the vector is orthogonal to that root. Type B adds the roots
//! `e_a + e_b` and `e_a`, which in chip language are the mirrored-pair and
//! origin moves.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Label, LabeledConfig, Vertex};
use crate::engine::{default_budget, fire, FiringMove};
use crate::error::{Error, Result};
use crate::graph::PathGraph;
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootType {
    A,
    B,
}

impl std::str::FromStr for RootType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(RootType::A),
            "B" | "b" => Ok(RootType::B),
            other => Err(Error::Precondition(format!("unknown root type {other:?}"))),
        }
    }
}

/// A positive root, with 1-based coordinates. The derived order is the
/// canonical root order: differences, then sums, then units, each
/// lexicographic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Root {
    /// `e_hi − e_lo` with `lo < hi`.
    Diff { lo: usize, hi: usize },
    /// `e_a + e_b` with `a < b`.
    Sum { a: usize, b: usize },
    /// `e_a`.
    Unit(usize),
}

impl Root {
    /// Nonzero coordinates as `(index, coefficient)` pairs.
    pub fn terms(&self) -> Vec<(usize, i64)> {
        match *self {
            Root::Diff { lo, hi } => vec![(lo, -1), (hi, 1)],
            Root::Sum { a, b } => vec![(a, 1), (b, 1)],
            Root::Unit(a) => vec![(a, 1)],
        }
    }

    fn max_index(&self) -> usize {
        match *self {
            Root::Diff { hi, .. } => hi,
            Root::Sum { b, .. } => b,
            Root::Unit(a) => a,
        }
    }

    fn is_well_formed(&self) -> bool {
        match *self {
            Root::Diff { lo, hi } => lo >= 1 && lo < hi,
            Root::Sum { a, b } => a >= 1 && a < b,
            Root::Unit(a) => a >= 1,
        }
    }

    pub fn root_type(&self) -> RootType {
        match self {
            Root::Diff { .. } => RootType::A,
            _ => RootType::B,
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Root::Diff { lo, hi } => write!(f, "e{hi}-e{lo}"),
            Root::Sum { a, b } => write!(f, "e{a}+e{b}"),
            Root::Unit(a) => write!(f, "e{a}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSet {
    pub type_tag: RootType,
    pub n: usize,
    pub roots: Vec<Root>,
}

/// Positive roots of type `A_{n−1}` (`n(n−1)/2` of them) or `B_n` (`n²`), in
/// canonical order.
pub fn positive_roots(type_tag: RootType, n: usize) -> Result<RootSet> {
    if n == 0 {
        return Err(Error::Precondition("root systems need n >= 1".into()));
    }
    let mut roots: Vec<Root> = Vec::new();
    for lo in 1..=n {
        for hi in lo + 1..=n {
            roots.push(Root::Diff { lo, hi });
        }
    }
    if type_tag == RootType::B {
        for a in 1..=n {
            for b in a + 1..=n {
                roots.push(Root::Sum { a, b });
            }
        }
        roots.extend((1..=n).map(Root::Unit));
    }
    Ok(RootSet { type_tag, n, roots })
}

/// Chip positions by label: coordinate `i` (1-based) is where chip `i` sits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VectorState {
    pub coords: Vec<i64>,
}

impl VectorState {
    pub fn origin(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("vector states need n >= 1".into()));
        }
        Ok(Self { coords: vec![0; n] })
    }

    pub fn from_coords(coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Precondition("vector states need n >= 1".into()));
        }
        Ok(Self { coords })
    }

    pub fn from_labeled(c: &LabeledConfig, n: usize) -> Result<Self> {
        c.require_standard_labels(n)?;
        Self::from_coords(c.positions())
    }

    pub fn to_labeled(&self) -> LabeledConfig {
        LabeledConfig::from_positions(&self.coords)
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn dot(&self, root: &Root) -> i64 {
        root.terms()
            .iter()
            .map(|&(i, k)| k * self.coords[i - 1])
            .sum()
    }

    /// Every root of the given type orthogonal to this vector, in canonical order.
    pub fn applicable(&self, type_tag: RootType) -> Vec<Root> {
        let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, &x) in self.coords.iter().enumerate() {
            groups.entry(x).or_default().push(i + 1);
        }
        let mut out = Vec::new();
        for idx in groups.values() {
            for (p, &lo) in idx.iter().enumerate() {
                out.extend(idx[p + 1..].iter().map(|&hi| Root::Diff { lo, hi }));
            }
        }
        if type_tag == RootType::B {
            for (&x, idx) in groups.range(0..) {
                if x == 0 {
                    for (p, &a) in idx.iter().enumerate() {
                        out.extend(idx[p + 1..].iter().map(|&b| Root::Sum { a, b }));
                    }
                    out.extend(idx.iter().map(|&a| Root::Unit(a)));
                } else if let Some(mirror) = groups.get(&-x) {
                    for &i in idx {
                        for &j in mirror {
                            out.push(Root::Sum {
                                a: i.min(j),
                                b: i.max(j),
                            });
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Display for VectorState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn check_root(v: &VectorState, root: &Root) -> Result<()> {
    if !root.is_well_formed() || root.max_index() > v.n() {
        return Err(Error::Precondition(format!(
            "root {root} does not fit dimension {}",
            v.n()
        )));
    }
    if v.dot(root) != 0 {
        return Err(Error::RootNotOrthogonal {
            root: root.to_string(),
        });
    }
    Ok(())
}

/// `v + α`, provided `(v, α) = 0`.
pub fn vector_fire(v: &VectorState, root: &Root) -> Result<VectorState> {
    check_root(v, root)?;
    let mut out = v.clone();
    for (i, k) in root.terms() {
        out.coords[i - 1] += k;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorStrategy {
    /// First applicable root in canonical order.
    First,
    /// Last applicable root in canonical order.
    Last,
    /// Uniform over the applicable roots.
    Uniform(Seed),
}

impl VectorStrategy {
    pub fn from_name(name: &str, seed: Seed) -> Option<Self> {
        match name {
            "first" => Some(VectorStrategy::First),
            "last" => Some(VectorStrategy::Last),
            "uniform" => Some(VectorStrategy::Uniform(seed)),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            VectorStrategy::First => "first",
            VectorStrategy::Last => "last",
            VectorStrategy::Uniform(_) => "uniform",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorRun {
    pub final_state: VectorState,
    pub steps: u64,
    pub trace: Option<Vec<Root>>,
}

/// Fires roots from the origin until none is orthogonal to the state.
///
/// `budget` defaults to the labeled-run budget for `2n` chips, which bounds
/// both types (a type B run is half of a symmetric `2n`-chip run).
pub fn vector_stabilize(
    type_tag: RootType,
    n: usize,
    strategy: VectorStrategy,
    budget: Option<u64>,
    record: bool,
) -> Result<VectorRun> {
    let budget = budget.unwrap_or_else(|| default_budget(2 * n as u64));
    let mut v = VectorState::origin(n)?;
    let mut rng = match strategy {
        VectorStrategy::Uniform(seed) => Some(seed.rng()),
        _ => None,
    };
    let mut trace = record.then(Vec::new);
    let mut steps = 0;
    loop {
        let options = v.applicable(type_tag);
        if options.is_empty() {
            break;
        }
        if steps >= budget {
            return Err(Error::BudgetExhausted(budget));
        }
        let root = match strategy {
            VectorStrategy::First => options[0],
            VectorStrategy::Last => options[options.len() - 1],
            VectorStrategy::Uniform(_) => {
                options[rng.as_mut().expect("seeded").random_range(0..options.len())]
            }
        };
        for (i, k) in root.terms() {
            v.coords[i - 1] += k;
        }
        if let Some(t) = trace.as_mut() {
            t.push(root);
        }
        steps += 1;
    }
    Ok(VectorRun {
        final_state: v,
        steps,
        trace,
    })
}

/// Applies a root as a chip move on a configuration with labels `1..=n`:
/// a difference root is an ordinary firing of two co-located chips, a sum
/// root moves two chips at mirrored vertices one step right, and a unit root
/// moves a chip at the origin one step right.
pub fn type_b_move(c: &LabeledConfig, root: &Root) -> Result<LabeledConfig> {
    let at = |l: usize| {
        c.position(l as Label)
            .ok_or(Error::MissingLabel(l as Label))
    };
    let illegal = |vertex: Vertex, reason: &str| Error::IllegalMove {
        vertex,
        reason: reason.into(),
    };
    let mut out = c.clone();
    match *root {
        Root::Diff { lo, hi } => {
            let (p, q) = (at(lo)?, at(hi)?);
            if !root.is_well_formed() || p != q {
                return Err(illegal(p, "chips are not at the same vertex"));
            }
            out.set(lo as Label, p - 1);
            out.set(hi as Label, p + 1);
        }
        Root::Sum { a, b } => {
            let (p, q) = (at(a)?, at(b)?);
            if !root.is_well_formed() || p != -q {
                return Err(illegal(p, "chips are not at mirrored vertices"));
            }
            out.set(a as Label, p + 1);
            out.set(b as Label, q + 1);
        }
        Root::Unit(a) => {
            let p = at(a)?;
            if p != 0 {
                return Err(illegal(p, "chip is not at the origin"));
            }
            out.set(a as Label, 1);
        }
    }
    Ok(out)
}

/// Label of chip `±a` in the symmetric `2n`-chip process, renumbered to
/// `1..=2n` in increasing order: `−a ↦ n+1−a`, `a ↦ n+a`.
fn mirror_label(n: usize, a: usize, negative: bool) -> Label {
    (if negative { n + 1 - a } else { n + a }) as Label
}

/// The symmetric `2n`-chip configuration whose positive half is `c`.
pub fn symmetric_lift(c: &LabeledConfig, n: usize) -> Result<LabeledConfig> {
    c.require_standard_labels(n)?;
    let mut out = LabeledConfig::new();
    for (l, v) in c.iter() {
        out.set(mirror_label(n, l as usize, false), v);
        out.set(mirror_label(n, l as usize, true), -v);
    }
    Ok(out)
}

/// The positive half of a symmetric `2n`-chip configuration.
pub fn symmetric_project(c: &LabeledConfig, n: usize) -> Result<LabeledConfig> {
    c.require_standard_labels(2 * n)?;
    let mut out = LabeledConfig::new();
    for a in 1..=n {
        let v = c
            .position(mirror_label(n, a, false))
            .expect("standard labels");
        out.set(a as Label, v);
    }
    Ok(out)
}

/// The ordinary firings in the symmetric `2n`-chip process that realise a
/// type B root on a configuration `c` with labels `1..=n`.
pub fn symmetric_firings(c: &LabeledConfig, n: usize, root: &Root) -> Result<Vec<FiringMove>> {
    let pos = |l: usize| {
        c.position(l as Label)
            .ok_or(Error::MissingLabel(l as Label))
    };
    let pair = |v: Vertex, x: Label, y: Label| FiringMove::new(v, vec![x.min(y), x.max(y)]);
    let plus = |a| mirror_label(n, a, false);
    let minus = |a| mirror_label(n, a, true);
    Ok(match *root {
        Root::Diff { lo, hi } => {
            let v = pos(lo)?;
            vec![pair(v, plus(lo), plus(hi)), pair(-v, minus(hi), minus(lo))]
        }
        Root::Sum { a, b } => {
            let (p, q) = (pos(a)?, pos(b)?);
            vec![pair(p, minus(b), plus(a)), pair(q, minus(a), plus(b))]
        }
        Root::Unit(a) => vec![pair(pos(a)?, minus(a), plus(a))],
    })
}

/// Applies [`symmetric_firings`] to the lifted configuration, returning the
/// new `2n`-chip configuration.
pub fn symmetric_step(lifted: &LabeledConfig, n: usize, root: &Root) -> Result<LabeledConfig> {
    let half = symmetric_project(lifted, n)?;
    let line = PathGraph::line();
    symmetric_firings(&half, n, root)?
        .iter()
        .try_fold(lifted.clone(), |c, mv| fire(&line, &c, mv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::sorted_positions;

    fn vs(coords: &[i64]) -> VectorState {
        VectorState::from_coords(coords.to_vec()).unwrap()
    }

    #[test]
    fn root_set_examples() {
        assert_eq!(
            positive_roots(RootType::A, 2).unwrap().roots,
            vec![Root::Diff { lo: 1, hi: 2 }]
        );
        assert_eq!(positive_roots(RootType::A, 4).unwrap().roots.len(), 6);
        assert_eq!(
            positive_roots(RootType::B, 2).unwrap().roots,
            vec![
                Root::Diff { lo: 1, hi: 2 },
                Root::Sum { a: 1, b: 2 },
                Root::Unit(1),
                Root::Unit(2)
            ]
        );
        for n in 1..8 {
            let b = positive_roots(RootType::B, n).unwrap().roots;
            assert_eq!(b.len(), n * n);
            assert!(b.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(positive_roots(RootType::A, 0).is_err());
    }

    #[test]
    fn vector_fire_examples() {
        let v = vector_fire(&vs(&[0, 0]), &Root::Diff { lo: 1, hi: 2 }).unwrap();
        assert_eq!(v, vs(&[-1, 1]));
        let v = vector_fire(&v, &Root::Sum { a: 1, b: 2 }).unwrap();
        assert_eq!(v, vs(&[0, 2]));
        let v = vector_fire(&v, &Root::Unit(1)).unwrap();
        assert_eq!(v, vs(&[1, 2]));
        assert!(matches!(
            vector_fire(&v, &Root::Unit(1)),
            Err(Error::RootNotOrthogonal { .. })
        ));
        assert!(vector_fire(&v, &Root::Unit(3)).is_err());
        assert!(vector_fire(&v, &Root::Diff { lo: 2, hi: 1 }).is_err());
    }

    #[test]
    fn applicable_matches_brute_force() {
        let states = [
            vs(&[0, 0, 0]),
            vs(&[-1, 1, 0, 1]),
            vs(&[2, -2, 0, 0, 2]),
            vs(&[3, 1, -1]),
        ];
        for v in &states {
            for t in [RootType::A, RootType::B] {
                let brute: Vec<Root> = positive_roots(t, v.n())
                    .unwrap()
                    .roots
                    .into_iter()
                    .filter(|r| v.dot(r) == 0)
                    .collect();
                assert_eq!(v.applicable(t), brute, "{v} {t:?}");
            }
        }
    }

    #[test]
    fn stabilize_examples() {
        let r = vector_stabilize(RootType::B, 2, VectorStrategy::First, None, false).unwrap();
        assert_eq!(r.final_state, vs(&[1, 2]));
        let r = vector_stabilize(RootType::B, 1, VectorStrategy::Last, None, true).unwrap();
        assert_eq!(r.final_state, vs(&[1]));
        assert_eq!(r.trace.unwrap(), vec![Root::Unit(1)]);
        for strategy in [
            VectorStrategy::First,
            VectorStrategy::Last,
            VectorStrategy::Uniform(Seed::new(5)),
        ] {
            let r = vector_stabilize(RootType::A, 4, strategy, None, false).unwrap();
            assert_eq!(r.final_state.coords, sorted_positions(4).unwrap());
            assert_eq!(r.steps, 5);
            let r = vector_stabilize(RootType::B, 6, strategy, None, false).unwrap();
            assert_eq!(r.final_state.coords, (1..=6).collect::<Vec<_>>());
        }
        assert!(matches!(
            vector_stabilize(RootType::B, 6, VectorStrategy::First, Some(3), false),
            Err(Error::BudgetExhausted(3))
        ));
    }

    #[test]
    fn chip_moves_and_symmetric_process_agree() {
        for seed in 0..30 {
            let n = 1 + (seed as usize % 6);
            let run = vector_stabilize(
                RootType::B,
                n,
                VectorStrategy::Uniform(Seed::new(seed)),
                None,
                true,
            )
            .unwrap();
            let mut chips = LabeledConfig::delta_n(n as i64).unwrap();
            let mut lifted = symmetric_lift(&chips, n).unwrap();
            let mut v = VectorState::origin(n).unwrap();
            for root in run.trace.unwrap() {
                v = vector_fire(&v, &root).unwrap();
                chips = type_b_move(&chips, &root).unwrap();
                lifted = symmetric_step(&lifted, n, &root).unwrap();
                assert_eq!(VectorState::from_labeled(&chips, n).unwrap(), v);
                assert_eq!(symmetric_project(&lifted, n).unwrap(), chips);
                assert_eq!(symmetric_lift(&chips, n).unwrap(), lifted);
            }
        }
    }

    #[test]
    fn chip_moves_reject_illegal_roots() {
        let c = LabeledConfig::from_positions(&[-1, 1, 2]);
        assert!(type_b_move(&c, &Root::Diff { lo: 1, hi: 2 }).is_err());
        assert!(type_b_move(&c, &Root::Unit(1)).is_err());
        assert!(type_b_move(&c, &Root::Sum { a: 1, b: 3 }).is_err());
        assert_eq!(
            type_b_move(&c, &Root::Sum { a: 1, b: 2 }).unwrap(),
            LabeledConfig::from_positions(&[0, 2, 2])
        );
        assert!(type_b_move(&c, &Root::Unit(9)).is_err());
    }
}
