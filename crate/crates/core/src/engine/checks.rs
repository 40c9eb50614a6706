//! Conformance checks on labeled terminals, and the rightward walk used to
//! test order preservation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Label, LabeledConfig, UnlabeledConfig, Vertex};
use crate::error::{Error, Result};
use crate::graph::{Base, PathGraph};
use crate::rng::Seed;

use super::closed_form::sorted_positions;
use super::moves::fire_unlabeled;

/// Verdict of [`check_sorted`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortCheck {
    pub sorted: bool,
    /// First adjacent pair `(k, k+1)` with `pos(k) > pos(k+1)`.
    pub first_violation: Option<(Label, Label)>,
    /// On the plain line with even `n`: whether every chip sits exactly where
    /// the closed-form sorted terminal puts it. `None` elsewhere.
    pub exact_main: Option<bool>,
}

fn is_plain_line(graph: &PathGraph) -> bool {
    graph.base() == Base::TwoWayLine && graph.loops().is_empty() && graph.multiplicity() == 1
}

/// Checks that a stable terminal has positions weakly increasing in label.
pub fn check_sorted(d: &LabeledConfig, graph: &PathGraph, n: usize) -> Result<SortCheck> {
    d.require_standard_labels(n)?;
    let under = d.underlying();
    graph.check_support(&under)?;
    if !graph.is_stable(&under) {
        return Err(Error::NotStable);
    }
    let pos = d.positions();
    let first_violation = pos
        .windows(2)
        .position(|w| w[0] > w[1])
        .map(|i| (i as Label + 1, i as Label + 2));
    let exact_main = (is_plain_line(graph) && n.is_multiple_of(2))
        .then(|| sorted_positions(n as u64).map(|want| want == pos))
        .transpose()?;
    Ok(SortCheck {
        sorted: first_violation.is_none(),
        first_violation,
        exact_main,
    })
}

/// Whether every chip `k` satisfies `−⌊(n+1−k)/2⌋ ≤ C(k) ≤ ⌊k/2⌋`.
pub fn check_label_bounds(c: &LabeledConfig, n: usize) -> Result<bool> {
    c.require_standard_labels(n)?;
    let n = n as i64;
    Ok(c.iter().all(|(k, v)| {
        let k = k as i64;
        -((n + 1 - k) / 2) <= v && v <= k / 2
    }))
}

/// A seeded walk on `Z` from `c`: each step either fires a random unstable
/// vertex or moves one chip (chosen with probability proportional to the
/// pile it sits in) one vertex to the right. The result is rightward
/// reachable from `c`.
pub fn random_rightward_walk(
    c: &UnlabeledConfig,
    steps: u64,
    seed: Seed,
) -> Result<UnlabeledConfig> {
    if steps > 0 && c.is_empty() {
        return Err(Error::Precondition(
            "cannot walk an empty configuration".into(),
        ));
    }
    let line = PathGraph::line();
    let mut rng = seed.rng();
    let mut cur = c.clone();
    for _ in 0..steps {
        let unstable: Vec<Vertex> = cur
            .iter()
            .filter(|&(_, k)| k >= 2)
            .map(|(v, _)| v)
            .collect();
        if !unstable.is_empty() && rng.random_bool(0.5) {
            let v = unstable[rng.random_range(0..unstable.len())];
            cur = fire_unlabeled(&line, &cur, v)?;
        } else {
            let mut pick = rng.random_range(0..cur.total());
            let v = cur
                .iter()
                .find_map(|(v, k)| {
                    if pick < k {
                        Some(v)
                    } else {
                        pick -= k;
                        None
                    }
                })
                .expect("pick is below the total");
            cur.shift_right(v)?;
        }
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{compare, Order};
    use crate::engine::{stabilize_unlabeled, RunOptions, Strategy};
    use crate::graph::parse_graph;

    #[test]
    fn check_sorted_examples() {
        let z = PathGraph::line();
        let d = LabeledConfig::from_positions(&[-2, -1, 1, 2]);
        let r = check_sorted(&d, &z, 4).unwrap();
        assert!(r.sorted && r.exact_main == Some(true));

        let odd = LabeledConfig::from_pairs([(1, -1), (3, 0), (2, 1)]).unwrap();
        let r = check_sorted(&odd, &z, 3).unwrap();
        assert!(!r.sorted);
        assert_eq!(r.first_violation, Some((2, 3)));
        assert_eq!(r.exact_main, None);

        assert!(
            check_sorted(&LabeledConfig::from_positions(&[0]), &z, 1)
                .unwrap()
                .sorted
        );
        assert_eq!(
            check_sorted(&LabeledConfig::delta_n(2).unwrap(), &z, 2),
            Err(Error::NotStable)
        );
        assert!(check_sorted(&d, &z, 5).is_err());

        // sorted but not at the closed-form positions
        let shifted = LabeledConfig::from_positions(&[-1, 0, 1, 2]);
        assert_eq!(
            check_sorted(&shifted, &z, 4).unwrap().exact_main,
            Some(false)
        );
        let ndir = parse_graph("Ndir").unwrap();
        let r = check_sorted(&LabeledConfig::from_positions(&[0, 1, 2]), &ndir, 3).unwrap();
        assert!(r.sorted && r.exact_main.is_none());
    }

    #[test]
    fn label_bounds_examples() {
        assert!(check_label_bounds(&LabeledConfig::delta_n(7).unwrap(), 7).unwrap());
        assert!(check_label_bounds(&LabeledConfig::from_positions(&[-2, 0, 0, 0]), 4).unwrap());
        assert!(!check_label_bounds(&LabeledConfig::from_positions(&[0, 2, 0, 0]), 4).unwrap());
        assert!(check_label_bounds(&LabeledConfig::from_positions(&[0]), 2).is_err());
    }

    #[test]
    fn rightward_walk_examples() {
        let c = UnlabeledConfig::n_delta0(2).unwrap();
        assert_eq!(random_rightward_walk(&c, 0, Seed::new(1)).unwrap(), c);
        assert!(random_rightward_walk(&UnlabeledConfig::new(), 1, Seed::new(1)).is_err());
        for s in 0..20 {
            let d = random_rightward_walk(&c, 5, Seed::new(s)).unwrap();
            assert_eq!(d.total(), 2);
            let stab = |x: &UnlabeledConfig| {
                stabilize_unlabeled(
                    &PathGraph::line(),
                    x,
                    &Strategy::LeftmostVertex,
                    RunOptions::default(),
                )
                .unwrap()
                .final_config
            };
            let cmp = compare(&stab(&c), &stab(&d)).unwrap();
            assert!(matches!(cmp.order, Order::Less | Order::Equal), "{d}");
            assert_eq!(d, random_rightward_walk(&c, 5, Seed::new(s)).unwrap());
        }
    }
}
