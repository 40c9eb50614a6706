use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::{Config, LabeledConfig, UnlabeledConfig};
use crate::error::{Error, Result};
use crate::graph::PathGraph;

use super::board::Board;
use super::pile::Pile;
use super::{FiringMove, StabilizationReport, Strategy};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Maximum number of firings; `None` uses [`default_budget`].
    pub budget: Option<u64>,
    /// Record at most this many moves.
    pub trace: Option<usize>,
}

impl RunOptions {
    pub fn traced(cap: usize) -> Self {
        Self {
            trace: Some(cap),
            ..Self::default()
        }
    }

    pub fn with_budget(budget: u64) -> Self {
        Self {
            budget: Some(budget),
            ..Self::default()
        }
    }
}

/// `4·m(m+1)(2m+1)/6 + 10⁶` with `m = ⌊chips/2⌋`.
pub fn default_budget(chips: u64) -> u64 {
    let m = (chips / 2) as u128;
    let cubic = 4 * m * (m + 1) * (2 * m + 1) / 6;
    u64::try_from(cubic + 1_000_000).unwrap_or(u64::MAX)
}

struct Tracer {
    cap: Option<usize>,
    moves: Vec<FiringMove>,
    truncated: bool,
}

impl Tracer {
    fn new(cap: Option<usize>) -> Self {
        Self {
            cap,
            moves: Vec::new(),
            truncated: false,
        }
    }

    fn wants(&self) -> bool {
        matches!(self.cap, Some(cap) if self.moves.len() < cap)
    }

    fn push(&mut self, mv: FiringMove) {
        self.moves.push(mv);
    }

    fn skip(&mut self) {
        self.truncated |= self.cap.is_some();
    }

    fn finish(self) -> (Option<Vec<FiringMove>>, bool) {
        (self.cap.map(|_| self.moves), self.truncated)
    }
}

/// Stabilizes an unlabeled configuration.
///
/// The deterministic strategies topple the chosen vertex as many times as it
/// can in a row; the random ones fire a single uniformly chosen unstable
/// vertex per step (for unlabeled chips each unstable vertex is exactly one
/// move). Final configuration and odometer do not depend on the strategy.
pub fn stabilize_unlabeled(
    graph: &PathGraph,
    start: &UnlabeledConfig,
    strategy: &Strategy,
    opts: RunOptions,
) -> Result<StabilizationReport<UnlabeledConfig>> {
    let budget = opts.budget.unwrap_or_else(|| default_budget(start.total()));
    let mut pile = Pile::new(graph, start)?;
    let mut tracer = Tracer::new(opts.trace);
    let mut rng = match strategy {
        Strategy::UniformMove(seed) | Strategy::UniformVertexThenChips(seed) => Some(seed.rng()),
        _ => None,
    };
    let mut script = match strategy {
        Strategy::Scripted(moves) => Some(moves.iter()),
        _ => None,
    };

    while pile.unstable_count() > 0 {
        let remaining = budget - pile.firings;
        if remaining == 0 {
            return Err(Error::BudgetExhausted(budget));
        }
        let (v, times) = match strategy {
            Strategy::LeftmostVertex | Strategy::RightmostVertex => {
                let k = if matches!(strategy, Strategy::LeftmostVertex) {
                    0
                } else {
                    pile.unstable_count() - 1
                };
                let i = pile.nth_unstable(k);
                (pile.vertex(i), pile.max_batch(i).min(remaining))
            }
            Strategy::UniformMove(_) | Strategy::UniformVertexThenChips(_) => {
                use rand::Rng;
                let rng = rng.as_mut().expect("seeded strategy");
                let k = rng.random_range(0..pile.unstable_count());
                (pile.vertex(pile.nth_unstable(k)), 1)
            }
            Strategy::Scripted(_) => {
                let mv = script
                    .as_mut()
                    .and_then(|s| s.next())
                    .ok_or(Error::ScriptExhausted)?;
                (mv.vertex, 1)
            }
        };
        pile.fire(v, times)?;
        for _ in 0..times {
            if !tracer.wants() {
                tracer.skip();
                break;
            }
            tracer.push(FiringMove::unlabeled(v));
        }
    }
    reject_leftover_script(script)?;

    let (trace, trace_truncated) = tracer.finish();
    Ok(StabilizationReport {
        final_config: pile.to_config(),
        total_firings: pile.firings,
        odometer: pile.odometer(),
        cross_firings: BTreeMap::new(),
        last_firing: None,
        trace,
        trace_truncated,
    })
}

fn reject_leftover_script<'a>(script: Option<impl Iterator<Item = &'a FiringMove>>) -> Result<()> {
    if let Some(mv) = script.and_then(|mut s| s.next()) {
        return Err(Error::IllegalMove {
            vertex: mv.vertex,
            reason: "configuration is already stable".into(),
        });
    }
    Ok(())
}

/// Stabilizes a labeled configuration, one move at a time.
pub fn stabilize_labeled(
    graph: &PathGraph,
    start: &LabeledConfig,
    strategy: &Strategy,
    opts: RunOptions,
) -> Result<StabilizationReport<LabeledConfig>> {
    let budget = opts
        .budget
        .unwrap_or_else(|| default_budget(start.len() as u64));
    let mut board = Board::new(graph, start)?;
    let mut tracer = Tracer::new(opts.trace);
    let mut rng = match strategy {
        Strategy::UniformMove(seed) | Strategy::UniformVertexThenChips(seed) => Some(seed.rng()),
        _ => None,
    };
    let mut script = match strategy {
        Strategy::Scripted(moves) => Some(moves.iter()),
        _ => None,
    };

    while !board.is_stable() {
        if board.firings >= budget {
            return Err(Error::BudgetExhausted(budget));
        }
        match strategy {
            Strategy::LeftmostVertex => {
                let i = board.leftmost_unstable().expect("unstable board");
                board.fire_first(i);
            }
            Strategy::RightmostVertex => {
                let i = board.rightmost_unstable().expect("unstable board");
                board.fire_first(i);
            }
            Strategy::UniformMove(_) => board.fire_uniform_move(rng.as_mut().expect("seeded")),
            Strategy::UniformVertexThenChips(_) => {
                board.fire_uniform_vertex(rng.as_mut().expect("seeded"))
            }
            Strategy::Scripted(_) => {
                let mv = script
                    .as_mut()
                    .and_then(|s| s.next())
                    .ok_or(Error::ScriptExhausted)?;
                board.fire_move(mv)?;
            }
        }
        if tracer.wants() {
            tracer.push(board.last_move().expect("a move was fired"));
        } else {
            tracer.skip();
        }
    }
    reject_leftover_script(script)?;

    let (trace, trace_truncated) = tracer.finish();
    Ok(StabilizationReport {
        final_config: board.to_config(),
        total_firings: board.firings,
        odometer: board.odometer(),
        cross_firings: board.cross_firings(),
        last_firing: board.last_firing(),
        trace,
        trace_truncated,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stabilized {
    Unlabeled(StabilizationReport<UnlabeledConfig>),
    Labeled(StabilizationReport<LabeledConfig>),
}

impl Stabilized {
    pub fn total_firings(&self) -> u64 {
        match self {
            Stabilized::Unlabeled(r) => r.total_firings,
            Stabilized::Labeled(r) => r.total_firings,
        }
    }
}

pub fn stabilize(
    graph: &PathGraph,
    start: &Config,
    strategy: &Strategy,
    opts: RunOptions,
) -> Result<Stabilized> {
    Ok(match start {
        Config::Unlabeled(c) => {
            Stabilized::Unlabeled(stabilize_unlabeled(graph, c, strategy, opts)?)
        }
        Config::Labeled(c) => Stabilized::Labeled(stabilize_labeled(graph, c, strategy, opts)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{legal_moves, run_script};
    use crate::graph::parse_graph;
    use crate::rng::Seed;

    fn z() -> PathGraph {
        PathGraph::line()
    }

    #[test]
    fn worked_example_all_strategies() {
        let d4 = LabeledConfig::delta_n(4).unwrap();
        let expected = LabeledConfig::from_positions(&[-2, -1, 1, 2]);
        for strategy in Strategy::standard_set(0..5) {
            let r = stabilize_labeled(&z(), &d4, &strategy, RunOptions::default()).unwrap();
            assert_eq!(r.final_config, expected, "{strategy:?}");
            assert_eq!(r.total_firings, 5);
            assert_eq!(r.odometer, BTreeMap::from([(-1, 1), (0, 3), (1, 1)]));
        }
    }

    #[test]
    fn scripted_worked_example() {
        let script: Vec<FiringMove> = [
            (0, [1, 2]),
            (0, [3, 4]),
            (-1, [1, 3]),
            (1, [2, 4]),
            (0, [2, 3]),
        ]
        .into_iter()
        .map(|(v, c)| FiringMove::new(v, c.to_vec()))
        .collect();
        let d4 = LabeledConfig::delta_n(4).unwrap();
        let r = stabilize_labeled(
            &z(),
            &d4,
            &Strategy::Scripted(script.clone()),
            RunOptions::traced(10),
        )
        .unwrap();
        assert_eq!(
            r.final_config,
            LabeledConfig::from_positions(&[-2, -1, 1, 2])
        );
        assert_eq!(r.trace.as_deref(), Some(script.as_slice()));
        assert_eq!(
            r.last_firing.unwrap(),
            crate::engine::LastFiring {
                vertex: 0,
                held: vec![2, 3],
                fired: vec![2, 3]
            }
        );

        let short = Strategy::Scripted(script[..3].to_vec());
        assert_eq!(
            stabilize_labeled(&z(), &d4, &short, RunOptions::default()),
            Err(Error::ScriptExhausted)
        );
        let mut long = script.clone();
        long.push(FiringMove::new(0, vec![1, 2]));
        assert!(
            stabilize_labeled(&z(), &d4, &Strategy::Scripted(long), RunOptions::default()).is_err()
        );
        assert_eq!(
            run_script(&z(), &d4, &script).unwrap(),
            LabeledConfig::from_positions(&[-2, -1, 1, 2])
        );
    }

    #[test]
    fn unlabeled_examples() {
        let c5 = UnlabeledConfig::n_delta0(5).unwrap();
        for strategy in Strategy::standard_set([1, 2]) {
            let r = stabilize_unlabeled(&z(), &c5, &strategy, RunOptions::default()).unwrap();
            assert_eq!(r.final_config, UnlabeledConfig::delta_interval(-2, 2));
            assert_eq!(r.total_firings, 5);
        }
    }

    #[test]
    fn half_lines_sort() {
        let half = parse_graph("N").unwrap();
        let dir = parse_graph("Ndir").unwrap();
        for n in 1..=8i64 {
            let dn = LabeledConfig::delta_n(n).unwrap();
            for strategy in Strategy::standard_set([n as u64]) {
                let a = stabilize_labeled(&half, &dn, &strategy, RunOptions::default()).unwrap();
                let want: Vec<i64> = (1..=n).collect();
                assert_eq!(a.final_config.positions(), want);
                let b = stabilize_labeled(&dir, &dn, &strategy, RunOptions::default()).unwrap();
                let want: Vec<i64> = (0..n).collect();
                assert_eq!(b.final_config.positions(), want);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let d4 = LabeledConfig::delta_n(4).unwrap();
        assert_eq!(
            stabilize_labeled(
                &z(),
                &d4,
                &Strategy::LeftmostVertex,
                RunOptions::with_budget(4)
            ),
            Err(Error::BudgetExhausted(4))
        );
        let c = UnlabeledConfig::n_delta0(4).unwrap();
        assert_eq!(
            stabilize_unlabeled(
                &z(),
                &c,
                &Strategy::LeftmostVertex,
                RunOptions::with_budget(2)
            ),
            Err(Error::BudgetExhausted(2))
        );
        assert_eq!(default_budget(4), 4 * 5 + 1_000_000);
    }

    #[test]
    fn trace_is_capped() {
        let d6 = LabeledConfig::delta_n(6).unwrap();
        let r = stabilize_labeled(
            &z(),
            &d6,
            &Strategy::UniformMove(Seed::new(3)),
            RunOptions::traced(4),
        )
        .unwrap();
        assert_eq!(r.trace.as_ref().unwrap().len(), 4);
        assert!(r.trace_truncated);
        let first = &r.trace.unwrap()[0];
        assert!(legal_moves(&z(), &d6).contains(first));
        let untraced = stabilize_labeled(
            &z(),
            &d6,
            &Strategy::UniformMove(Seed::new(3)),
            RunOptions::default(),
        )
        .unwrap();
        assert!(untraced.trace.is_none() && !untraced.trace_truncated);
    }

    #[test]
    fn sorts_away_from_the_origin() {
        let c = LabeledConfig::from_pairs((1..=40).map(|l| (l, 100))).unwrap();
        let r =
            stabilize_labeled(&z(), &c, &Strategy::LeftmostVertex, RunOptions::default()).unwrap();
        let positions = r.final_config.positions();
        let expected: Vec<i64> = (80..=99).chain(101..=120).collect();
        assert_eq!(positions, expected);
    }
}
