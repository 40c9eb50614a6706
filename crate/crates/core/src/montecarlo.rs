//! Random labeled firing of `Δⁿ` on `Z`: sampled and exact sorting
//! probabilities under the three protocols.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::config::LabeledConfig;
use crate::engine::{stabilize_labeled, LastFiring, RunOptions, Strategy};
use crate::error::{Error, Result};
use crate::explorer::Space;
use crate::graph::PathGraph;
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Each step picks uniformly among all legal moves.
    UniformMove,
    /// Each step picks a uniform unstable vertex, then a uniform chip pair there.
    UniformVertexThenPair,
    /// A uniformly random maximal firing sequence.
    UniformSequence,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [
        Protocol::UniformMove,
        Protocol::UniformVertexThenPair,
        Protocol::UniformSequence,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Protocol::UniformMove => "uniform_move",
            Protocol::UniformVertexThenPair => "uniform_vertex_then_pair",
            Protocol::UniformSequence => "uniform_sequence",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Protocol::ALL.into_iter().find(|p| p.name() == name)
    }

    fn strategy(&self, seed: Seed) -> Result<Strategy> {
        match self {
            Protocol::UniformMove => Ok(Strategy::UniformMove(seed)),
            Protocol::UniformVertexThenPair => Ok(Strategy::UniformVertexThenChips(seed)),
            Protocol::UniformSequence => Err(Error::Precondition(
                "uniform_sequence has no sampler; use the exact computation".into(),
            )),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of a batch of sampled runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRun {
    pub protocol: Protocol,
    pub n: u64,
    pub trials: u64,
    pub master_seed: u64,
    pub sorted_count: u64,
    /// `sorted_count / trials`, reduced.
    pub estimate: Ratio<u64>,
    /// 95% interval, for reporting only.
    pub ci95: (f64, f64),
    /// Trials (odd `n ≥ 3`) whose last firing broke [`last_move_ok`].
    pub last_move_violations: u64,
}

impl ProtocolRun {
    pub fn estimate_f64(&self) -> f64 {
        self.sorted_count as f64 / self.trials as f64
    }

    pub fn standard_error(&self) -> f64 {
        let p = self.estimate_f64();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Normal-approximation 95% interval, with the rule of three when every
/// trial agreed.
pub fn ci95(successes: u64, trials: u64) -> (f64, f64) {
    let t = trials as f64;
    if successes == 0 {
        return (0.0, (3.0 / t).min(1.0));
    }
    if successes == trials {
        return ((1.0 - 3.0 / t).max(0.0), 1.0);
    }
    let p = successes as f64 / t;
    let half = 1.96 * (p * (1.0 - p) / t).sqrt();
    ((p - half).max(0.0), (p + half).min(1.0))
}

fn is_sorted(c: &LabeledConfig) -> bool {
    c.positions().windows(2).all(|w| w[0] <= w[1])
}

/// Whether the last firing obeys the three-chip rule: the vertex held
/// exactly three chips, and a sorted ending means the outer two were fired
/// (the only one of the three pairs that leaves them locally in order).
pub fn last_move_ok(last: &LastFiring, ended_sorted: bool) -> bool {
    let &[a, _, c] = last.held.as_slice() else {
        return false;
    };
    !ended_sorted || last.fired == [a, c]
}

/// Samples `trials` labeled stabilizations of `Δⁿ` on `Z`. Trial `t` draws
/// from stream `t` of the master seed, so the result does not depend on
/// scheduling.
pub fn estimate_sort_probability(
    n: u64,
    protocol: Protocol,
    trials: u64,
    master_seed: u64,
) -> Result<ProtocolRun> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be positive".into()));
    }
    protocol.strategy(Seed::new(master_seed))?;
    let line = PathGraph::line();
    let start = LabeledConfig::delta_n(n as i64)?;
    let check_last = n % 2 == 1 && n >= 3;
    let (sorted_count, last_move_violations) = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(u64, u64)> {
            let strategy = protocol.strategy(Seed::new(master_seed).with_stream(t))?;
            let r = stabilize_labeled(&line, &start, &strategy, RunOptions::default())?;
            let sorted = is_sorted(&r.final_config);
            let bad = check_last
                && !r
                    .last_firing
                    .as_ref()
                    .is_some_and(|l| last_move_ok(l, sorted));
            Ok((u64::from(sorted), u64::from(bad)))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(ProtocolRun {
        protocol,
        n,
        trials,
        master_seed,
        sorted_count,
        estimate: Ratio::new(sorted_count, trials),
        ci95: ci95(sorted_count, trials),
        last_move_violations,
    })
}

/// Default largest `n` for [`exact_sort_probability`].
pub const EXACT_GUARD: u64 = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub protocol: Protocol,
    pub n: u64,
    pub probability: BigRational,
    /// Distinct labeled states in the reachable graph.
    pub states: u64,
}

impl ExactResult {
    /// `max(0, p − 1/3)`.
    pub fn excess_over_one_third(&self) -> BigRational {
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        let d = &self.probability - third;
        if d > BigRational::zero() {
            d
        } else {
            BigRational::zero()
        }
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.probability.to_f64().unwrap_or(f64::NAN)
    }
}

enum Value {
    Probability(BigRational),
    /// (sorted completions, all completions)
    Paths(BigUint, BigUint),
}

/// The exact probability that `Δⁿ` on `Z` ends sorted, by dynamic
/// programming over the reachable labeled states (an acyclic graph, walked
/// in post-order). `guard` caps `n`; `None` uses [`EXACT_GUARD`].
pub fn exact_sort_probability(
    n: u64,
    protocol: Protocol,
    guard: Option<u64>,
) -> Result<ExactResult> {
    let guard = guard.unwrap_or(EXACT_GUARD);
    if n > guard {
        return Err(Error::Infeasible(format!(
            "n = {n} is above the exact-computation guard {guard}"
        )));
    }
    let line = PathGraph::line();
    let space = Space::new(&line, n as usize)?;
    let root = space.codec.encode(&vec![0; n as usize])?;
    let mut memo: FxHashMap<u128, Value> = FxHashMap::default();
    let mut stack = vec![(root, false)];
    let (mut succ, mut groups) = (Vec::new(), Vec::new());
    while let Some((s, children_done)) = stack.pop() {
        if memo.contains_key(&s) {
            continue;
        }
        succ.clear();
        groups.clear();
        space.expand(s, &mut succ, &mut groups)?;
        if succ.is_empty() {
            let sorted = is_sorted(&space.codec.to_config(s));
            let v = match protocol {
                Protocol::UniformSequence => {
                    Value::Paths(BigUint::from(u8::from(sorted)), BigUint::one())
                }
                _ => Value::Probability(BigRational::from_integer(BigInt::from(u8::from(sorted)))),
            };
            memo.insert(s, v);
            continue;
        }
        if !children_done {
            stack.push((s, true));
            stack.extend(
                succ.iter()
                    .filter(|t| !memo.contains_key(t))
                    .map(|&t| (t, false)),
            );
            continue;
        }
        let value = combine(protocol, &succ, &groups, &memo);
        memo.insert(s, value);
    }
    let probability = match memo.remove(&root).expect("root evaluated") {
        Value::Probability(p) => p,
        Value::Paths(good, all) => BigRational::new(BigInt::from(good), BigInt::from(all)),
    };
    Ok(ExactResult {
        protocol,
        n,
        probability,
        states: memo.len() as u64 + 1,
    })
}

fn combine(
    protocol: Protocol,
    succ: &[u128],
    groups: &[usize],
    memo: &FxHashMap<u128, Value>,
) -> Value {
    let child = |t: &u128| memo.get(t).expect("children are evaluated first");
    let prob = |t: &u128| match child(t) {
        Value::Probability(p) => p,
        Value::Paths(..) => unreachable!("one protocol per computation"),
    };
    match protocol {
        Protocol::UniformMove => {
            let sum: BigRational = succ.iter().map(prob).sum();
            Value::Probability(sum / BigInt::from(succ.len()))
        }
        Protocol::UniformVertexThenPair => {
            let mut total = BigRational::zero();
            let mut at = 0;
            for &g in groups {
                let sum: BigRational = succ[at..at + g].iter().map(prob).sum();
                total += sum / BigInt::from(g);
                at += g;
            }
            Value::Probability(total / BigInt::from(groups.len()))
        }
        Protocol::UniformSequence => {
            let (mut good, mut all) = (BigUint::zero(), BigUint::zero());
            for t in succ {
                if let Value::Paths(g, a) = child(t) {
                    good += g;
                    all += a;
                }
            }
            Value::Paths(good, all)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third() -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(3))
    }

    #[test]
    fn exact_small_cases() {
        for p in Protocol::ALL {
            assert_eq!(
                exact_sort_probability(3, p, None).unwrap().probability,
                third(),
                "{p}"
            );
            assert!(exact_sort_probability(1, p, None)
                .unwrap()
                .probability
                .is_one());
            assert!(exact_sort_probability(4, p, None)
                .unwrap()
                .probability
                .is_one());
        }
        assert!(matches!(
            exact_sort_probability(8, Protocol::UniformMove, None),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn sampling_is_reproducible_and_close() {
        let a = estimate_sort_probability(3, Protocol::UniformMove, 3000, 11).unwrap();
        let b = estimate_sort_probability(3, Protocol::UniformMove, 3000, 11).unwrap();
        assert_eq!(a, b);
        assert!((a.estimate_f64() - 1.0 / 3.0).abs() < 4.0 * a.standard_error());
        assert_eq!(a.last_move_violations, 0);
        let even = estimate_sort_probability(4, Protocol::UniformVertexThenPair, 200, 1).unwrap();
        assert_eq!(even.estimate, Ratio::from_integer(1));
        assert!(estimate_sort_probability(3, Protocol::UniformSequence, 10, 1).is_err());
        assert!(estimate_sort_probability(3, Protocol::UniformMove, 0, 1).is_err());
    }

    #[test]
    fn intervals() {
        assert_eq!(ci95(0, 100), (0.0, 0.03));
        assert_eq!(ci95(100, 100), (0.97, 1.0));
        let (lo, hi) = ci95(50, 100);
        assert!(lo < 0.5 && hi > 0.5);
    }

    #[test]
    fn last_move_rule() {
        let outer = LastFiring {
            vertex: 0,
            held: vec![2, 4, 5],
            fired: vec![2, 5],
        };
        assert!(last_move_ok(&outer, true));
        assert!(last_move_ok(&outer, false));
        let inner = LastFiring {
            vertex: 0,
            held: vec![2, 4, 5],
            fired: vec![4, 5],
        };
        assert!(last_move_ok(&inner, false));
        assert!(!last_move_ok(&inner, true));
        let pair = LastFiring {
            vertex: 0,
            held: vec![1, 2],
            fired: vec![1, 2],
        };
        assert!(!last_move_ok(&pair, true));
    }

    #[test]
    fn names_round_trip() {
        for p in Protocol::ALL {
            assert_eq!(Protocol::from_name(p.name()), Some(p));
        }
        assert_eq!(Protocol::from_name("nope"), None);
    }
}
