//! Firing moves, stabilization, closed-form oracles and conformance checks.
//!
//! A labeled firing at `v` picks `outdeg(v)` chips sitting at `v`; the
//! `left(v)` smallest labels step left, the `right(v)` largest step right and
//! the rest travel along loops and stay put. Unlabeled firing is the same
//! move with the labels forgotten.

mod board;
mod checks;
mod closed_form;
mod fenwick;
mod moves;
mod pile;
mod stabilize;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::{Label, Vertex};
use crate::rng::Seed;

pub use checks::{check_label_bounds, check_sorted, random_rightward_walk, SortCheck};
pub use closed_form::{
    closed_form_stabilization, linestab, predicted_counts, sorted_labeling, sorted_positions,
    PredictedCounts,
};
pub(crate) use moves::for_each_combination;
pub use moves::{fire, fire_unlabeled, legal_moves, run_script};
pub use stabilize::{
    default_budget, stabilize, stabilize_labeled, stabilize_unlabeled, RunOptions, Stabilized,
};

/// One firing: a vertex and, for labeled moves, the chips it sends.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiringMove {
    pub vertex: Vertex,
    /// Strictly increasing; empty for unlabeled moves.
    pub chips: Vec<Label>,
}

impl FiringMove {
    pub fn new(vertex: Vertex, chips: Vec<Label>) -> Self {
        Self { vertex, chips }
    }

    pub fn unlabeled(vertex: Vertex) -> Self {
        Self {
            vertex,
            chips: Vec::new(),
        }
    }
}

/// How the next move is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Leftmost unstable vertex, lexicographically first chips there.
    LeftmostVertex,
    /// Rightmost unstable vertex, lexicographically first chips there.
    RightmostVertex,
    /// Uniform over the full list of legal moves.
    UniformMove(Seed),
    /// Uniform unstable vertex, then a uniform chip subset at it.
    UniformVertexThenChips(Seed),
    Scripted(Vec<FiringMove>),
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::LeftmostVertex => "leftmost_vertex",
            Strategy::RightmostVertex => "rightmost_vertex",
            Strategy::UniformMove(_) => "uniform_move",
            Strategy::UniformVertexThenChips(_) => "uniform_vertex_then_chips",
            Strategy::Scripted(_) => "scripted",
        }
    }

    /// Builds a non-scripted strategy from its name.
    pub fn from_name(name: &str, seed: Seed) -> Option<Strategy> {
        Some(match name {
            "leftmost_vertex" => Strategy::LeftmostVertex,
            "rightmost_vertex" => Strategy::RightmostVertex,
            "uniform_move" => Strategy::UniformMove(seed),
            "uniform_vertex_then_chips" | "uniform_vertex_then_pair" => {
                Strategy::UniformVertexThenChips(seed)
            }
            _ => return None,
        })
    }

    /// The deterministic strategies plus both random ones for each seed.
    pub fn standard_set(seeds: impl IntoIterator<Item = u64>) -> Vec<Strategy> {
        let mut out = vec![Strategy::LeftmostVertex, Strategy::RightmostVertex];
        for s in seeds {
            out.push(Strategy::UniformMove(Seed::new(s)));
            out.push(Strategy::UniformVertexThenChips(Seed::new(s)));
        }
        out
    }
}

/// The last firing of a labeled run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LastFiring {
    pub vertex: Vertex,
    /// Every chip at the vertex just before it fired.
    pub held: Vec<Label>,
    pub fired: Vec<Label>,
}

/// Outcome of a stabilization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationReport<C> {
    pub final_config: C,
    pub total_firings: u64,
    /// Firings per vertex; vertices that never fired are absent.
    pub odometer: BTreeMap<Vertex, u64>,
    /// For each label `k`, the firings that moved a chip labeled `≤ k`
    /// together with one labeled `> k`. Empty for unlabeled runs.
    pub cross_firings: BTreeMap<Label, u64>,
    pub last_firing: Option<LastFiring>,
    /// Move log, present when tracing was requested.
    pub trace: Option<Vec<FiringMove>>,
    /// True when the move log hit its length cap.
    pub trace_truncated: bool,
}
