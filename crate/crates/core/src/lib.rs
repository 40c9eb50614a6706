//! Labeled and unlabeled chip-firing on path-like graphs.
//!
//! The crate simulates chip-firing on the line `Z`, the half-lines `N` and
//! `Ndir`, and their variants with loops and parallel edges; enumerates the
//! stable labeled configurations reachable from a pile at the origin;
//! estimates sorting probabilities under random protocols; and runs the
//! root-firing reformulation for root systems of types A and B.

pub mod config;
pub mod engine;
pub mod error;
pub mod explorer;
pub mod graph;
pub mod montecarlo;
pub mod rng;
pub mod vector;
pub mod verify;

pub use config::{
    compare, make_config, Comparison, Config, ConfigKind, Label, LabeledConfig, Order,
    StatisticsBundle, UnlabeledConfig, Vertex,
};
pub use engine::{FiringMove, StabilizationReport, Strategy};
pub use error::{Error, Result};
pub use graph::{parse_graph, Base, LocalStructure, PathGraph};
pub use rng::Seed;
