//! Path-like graphs: the two-way line `Z`, the half-lines `N` and `Ndir`,
//! with optional extra loops and a uniform edge multiplicity.
//!
//! Text form (whitespace separated):
//!
//! ```text
//! <base> [loops=v1:k1,v2:k2,...] [r=<multiplicity>]
//! ```
//!
//! where `<base>` is one of `Z`, `N`, `Ndir`. Printing a parsed graph gives
//! its canonical form, which parses back to the same value.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{UnlabeledConfig, Vertex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Base {
    /// Vertices ℤ, undirected edges `{i, i+1}`.
    TwoWayLine,
    /// Vertices ℕ, undirected edges `{i, i+1}`.
    HalfLine,
    /// Vertices ℕ, a directed edge `(i, i+1)` and a loop `(i, i)` at every vertex.
    HalfLineDirectedLoops,
}

impl Base {
    fn token(self) -> &'static str {
        match self {
            Base::TwoWayLine => "Z",
            Base::HalfLine => "N",
            Base::HalfLineDirectedLoops => "Ndir",
        }
    }
}

/// Out-edges at one vertex, in firing order: left edges, then loops, then
/// right edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalStructure {
    pub left: u64,
    pub mid: u64,
    pub right: u64,
}

impl LocalStructure {
    pub fn outdeg(&self) -> u64 {
        self.left + self.mid + self.right
    }

    /// Chips that actually leave the vertex when it fires once.
    pub fn movers(&self) -> u64 {
        self.left + self.right
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathGraph {
    base: Base,
    loops: BTreeMap<Vertex, u64>,
    multiplicity: u64,
}

impl PathGraph {
    pub fn new(base: Base) -> Self {
        Self {
            base,
            loops: BTreeMap::new(),
            multiplicity: 1,
        }
    }

    pub fn line() -> Self {
        Self::new(Base::TwoWayLine)
    }

    pub fn half_line() -> Self {
        Self::new(Base::HalfLine)
    }

    pub fn half_line_directed() -> Self {
        Self::new(Base::HalfLineDirectedLoops)
    }

    /// `Z⟨S⟩`: the line with one added loop at every vertex of `S`.
    pub fn line_with_loops<I: IntoIterator<Item = Vertex>>(s: I) -> Self {
        let mut g = Self::line();
        for v in s {
            g.loops.insert(v, 1);
        }
        g
    }

    pub fn with_loops(mut self, v: Vertex, count: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::GraphSyntax(format!(
                "loop count at {v} must be positive"
            )));
        }
        if v < 0 && self.is_half_line() {
            return Err(Error::GraphSyntax(format!(
                "loops at negative vertex {v} on a half-line"
            )));
        }
        self.loops.insert(v, count);
        Ok(self)
    }

    pub fn with_multiplicity(mut self, r: u64) -> Result<Self> {
        if r == 0 {
            return Err(Error::GraphSyntax("multiplicity r must be positive".into()));
        }
        self.multiplicity = r;
        Ok(self)
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    /// Added loops (before multiplicity), keyed by vertex.
    pub fn loops(&self) -> &BTreeMap<Vertex, u64> {
        &self.loops
    }

    pub fn loops_at(&self, v: Vertex) -> u64 {
        self.loops.get(&v).copied().unwrap_or(0)
    }

    pub fn is_half_line(&self) -> bool {
        self.base != Base::TwoWayLine
    }

    /// Leftmost vertex, if the vertex set is bounded below.
    pub fn min_vertex(&self) -> Option<Vertex> {
        self.is_half_line().then_some(0)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v >= 0 || !self.is_half_line()
    }

    pub fn local_structure(&self, v: Vertex) -> Result<LocalStructure> {
        if !self.contains(v) {
            return Err(Error::VertexOutOfDomain(v));
        }
        let r = self.multiplicity;
        let extra = self.loops_at(v);
        Ok(match self.base {
            Base::TwoWayLine => LocalStructure {
                left: r,
                mid: r * extra,
                right: r,
            },
            Base::HalfLine if v == 0 => LocalStructure {
                left: 0,
                mid: r * extra,
                right: r,
            },
            Base::HalfLine => LocalStructure {
                left: r,
                mid: r * extra,
                right: r,
            },
            Base::HalfLineDirectedLoops => LocalStructure {
                left: 0,
                mid: r * (1 + extra),
                right: r,
            },
        })
    }

    /// Local structure for a vertex already known to be in the graph.
    pub(crate) fn local(&self, v: Vertex) -> LocalStructure {
        self.local_structure(v).expect("vertex inside the graph")
    }

    pub fn outdeg(&self, v: Vertex) -> Result<u64> {
        self.local_structure(v).map(|s| s.outdeg())
    }

    /// True when every vertex holds fewer chips than its outdegree.
    pub fn is_stable(&self, c: &UnlabeledConfig) -> bool {
        c.iter()
            .all(|(v, k)| self.contains(v) && k < self.local(v).outdeg())
    }

    /// Checks that every occupied vertex belongs to the graph.
    pub fn check_support(&self, c: &UnlabeledConfig) -> Result<()> {
        match c.min() {
            Some(v) if !self.contains(v) => Err(Error::VertexOutOfDomain(v)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for PathGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base.token())?;
        if !self.loops.is_empty() {
            f.write_str(" loops=")?;
            for (i, (v, k)) in self.loops.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}:{k}")?;
            }
        }
        if self.multiplicity != 1 {
            write!(f, " r={}", self.multiplicity)?;
        }
        Ok(())
    }
}

impl FromStr for PathGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_graph(s)
    }
}

pub fn parse_graph(spec: &str) -> Result<PathGraph> {
    let mut fields = spec.split_whitespace();
    let base = match fields.next() {
        Some("Z") => Base::TwoWayLine,
        Some("N") => Base::HalfLine,
        Some("Ndir") => Base::HalfLineDirectedLoops,
        Some(other) => return Err(Error::GraphSyntax(format!("unknown base `{other}`"))),
        None => return Err(Error::GraphSyntax("empty graph spec".into())),
    };
    let mut graph = PathGraph::new(base);
    let (mut seen_loops, mut seen_r) = (false, false);
    for field in fields {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::GraphSyntax(format!("expected key=value, got `{field}`")))?;
        match key {
            "loops" if !seen_loops => {
                seen_loops = true;
                for item in value.split(',') {
                    let (v, k) = item.split_once(':').ok_or_else(|| {
                        Error::GraphSyntax(format!("expected vertex:count, got `{item}`"))
                    })?;
                    let v: Vertex = parse_num(v)?;
                    let k: u64 = parse_num(k)?;
                    if graph.loops.contains_key(&v) {
                        return Err(Error::GraphSyntax(format!("vertex {v} listed twice")));
                    }
                    graph = graph.with_loops(v, k)?;
                }
            }
            "r" if !seen_r => {
                seen_r = true;
                graph = graph.with_multiplicity(parse_num(value)?)?;
            }
            "loops" | "r" => return Err(Error::GraphSyntax(format!("`{key}` given twice"))),
            _ => return Err(Error::GraphSyntax(format!("unknown field `{key}`"))),
        }
    }
    Ok(graph)
}

fn parse_num<T: FromStr>(s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::GraphSyntax(format!("`{s}` is not a valid number")))
}
