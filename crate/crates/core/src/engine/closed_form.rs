//! Closed-form stabilizations and firing counts.

use crate::config::{LabeledConfig, UnlabeledConfig, Vertex};
use crate::error::{Error, Result};
use crate::graph::{Base, PathGraph};

/// The stabilization of `n` chips at the origin, for the graphs where it is
/// known in closed form: `Z`, `Z loops=0:ℓ`, `N` and `Ndir` (all with `r = 1`).
pub fn closed_form_stabilization(graph: &PathGraph, n: u64) -> Result<UnlabeledConfig> {
    let unsupported = || Error::UnsupportedGraph(graph.to_string());
    if graph.multiplicity() != 1 {
        return Err(unsupported());
    }
    let n = n as Vertex;
    let loops = graph.loops();
    match graph.base() {
        Base::TwoWayLine if loops.is_empty() => Ok(line_stabilization(n)),
        Base::TwoWayLine if loops.len() == 1 && loops.contains_key(&0) => {
            let ell = loops[&0] as Vertex;
            if n <= ell {
                // fewer chips than outdeg(0) = ℓ + 2: already stable
                return UnlabeledConfig::n_delta0(n);
            }
            let half = (n - ell) / 2;
            let mut c = UnlabeledConfig::delta_interval(-half, -1)
                .sum(&UnlabeledConfig::delta_interval(1, half));
            let centre = if (n - ell) % 2 == 0 { ell } else { ell + 1 };
            c.add(0, centre as u64);
            Ok(c)
        }
        Base::HalfLine if loops.is_empty() => Ok(UnlabeledConfig::delta_interval(1, n)),
        Base::HalfLineDirectedLoops if loops.is_empty() => {
            Ok(UnlabeledConfig::delta_interval(0, n - 1))
        }
        _ => Err(unsupported()),
    }
}

fn line_stabilization(n: Vertex) -> UnlabeledConfig {
    let m = n / 2;
    if n % 2 == 0 {
        UnlabeledConfig::delta_interval(-m, -1).sum(&UnlabeledConfig::delta_interval(1, m))
    } else {
        UnlabeledConfig::delta_interval(-m, m)
    }
}

/// Stabilization on `Z` of a full interval `[a+1, b-1]` plus one chip at `i`:
/// `δ[a, a+b−i−1] + δ[a+b−i+1, b]`.
pub fn linestab(a: Vertex, b: Vertex, i: Vertex) -> Result<UnlabeledConfig> {
    if a >= b || i < a || i > b {
        return Err(Error::Precondition(format!(
            "need a < b and a <= i <= b, got a={a} b={b} i={i}"
        )));
    }
    let gap = a + b - i;
    Ok(UnlabeledConfig::delta_interval(a, gap - 1)
        .sum(&UnlabeledConfig::delta_interval(gap + 1, b)))
}

/// Firing counts for `n` chips at the origin of `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredictedCounts {
    pub n: u64,
    pub m: u64,
}

pub fn predicted_counts(n: u64) -> PredictedCounts {
    PredictedCounts { n, m: n / 2 }
}

impl PredictedCounts {
    /// `m(m+1)(2m+1)/6`.
    pub fn total(&self) -> u64 {
        let m = self.m;
        m * (m + 1) * (2 * m + 1) / 6
    }

    /// `(m+1−|j|)(m−|j|)/2` for `|j| < m`, otherwise 0.
    pub fn per_vertex(&self, j: Vertex) -> u64 {
        let a = j.unsigned_abs();
        if a >= self.m {
            0
        } else {
            (self.m + 1 - a) * (self.m - a) / 2
        }
    }

    /// Firings pairing a label `≤ k` with a label `> k`, for even `n`:
    /// `(m−|k−m|)(m+|k−m|+1)/2`.
    pub fn cross(&self, k: u64) -> Result<u64> {
        if !self.n.is_multiple_of(2) {
            return Err(Error::Precondition(format!(
                "cross counts need even n, got {}",
                self.n
            )));
        }
        if k < 1 || k > self.n {
            return Err(Error::Precondition(format!(
                "k must lie in 1..={}, got {k}",
                self.n
            )));
        }
        let d = k.abs_diff(self.m);
        Ok((self.m - d) * (self.m + d + 1) / 2)
    }
}

/// Labels `1..=n` placed in increasing order along the chips of `c`.
pub fn sorted_labeling(c: &UnlabeledConfig) -> LabeledConfig {
    let mut out = LabeledConfig::new();
    let mut label = 0;
    for (v, k) in c.iter() {
        for _ in 0..k {
            label += 1;
            out.set(label, v);
        }
    }
    out
}

/// Positions `𝒟(k) = −(m+1)+k`, `𝒟(m+k) = k` of the sorted terminal for even `n`.
pub fn sorted_positions(n: u64) -> Result<Vec<Vertex>> {
    if !n.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "sorted positions need even n, got {n}"
        )));
    }
    let m = (n / 2) as Vertex;
    Ok((1..=m).map(|k| k - m - 1).chain(1..=m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn uc(pairs: &[(Vertex, i64)]) -> UnlabeledConfig {
        UnlabeledConfig::from_counts(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let z = PathGraph::line();
        assert_eq!(
            closed_form_stabilization(&z, 4).unwrap(),
            uc(&[(-2, 1), (-1, 1), (1, 1), (2, 1)])
        );
        assert_eq!(
            closed_form_stabilization(&z, 5).unwrap(),
            UnlabeledConfig::delta_interval(-2, 2)
        );
        assert!(closed_form_stabilization(&z, 0).unwrap().is_empty());
        let two_loops = parse_graph("Z loops=0:2").unwrap();
        assert_eq!(
            closed_form_stabilization(&two_loops, 4).unwrap(),
            uc(&[(-1, 1), (0, 2), (1, 1)])
        );
        let one_loop = parse_graph("Z loops=0:1").unwrap();
        assert_eq!(
            closed_form_stabilization(&one_loop, 4).unwrap(),
            uc(&[(-1, 1), (0, 2), (1, 1)])
        );
        assert_eq!(
            closed_form_stabilization(&two_loops, 1).unwrap(),
            uc(&[(0, 1)])
        );
        assert_eq!(
            closed_form_stabilization(&parse_graph("N").unwrap(), 3).unwrap(),
            UnlabeledConfig::delta_interval(1, 3)
        );
        assert_eq!(
            closed_form_stabilization(&parse_graph("Ndir").unwrap(), 3).unwrap(),
            UnlabeledConfig::delta_interval(0, 2)
        );
        for unsupported in ["Z r=2", "Z loops=1:1", "N loops=0:1", "Ndir r=2"] {
            assert!(matches!(
                closed_form_stabilization(&parse_graph(unsupported).unwrap(), 4),
                Err(Error::UnsupportedGraph(_))
            ));
        }
    }

    #[test]
    fn linestab_examples() {
        assert_eq!(linestab(0, 1, 0).unwrap(), uc(&[(0, 1)]));
        assert_eq!(
            linestab(-2, 2, 0).unwrap(),
            uc(&[(-2, 1), (-1, 1), (1, 1), (2, 1)])
        );
        assert_eq!(
            linestab(0, 4, 1).unwrap(),
            uc(&[(0, 1), (1, 1), (2, 1), (4, 1)])
        );
        assert!(linestab(1, 1, 1).is_err());
        assert!(linestab(0, 3, 4).is_err());
        assert!(linestab(0, 3, -1).is_err());
    }

    #[test]
    fn predicted_count_examples() {
        let p = predicted_counts(4);
        assert_eq!(p.total(), 5);
        assert_eq!(
            [
                p.per_vertex(0),
                p.per_vertex(1),
                p.per_vertex(-1),
                p.per_vertex(2)
            ],
            [3, 1, 1, 0]
        );
        assert_eq!(p.cross(2).unwrap(), 3);
        assert_eq!(p.cross(4).unwrap(), 0);
        assert_eq!(predicted_counts(1).total(), 0);
        assert!(predicted_counts(5).cross(2).is_err());
        assert!(p.cross(0).is_err());
    }

    #[test]
    fn sorted_positions_examples() {
        assert_eq!(sorted_positions(4).unwrap(), vec![-2, -1, 1, 2]);
        assert_eq!(sorted_positions(2).unwrap(), vec![-1, 1]);
        assert!(sorted_positions(3).is_err());
        let c = uc(&[(-1, 1), (0, 2), (1, 1)]);
        assert_eq!(
            sorted_labeling(&c),
            LabeledConfig::from_positions(&[-1, 0, 0, 1])
        );
    }
}
