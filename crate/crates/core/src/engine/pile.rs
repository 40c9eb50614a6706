//! Dense working state for unlabeled runs.

use std::collections::BTreeMap;

use crate::config::{UnlabeledConfig, Vertex};
use crate::error::{Error, Result};
use crate::graph::{LocalStructure, PathGraph};

use super::fenwick::Fenwick;

pub(crate) struct Pile<'g> {
    graph: &'g PathGraph,
    origin: Vertex,
    counts: Vec<u64>,
    locals: Vec<LocalStructure>,
    odometer: Vec<u64>,
    unstable: Fenwick,
    pub firings: u64,
}

impl<'g> Pile<'g> {
    pub fn new(graph: &'g PathGraph, c: &UnlabeledConfig) -> Result<Self> {
        graph.check_support(c)?;
        let lo = c.min().unwrap_or(0);
        let hi = c.max().unwrap_or(0);
        let pad = (c.total() / 2) as Vertex + 2;
        let mut origin = lo - pad;
        if let Some(min_v) = graph.min_vertex() {
            origin = origin.max(min_v);
        }
        let width = (hi + pad - origin + 1) as usize;
        let mut pile = Pile {
            graph,
            origin,
            counts: vec![0; width],
            locals: (0..width)
                .map(|i| graph.local(origin + i as Vertex))
                .collect(),
            odometer: vec![0; width],
            unstable: Fenwick::default(),
            firings: 0,
        };
        for (v, k) in c.iter() {
            pile.counts[(v - origin) as usize] = k;
        }
        pile.rebuild();
        Ok(pile)
    }

    fn rebuild(&mut self) {
        let flags: Vec<u128> = (0..self.counts.len())
            .map(|i| u128::from(self.is_unstable(i)))
            .collect();
        self.unstable = Fenwick::from_slice(&flags);
    }

    fn is_unstable(&self, i: usize) -> bool {
        self.counts[i] >= self.locals[i].outdeg()
    }

    fn ensure(&mut self, v: Vertex) {
        let width = self.counts.len() as Vertex;
        if v >= self.origin && v < self.origin + width {
            return;
        }
        let grow = width.max(8);
        let new_origin = if v < self.origin {
            let o = (v - grow).min(self.origin - grow);
            self.graph.min_vertex().map_or(o, |m| o.max(m))
        } else {
            self.origin
        };
        let new_end = if v >= self.origin + width {
            v + grow
        } else {
            self.origin + width - 1
        };
        let new_width = (new_end - new_origin + 1) as usize;
        let shift = (self.origin - new_origin) as usize;
        let mut counts = vec![0; new_width];
        let mut odometer = vec![0; new_width];
        counts[shift..shift + self.counts.len()].copy_from_slice(&self.counts);
        odometer[shift..shift + self.odometer.len()].copy_from_slice(&self.odometer);
        self.locals = (0..new_width)
            .map(|i| self.graph.local(new_origin + i as Vertex))
            .collect();
        self.counts = counts;
        self.odometer = odometer;
        self.origin = new_origin;
        self.rebuild();
    }

    pub fn unstable_count(&self) -> u128 {
        self.unstable.total()
    }

    /// Index of the `k`-th unstable vertex from the left.
    pub fn nth_unstable(&self, k: u128) -> usize {
        self.unstable.find(k).0
    }

    pub fn vertex(&self, i: usize) -> Vertex {
        self.origin + i as Vertex
    }

    /// How many times cell `i` can fire back to back.
    pub fn max_batch(&self, i: usize) -> u64 {
        let local = self.locals[i];
        let c = self.counts[i];
        if c < local.outdeg() {
            0
        } else {
            (c - local.outdeg()) / local.movers() + 1
        }
    }

    /// Fires vertex `v` `times` times in a row; `times` must not exceed the
    /// available batch.
    pub fn fire(&mut self, v: Vertex, times: u64) -> Result<()> {
        if !self.graph.contains(v) {
            return Err(Error::VertexOutOfDomain(v));
        }
        self.ensure(v);
        let local = self.locals[(v - self.origin) as usize];
        if local.left > 0 {
            self.ensure(v - 1);
        }
        self.ensure(v + 1);
        let i = (v - self.origin) as usize;
        let available = self.max_batch(i);
        if times > available {
            return Err(Error::InsufficientChips {
                vertex: v,
                held: self.counts[i],
                needed: local.outdeg() + (times - 1) * local.movers(),
            });
        }
        self.counts[i] -= times * local.movers();
        if local.left > 0 {
            self.counts[i - 1] += times * local.left;
        }
        self.counts[i + 1] += times * local.right;
        self.odometer[i] += times;
        self.firings += times;
        for j in [i.wrapping_sub(1), i, i + 1] {
            if j < self.counts.len() {
                let now = self.unstable.prefix(j + 1) - self.unstable.prefix(j);
                let want = u128::from(self.is_unstable(j));
                if now != want {
                    self.unstable.add(j, want as i128 - now as i128);
                }
            }
        }
        Ok(())
    }

    pub fn to_config(&self) -> UnlabeledConfig {
        let mut c = UnlabeledConfig::new();
        for (i, &k) in self.counts.iter().enumerate() {
            c.add(self.vertex(i), k);
        }
        c
    }

    pub fn odometer(&self) -> BTreeMap<Vertex, u64> {
        self.odometer
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| (self.vertex(i), k))
            .collect()
    }
}
