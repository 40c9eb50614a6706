//! Dense working state for labeled runs.
//!
//! Chips are addressed by rank (position in the sorted label list), so
//! "smallest labels go left" becomes "smallest ranks go left". Each vertex
//! cell keeps its ranks sorted. Two prefix-sum trees track, per vertex, the
//! number of legal moves and whether the vertex is unstable; both random
//! strategies and the leftmost/rightmost scans select in `O(log window)`.

use std::collections::BTreeMap;

use rand::Rng;

use crate::config::{Label, LabeledConfig, Vertex};
use crate::error::{Error, Result};
use crate::graph::{LocalStructure, PathGraph};

use super::fenwick::Fenwick;
use super::moves::{binomial, unrank_combination};
use super::{FiringMove, LastFiring};

pub(crate) struct Board<'g> {
    graph: &'g PathGraph,
    labels: Vec<Label>,
    pos: Vec<Vertex>,
    origin: Vertex,
    cells: Vec<Vec<u32>>,
    locals: Vec<LocalStructure>,
    odometer: Vec<u64>,
    moves: Fenwick,
    unstable: Fenwick,
    weights: Vec<u128>,
    /// Difference array over ranks; prefix sums give cross-firing counts.
    cross_diff: Vec<i64>,
    pub firings: u64,
    last_vertex: Option<Vertex>,
    last_held: Vec<u32>,
    last_fired: Vec<u32>,
    scratch: Vec<usize>,
}

impl<'g> Board<'g> {
    pub fn new(graph: &'g PathGraph, config: &LabeledConfig) -> Result<Self> {
        let labels: Vec<Label> = config.labels().collect();
        let pos: Vec<Vertex> = config.positions();
        let n = labels.len() as Vertex;
        let (lo, hi) = match (pos.iter().min(), pos.iter().max()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => (0, 0),
        };
        if let Some(min_v) = graph.min_vertex() {
            if lo < min_v {
                return Err(Error::VertexOutOfDomain(lo));
            }
        }
        let pad = n / 2 + 2;
        let mut origin = lo - pad;
        if let Some(min_v) = graph.min_vertex() {
            origin = origin.max(min_v);
        }
        let width = (hi + pad - origin + 1) as usize;
        let mut board = Board {
            graph,
            cross_diff: vec![0; labels.len() + 1],
            labels,
            pos,
            origin,
            cells: vec![Vec::new(); width],
            locals: (0..width)
                .map(|i| graph.local(origin + i as Vertex))
                .collect(),
            odometer: vec![0; width],
            moves: Fenwick::default(),
            unstable: Fenwick::default(),
            weights: vec![0; width],
            firings: 0,
            last_vertex: None,
            last_held: Vec::new(),
            last_fired: Vec::new(),
            scratch: Vec::new(),
        };
        for (rank, &v) in board.pos.iter().enumerate() {
            let i = (v - origin) as usize;
            board.cells[i].push(rank as u32);
        }
        for i in 0..width {
            board.weights[i] = board.weight_of(i)?;
        }
        board.rebuild_trees();
        Ok(board)
    }

    fn weight_of(&self, i: usize) -> Result<u128> {
        let d = self.locals[i].outdeg();
        binomial(self.cells[i].len() as u64, d).ok_or(Error::Overflow("legal move count"))
    }

    fn rebuild_trees(&mut self) {
        self.moves = Fenwick::from_slice(&self.weights);
        let flags: Vec<u128> = self.weights.iter().map(|&w| u128::from(w > 0)).collect();
        self.unstable = Fenwick::from_slice(&flags);
    }

    fn vertex(&self, i: usize) -> Vertex {
        self.origin + i as Vertex
    }

    /// Grows the window so that `v` has a cell.
    fn ensure(&mut self, v: Vertex) {
        let width = self.cells.len() as Vertex;
        if v >= self.origin && v < self.origin + width {
            return;
        }
        let grow = width.max(8);
        let (new_origin, new_width) = if v < self.origin {
            let mut o = (v - grow).min(self.origin - grow);
            if let Some(min_v) = self.graph.min_vertex() {
                o = o.max(min_v);
            }
            (o, (self.origin + width - o) as usize)
        } else {
            (self.origin, (v + grow - self.origin + 1) as usize)
        };
        let shift = (self.origin - new_origin) as usize;
        let mut cells = vec![Vec::new(); new_width];
        let mut odometer = vec![0; new_width];
        let mut weights = vec![0; new_width];
        for i in 0..self.cells.len() {
            cells[i + shift] = std::mem::take(&mut self.cells[i]);
            odometer[i + shift] = self.odometer[i];
            weights[i + shift] = self.weights[i];
        }
        self.locals = (0..new_width)
            .map(|i| self.graph.local(new_origin + i as Vertex))
            .collect();
        self.cells = cells;
        self.odometer = odometer;
        self.weights = weights;
        self.origin = new_origin;
        self.rebuild_trees();
    }

    pub fn is_stable(&self) -> bool {
        self.unstable.total() == 0
    }

    pub fn leftmost_unstable(&self) -> Option<usize> {
        (self.unstable.total() > 0).then(|| self.unstable.find(0).0)
    }

    pub fn rightmost_unstable(&self) -> Option<usize> {
        let total = self.unstable.total();
        (total > 0).then(|| self.unstable.find(total - 1).0)
    }

    /// Fires the lexicographically first chip subset at cell `i`.
    pub fn fire_first(&mut self, i: usize) {
        let d = self.locals[i].outdeg() as usize;
        let mut chosen = std::mem::take(&mut self.scratch);
        chosen.clear();
        chosen.extend(0..d);
        self.fire_cell(i, &chosen);
        self.scratch = chosen;
    }

    /// Fires a move drawn uniformly from all legal moves.
    pub fn fire_uniform_move<R: Rng>(&mut self, rng: &mut R) {
        let total = self.moves.total();
        let (i, rank) = self.moves.find(rng.random_range(0..total));
        self.fire_ranked(i, rank);
    }

    /// Fires at a uniform unstable vertex with a uniform chip subset.
    pub fn fire_uniform_vertex<R: Rng>(&mut self, rng: &mut R) {
        let count = self.unstable.total();
        let (i, _) = self.unstable.find(rng.random_range(0..count));
        let rank = rng.random_range(0..self.weights[i]);
        self.fire_ranked(i, rank);
    }

    fn fire_ranked(&mut self, i: usize, rank: u128) {
        let d = self.locals[i].outdeg() as usize;
        let mut chosen = std::mem::take(&mut self.scratch);
        unrank_combination(self.cells[i].len(), d, rank, &mut chosen);
        self.fire_cell(i, &chosen);
        self.scratch = chosen;
    }

    /// Fires an explicit labeled move after checking it.
    pub fn fire_move(&mut self, mv: &FiringMove) -> Result<()> {
        let illegal = |reason: &str| Error::IllegalMove {
            vertex: mv.vertex,
            reason: reason.into(),
        };
        if !self.graph.contains(mv.vertex) {
            return Err(Error::VertexOutOfDomain(mv.vertex));
        }
        self.ensure(mv.vertex);
        let i = (mv.vertex - self.origin) as usize;
        if mv.chips.len() as u64 != self.locals[i].outdeg() {
            return Err(illegal("wrong number of chips"));
        }
        if mv.chips.windows(2).any(|w| w[0] >= w[1]) {
            return Err(illegal("chip labels must be strictly increasing"));
        }
        let mut chosen = Vec::with_capacity(mv.chips.len());
        for l in &mv.chips {
            let rank = self
                .labels
                .binary_search(l)
                .map_err(|_| Error::MissingLabel(*l))?;
            let at = self.cells[i]
                .binary_search(&(rank as u32))
                .map_err(|_| illegal("chip is not at this vertex"))?;
            chosen.push(at);
        }
        self.fire_cell(i, &chosen);
        Ok(())
    }

    /// Fires cell `i`; `chosen` holds increasing indices into the cell.
    fn fire_cell(&mut self, i: usize, chosen: &[usize]) {
        let v = self.vertex(i);
        let local = self.locals[i];
        if local.left > 0 {
            self.ensure(v - 1);
        }
        if local.right > 0 {
            self.ensure(v + 1);
        }
        let i = (v - self.origin) as usize;
        let (left, right) = (local.left as usize, local.right as usize);

        self.last_held.clear();
        self.last_held.extend_from_slice(&self.cells[i]);
        self.last_fired.clear();
        self.last_fired
            .extend(chosen.iter().map(|&c| self.last_held[c]));
        let fired = &self.last_fired;
        self.cross_diff[fired[0] as usize] += 1;
        self.cross_diff[fired[fired.len() - 1] as usize] -= 1;

        let movers_left = &fired[..left];
        let movers_right = &fired[fired.len() - right..];
        self.cells[i].retain(|r| !movers_left.contains(r) && !movers_right.contains(r));
        for &r in movers_left {
            insert_sorted(&mut self.cells[i - 1], r);
            self.pos[r as usize] = v - 1;
        }
        for &r in movers_right {
            insert_sorted(&mut self.cells[i + 1], r);
            self.pos[r as usize] = v + 1;
        }
        self.odometer[i] += 1;
        self.firings += 1;
        self.last_vertex = Some(v);
        for j in [i.wrapping_sub(1), i, i + 1] {
            if j < self.cells.len() {
                self.refresh(j);
            }
        }
    }

    fn refresh(&mut self, j: usize) {
        let w = self.weight_of(j).expect("legal move count fits u128");
        let old = self.weights[j];
        if w != old {
            self.moves.add(j, w as i128 - old as i128);
            let flag = i128::from(w > 0) - i128::from(old > 0);
            if flag != 0 {
                self.unstable.add(j, flag);
            }
            self.weights[j] = w;
        }
    }

    pub fn to_config(&self) -> LabeledConfig {
        let mut c = LabeledConfig::new();
        for (rank, &v) in self.pos.iter().enumerate() {
            c.set(self.labels[rank], v);
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

    pub fn cross_firings(&self) -> BTreeMap<Label, u64> {
        let mut acc = 0i64;
        let mut out = BTreeMap::new();
        for (rank, &l) in self.labels.iter().enumerate() {
            acc += self.cross_diff[rank];
            out.insert(l, acc as u64);
        }
        out
    }

    /// The move most recently fired.
    pub fn last_move(&self) -> Option<FiringMove> {
        let v = self.last_vertex?;
        Some(FiringMove::new(v, self.to_labels(&self.last_fired)))
    }

    pub fn last_firing(&self) -> Option<LastFiring> {
        let v = self.last_vertex?;
        Some(LastFiring {
            vertex: v,
            held: self.to_labels(&self.last_held),
            fired: self.to_labels(&self.last_fired),
        })
    }

    fn to_labels(&self, ranks: &[u32]) -> Vec<Label> {
        ranks.iter().map(|&r| self.labels[r as usize]).collect()
    }
}

fn insert_sorted(cell: &mut Vec<u32>, r: u32) {
    let at = cell.partition_point(|&x| x < r);
    cell.insert(at, r);
}
