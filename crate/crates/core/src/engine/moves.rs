use std::collections::BTreeMap;

use crate::config::{Label, LabeledConfig, UnlabeledConfig, Vertex};
use crate::error::{Error, Result};
use crate::graph::PathGraph;

use super::FiringMove;

/// Every legal labeled move, ordered by vertex and then lexicographically by
/// chip list. A stable configuration has none.
pub fn legal_moves(graph: &PathGraph, config: &LabeledConfig) -> Vec<FiringMove> {
    let mut moves = Vec::new();
    for (v, chips) in chips_by_vertex(config) {
        let Ok(local) = graph.local_structure(v) else {
            continue;
        };
        let d = local.outdeg() as usize;
        if chips.len() < d {
            continue;
        }
        for_each_combination(chips.len(), d, |idx| {
            moves.push(FiringMove::new(v, idx.iter().map(|&i| chips[i]).collect()));
        });
    }
    moves
}

pub(crate) fn chips_by_vertex(config: &LabeledConfig) -> BTreeMap<Vertex, Vec<Label>> {
    let mut cells: BTreeMap<Vertex, Vec<Label>> = BTreeMap::new();
    // labels arrive in increasing order, so each cell stays sorted
    for (l, v) in config.iter() {
        cells.entry(v).or_default().push(l);
    }
    cells
}

/// Applies one labeled move, checking that it is legal.
pub fn fire(graph: &PathGraph, config: &LabeledConfig, mv: &FiringMove) -> Result<LabeledConfig> {
    let local = graph.local_structure(mv.vertex)?;
    let illegal = |reason: String| Error::IllegalMove {
        vertex: mv.vertex,
        reason,
    };
    if mv.chips.len() as u64 != local.outdeg() {
        return Err(illegal(format!(
            "{} chips chosen, outdegree is {}",
            mv.chips.len(),
            local.outdeg()
        )));
    }
    if mv.chips.windows(2).any(|w| w[0] >= w[1]) {
        return Err(illegal("chip labels must be strictly increasing".into()));
    }
    for &l in &mv.chips {
        match config.position(l) {
            Some(v) if v == mv.vertex => {}
            Some(v) => return Err(illegal(format!("chip {l} is at vertex {v}"))),
            None => return Err(Error::MissingLabel(l)),
        }
    }
    let mut out = config.clone();
    let (left, right) = (local.left as usize, local.right as usize);
    for &l in &mv.chips[..left] {
        out.set(l, mv.vertex - 1);
    }
    for &l in &mv.chips[mv.chips.len() - right..] {
        out.set(l, mv.vertex + 1);
    }
    Ok(out)
}

/// Fires vertex `v` once in an unlabeled configuration.
pub fn fire_unlabeled(
    graph: &PathGraph,
    c: &UnlabeledConfig,
    v: Vertex,
) -> Result<UnlabeledConfig> {
    let local = graph.local_structure(v)?;
    let held = c.get(v);
    if held < local.outdeg() {
        return Err(Error::InsufficientChips {
            vertex: v,
            held,
            needed: local.outdeg(),
        });
    }
    let mut out = c.clone();
    out.remove(v, local.movers())?;
    out.add(v - 1, local.left);
    out.add(v + 1, local.right);
    Ok(out)
}

/// Applies a sequence of labeled moves, failing at the first illegal one.
pub fn run_script(
    graph: &PathGraph,
    start: &LabeledConfig,
    script: &[FiringMove],
) -> Result<LabeledConfig> {
    script
        .iter()
        .try_fold(start.clone(), |c, mv| fire(graph, &c, mv))
}

pub(crate) fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Calls `f` with every increasing `k`-subset of `0..n`, in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The `rank`-th increasing `k`-subset of `0..n` in lexicographic order.
pub(crate) fn unrank_combination(n: usize, k: usize, mut rank: u128, out: &mut Vec<usize>) {
    out.clear();
    let mut next = 0usize;
    for slot in 0..k {
        loop {
            let remaining = (k - slot - 1) as u64;
            let count = binomial((n - next - 1) as u64, remaining).expect("binomial fits u128");
            if rank < count {
                out.push(next);
                next += 1;
                break;
            }
            rank -= count;
            next += 1;
        }
    }
}
