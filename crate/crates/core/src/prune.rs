//! Walk counting against a partial word and the greatest-fixed-point
//! subgraph computation.
//!
//! `walk_counts` evaluates, for every retained vertex, the number of walks
//! whose labels are compatible with the tail of a pattern; counts saturate at
//! a cap, which preserves the only question asked of them ("is the count at
//! least the threshold?"). `prune_fixed_point` repeatedly removes vertices
//! whose count drops below the threshold until a full sweep over the pattern
//! set removes nothing; the survivors are the unique largest vertex set on
//! which every vertex meets every threshold inside the induced subgraph.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::rauzy::LabeledGraph;
use crate::words::{PartialWord, PatternSet, Symbol};

#[derive(Debug, Error)]
pub enum PruneError {
    #[error("vertex set universe {universe} does not match the graph's {graph}")]
    UniverseMismatch { universe: usize, graph: usize },
    #[error("vertex set is empty")]
    EmptySubgraph,
    #[error("pruned-subgraph file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A set of vertex indices over a fixed universe size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    blocks: Vec<u64>,
    universe: usize,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet {
            blocks: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = VertexSet::empty(universe);
        for v in 0..universe {
            s.insert(v);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.universe && self.blocks[v / 64] & (1 << (v % 64)) != 0
    }

    pub fn insert(&mut self, v: usize) {
        assert!(v < self.universe);
        self.blocks[v / 64] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        assert!(v < self.universe);
        self.blocks[v / 64] &= !(1 << (v % 64));
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(move |&v| self.contains(v))
    }

    pub fn as_keep_flags(&self) -> Vec<bool> {
        (0..self.universe).map(|v| self.contains(v)).collect()
    }
}

/// Per-vertex walk counts for every tail length of one pattern, saturated at
/// `cap`. `count(v, i)` is the (capped) number of length-`i` walks from `v`
/// compatible with the last `i` symbols of the pattern; vertices outside the
/// retained set hold 0.
#[derive(Debug, Clone)]
pub struct WalkCountTable {
    cap: u64,
    layers: Vec<Vec<u64>>,
}

impl WalkCountTable {
    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn count(&self, v: usize, i: usize) -> u64 {
        self.layers[i][v]
    }

    pub fn final_count(&self, v: usize) -> u64 {
        self.layers.last().unwrap()[v]
    }
}

fn add_capped(a: u64, b: u64, cap: u64) -> u64 {
    a.saturating_add(b).min(cap)
}

// below this many vertices the rayon dispatch costs more than it saves
const PAR_THRESHOLD: usize = 4096;

/// One dynamic-program step: counts for tail length `i` from those for
/// `i-1`. `sym` is the pattern symbol consumed at this step.
fn step_layer(
    g: &LabeledGraph,
    x: &VertexSet,
    sym: Symbol,
    prev: &[u64],
    cap: u64,
) -> Vec<u64> {
    let one = |v: usize| -> u64 {
        if !x.contains(v) {
            return 0;
        }
        let mut acc = 0u64;
        for arc in g.arcs_from(v) {
            if sym.matches(arc.label) && x.contains(arc.target as usize) {
                acc = add_capped(acc, prev[arc.target as usize], cap);
            }
        }
        acc
    };
    let n = g.vertex_count();
    if n >= PAR_THRESHOLD {
        (0..n).into_par_iter().map(one).collect()
    } else {
        (0..n).map(one).collect()
    }
}

fn base_layer(g: &LabeledGraph, x: &VertexSet) -> Vec<u64> {
    (0..g.vertex_count())
        .map(|v| if x.contains(v) { 1 } else { 0 })
        .collect()
}

/// Full table of walk counts for all tail lengths `0..=|w|`.
///
/// Saturation keeps every entry within `[0, cap]` while preserving the
/// threshold test: the final entry reaches `cap` exactly when the true count
/// does.
pub fn walk_counts(
    g: &LabeledGraph,
    x: &VertexSet,
    w: &PartialWord,
    cap: u64,
) -> Result<WalkCountTable, PruneError> {
    check_universe(g, x)?;
    assert!(cap >= 1, "cap must be positive");
    let mut layers = Vec::with_capacity(w.len() + 1);
    layers.push(base_layer(g, x));
    for i in 1..=w.len() {
        let sym = w.symbol(w.len() - i);
        let next = step_layer(g, x, sym, layers.last().unwrap(), cap);
        layers.push(next);
    }
    Ok(WalkCountTable { cap, layers })
}

/// Final-layer counts only, keeping two layers alive at a time.
pub fn walk_counts_final(
    g: &LabeledGraph,
    x: &VertexSet,
    w: &PartialWord,
    cap: u64,
) -> Result<Vec<u64>, PruneError> {
    check_universe(g, x)?;
    let mut prev = base_layer(g, x);
    for i in 1..=w.len() {
        let sym = w.symbol(w.len() - i);
        prev = step_layer(g, x, sym, &prev, cap);
    }
    Ok(prev)
}

fn check_universe(g: &LabeledGraph, x: &VertexSet) -> Result<(), PruneError> {
    if x.universe() != g.vertex_count() {
        return Err(PruneError::UniverseMismatch {
            universe: x.universe(),
            graph: g.vertex_count(),
        });
    }
    Ok(())
}

/// The surviving vertex set together with the pattern set it was pruned
/// against.
#[derive(Debug, Clone)]
pub struct PrunedSubgraph {
    retained: VertexSet,
    patterns: PatternSet,
}

impl PrunedSubgraph {
    pub fn retained(&self) -> &VertexSet {
        &self.retained
    }

    pub fn pattern_set(&self) -> &PatternSet {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.retained.len()
    }

    pub fn is_empty(&self) -> bool {
        self.retained.is_empty()
    }
}

/// Computes the unique largest `X` such that every vertex of `X` has, for
/// every pattern, at least the threshold number of compatible walks inside
/// the induced subgraph. An empty result means the method is inconclusive
/// for this pattern set, not that anything failed.
///
/// Per-pattern counts are evaluated against the set as it stood at the start
/// of that pattern's pass, and the loop stops after a full sweep with zero
/// removals; the greatest fixed point does not depend on these choices.
pub fn prune_fixed_point(g: &LabeledGraph, ps: &PatternSet) -> PrunedSubgraph {
    let mut x = VertexSet::full(g.vertex_count());
    loop {
        let mut removed_this_sweep = 0usize;
        for w in ps.patterns() {
            let cap = ps.threshold(w.len());
            let counts = walk_counts_final(g, &x, w, cap).expect("universe matches");
            for (v, &count) in counts.iter().enumerate() {
                if count < cap && x.contains(v) {
                    x.remove(v);
                    removed_this_sweep += 1;
                }
            }
        }
        if removed_this_sweep == 0 {
            return PrunedSubgraph {
                retained: x,
                patterns: ps.clone(),
            };
        }
    }
}

/// Independent re-verification of the branching guarantee on `x`: a fresh
/// count pass per pattern, no reuse of pruning state.
pub fn certify_branching(
    g: &LabeledGraph,
    x: &VertexSet,
    ps: &PatternSet,
) -> Result<bool, PruneError> {
    check_universe(g, x)?;
    if x.is_empty() {
        return Err(PruneError::EmptySubgraph);
    }
    for w in ps.patterns() {
        let need = ps.threshold(w.len());
        let counts = walk_counts_final(g, x, w, need)?;
        if x.iter().any(|v| counts[v] < need) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Writes `PRUNE v1 |X|=<n>`, a comment echoing the graph header, then the
/// retained indices in ascending order.
pub fn write_pruned<W: Write>(
    sub: &PrunedSubgraph,
    graph_header: &str,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "PRUNE v1 |X|={}", sub.len())?;
    writeln!(out, "# graph: {graph_header}")?;
    for v in sub.retained().iter() {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

/// Reads the retained indices and the echoed graph header back.
pub fn read_pruned<R: BufRead>(
    input: R,
    universe: usize,
) -> Result<(VertexSet, String), PruneError> {
    let mut lines = input.lines().enumerate();
    let header = match lines.next() {
        Some((_, l)) => l?,
        None => {
            return Err(PruneError::Parse {
                line: 1,
                msg: "empty input".into(),
            })
        }
    };
    let count: usize = header
        .strip_prefix("PRUNE v1 |X|=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| PruneError::Parse {
            line: 1,
            msg: "expected 'PRUNE v1 |X|=<n>'".into(),
        })?;
    let graph_line = match lines.next() {
        Some((_, l)) => l?,
        None => {
            return Err(PruneError::Parse {
                line: 2,
                msg: "missing '# graph:' line".into(),
            })
        }
    };
    let graph_header = graph_line
        .strip_prefix("# graph: ")
        .ok_or_else(|| PruneError::Parse {
            line: 2,
            msg: "expected '# graph: <header>'".into(),
        })?
        .to_string();
    let mut set = VertexSet::empty(universe);
    let mut last: Option<usize> = None;
    for _ in 0..count {
        let (idx, line) = match lines.next() {
            Some((i, l)) => (i + 1, l?),
            None => {
                return Err(PruneError::Parse {
                    line: count + 2,
                    msg: format!("fewer than the declared {count} indices"),
                })
            }
        };
        let v: usize = line.parse().map_err(|e| PruneError::Parse {
            line: idx,
            msg: format!("bad index: {e}"),
        })?;
        if v >= universe {
            return Err(PruneError::Parse {
                line: idx,
                msg: format!("index {v} out of range for {universe} vertices"),
            });
        }
        if last.is_some_and(|prev| prev >= v) {
            return Err(PruneError::Parse {
                line: idx,
                msg: "indices must be strictly ascending".into(),
            });
        }
        last = Some(v);
        set.insert(v);
    }
    Ok((set, graph_header))
}
