//! Rauzy graphs of bounded-period square-free words and their
//! suffix-compressed quotients.
//!
//! For a period bound `p`, the full graph has the square-free words of length
//! `2p-3` as vertices and an arc `(au, ub, b)` for every square-free `aub`.
//! Walk labels on it are exactly the words with no square of period `< p`.
//! The compressed graph replaces every vertex by its shortest suffix that
//! still pins down all future square checks up to period `p-1`; it is
//! exponentially smaller and counts the same walks.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::words::{has_square_suffix, Alphabet, Letter, PeriodBound, Word, WordError};

mod format;

pub use format::{deserialize_graph, graph_header, serialize_graph};

#[derive(Debug, Error)]
pub enum RauzyError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("period bound {0} must be at least 2")]
    PeriodTooSmall(usize),
    #[error("budget exceeded: {visited} search nodes visited, {vertices} vertices held (caps: {max_nodes} nodes, {max_vertices} vertices)")]
    BudgetExceeded {
        visited: u64,
        vertices: usize,
        max_nodes: u64,
        max_vertices: usize,
    },
    #[error("no suffix of {word} satisfies the reduction condition")]
    NotReducible { word: String },
    #[error("arc does not exist: appending {letter} to {state} creates a square")]
    ArcMissing { state: String, letter: char },
    #[error("invalid state {state}: no suffix of the extension qualifies")]
    InvalidState { state: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Construction caps; exceeding either is an explicit error, never silent
/// truncation.
#[derive(Debug, Clone, Copy)]
pub struct GraphBudget {
    pub max_vertices: usize,
    pub max_nodes: u64,
}

impl Default for GraphBudget {
    fn default() -> Self {
        GraphBudget {
            max_vertices: 20_000_000,
            max_nodes: 2_000_000_000,
        }
    }
}

/// How a graph was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphMode {
    /// The raw full graph (oracle scale only).
    Full,
    /// Compressed graph with the complete vertex set.
    Exhaustive,
    /// Compressed graph closed under arc steps from greedy seeds; a subgraph
    /// of the exhaustive one, possibly incomplete, still sound for pruning.
    Reachable,
}

impl GraphMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            GraphMode::Full => "full",
            GraphMode::Exhaustive => "exhaustive",
            GraphMode::Reachable => "reachable",
        }
    }

    pub fn parse(s: &str) -> Option<GraphMode> {
        match s {
            "full" => Some(GraphMode::Full),
            "exhaustive" => Some(GraphMode::Exhaustive),
            "reachable" => Some(GraphMode::Reachable),
            _ => None,
        }
    }
}

impl fmt::Display for GraphMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphMeta {
    pub alphabet: Alphabet,
    pub period_bound: usize,
    pub mode: GraphMode,
}

/// A labeled arc; at most one per (source, label) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub label: Letter,
    pub target: u32,
}

/// Packed fixed-width word storage with a deduplicating hash index.
/// Vertex identity is the word; arcs refer to integer indices.
#[derive(Debug, Clone, Default)]
struct WordTable {
    width: usize,
    lens: Vec<u16>,
    data: Vec<u8>,
    index: HashMap<u64, Vec<u32>>,
}

fn hash_bytes(w: &[u8]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    w.hash(&mut h);
    h.finish()
}

impl WordTable {
    fn with_width(width: usize) -> Self {
        WordTable {
            width,
            ..WordTable::default()
        }
    }

    fn len(&self) -> usize {
        self.lens.len()
    }

    fn get(&self, i: u32) -> &[u8] {
        let start = i as usize * self.width;
        &self.data[start..start + self.lens[i as usize] as usize]
    }

    fn lookup(&self, w: &[u8]) -> Option<u32> {
        self.index
            .get(&hash_bytes(w))?
            .iter()
            .copied()
            .find(|&i| self.get(i) == w)
    }

    fn intern(&mut self, w: &[u8]) -> u32 {
        debug_assert!(w.len() <= self.width);
        if let Some(i) = self.lookup(w) {
            return i;
        }
        let i = self.len() as u32;
        self.data.extend_from_slice(w);
        self.data.resize((i as usize + 1) * self.width, 0);
        self.lens.push(w.len() as u16);
        self.index.entry(hash_bytes(w)).or_default().push(i);
        i
    }

    fn bytes(&self) -> usize {
        self.data.len() + self.lens.len() * 2 + self.index.len() * 16
    }
}

/// Directed graph with letter-labeled arcs; vertices carry their words and
/// sit in canonical (shortlex) order once built.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    words: WordTable,
    out: Vec<Vec<Arc>>,
    arc_count: usize,
}

impl PartialEq for LabeledGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count() == other.vertex_count()
            && (0..self.vertex_count()).all(|v| self.word(v) == other.word(v))
            && self.out == other.out
    }
}

impl LabeledGraph {
    pub fn vertex_count(&self) -> usize {
        self.words.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn word(&self, v: usize) -> &[Letter] {
        self.words.get(v as u32)
    }

    pub fn arcs_from(&self, v: usize) -> &[Arc] {
        &self.out[v]
    }

    /// All arcs as (source, target, label) triples.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, Letter)> + '_ {
        self.out.iter().enumerate().flat_map(|(v, arcs)| {
            arcs.iter().map(move |a| (v, a.target as usize, a.label))
        })
    }

    pub fn find_vertex(&self, word: &[Letter]) -> Option<usize> {
        self.words.lookup(word).map(|i| i as usize)
    }

    /// Rough storage footprint in bytes, for reporting.
    pub fn memory_estimate(&self) -> usize {
        self.words.bytes() + self.out.iter().map(|a| a.len() * 8 + 24).sum::<usize>()
    }

    /// Builds a graph from explicit parts, keeping the given vertex order.
    /// Rejects duplicate words, out-of-range targets and duplicate
    /// (source, label) pairs.
    pub fn from_parts(
        words: Vec<Vec<Letter>>,
        arcs: Vec<(usize, usize, Letter)>,
    ) -> Result<Self, RauzyError> {
        let width = words.iter().map(Vec::len).max().unwrap_or(0);
        let mut table = WordTable::with_width(width);
        for w in &words {
            let before = table.len();
            table.intern(w);
            if table.len() == before {
                return Err(RauzyError::InvalidGraph(format!(
                    "duplicate vertex word {:?}",
                    render(w)
                )));
            }
        }
        let mut out = vec![Vec::new(); table.len()];
        let n = table.len();
        let mut arc_count = 0usize;
        for (src, dst, label) in arcs {
            if src >= n || dst >= n {
                return Err(RauzyError::InvalidGraph(format!(
                    "arc ({src},{dst}) out of range for {n} vertices"
                )));
            }
            let row: &mut Vec<Arc> = &mut out[src];
            if row.iter().any(|a| a.label == label) {
                return Err(RauzyError::InvalidGraph(format!(
                    "two outgoing arcs from {src} share label {label}"
                )));
            }
            row.push(Arc {
                label,
                target: dst as u32,
            });
            arc_count += 1;
        }
        for row in &mut out {
            row.sort_by_key(|a| a.label);
        }
        Ok(LabeledGraph {
            words: table,
            out,
            arc_count,
        })
    }

    /// The subgraph induced by the kept vertices, with indices remapped
    /// (order preserved) and a map from old to new indices.
    pub fn induced(&self, keep: &[bool]) -> (LabeledGraph, Vec<Option<usize>>) {
        assert_eq!(keep.len(), self.vertex_count());
        let mut remap = vec![None; keep.len()];
        let mut words = Vec::new();
        for v in 0..keep.len() {
            if keep[v] {
                remap[v] = Some(words.len());
                words.push(self.word(v).to_vec());
            }
        }
        let arcs = self
            .arcs()
            .filter_map(|(s, t, l)| Some((remap[s]?, remap[t]?, l)))
            .collect();
        (
            LabeledGraph::from_parts(words, arcs).expect("induced subgraph is valid"),
            remap,
        )
    }
}

struct Builder {
    table: WordTable,
    arcs: Vec<(u32, u32, Letter)>,
}

impl Builder {
    fn new(width: usize) -> Self {
        Builder {
            table: WordTable::with_width(width),
            arcs: Vec::new(),
        }
    }

    /// Re-index vertices into shortlex word order so the result is
    /// byte-reproducible regardless of discovery order.
    fn finish(self) -> LabeledGraph {
        let n = self.table.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by(|&a, &b| {
            let (wa, wb) = (self.table.get(a), self.table.get(b));
            wa.len().cmp(&wb.len()).then_with(|| wa.cmp(wb))
        });
        let mut new_of_old = vec![0u32; n];
        for (new, &old) in order.iter().enumerate() {
            new_of_old[old as usize] = new as u32;
        }
        let mut table = WordTable::with_width(self.table.width);
        for &old in &order {
            table.intern(self.table.get(old));
        }
        let mut out = vec![Vec::new(); n];
        for &(s, t, l) in &self.arcs {
            out[new_of_old[s as usize] as usize].push(Arc {
                label: l,
                target: new_of_old[t as usize],
            });
        }
        for row in &mut out {
            row.sort_by_key(|a| a.label);
            debug_assert!(row.windows(2).all(|w| w[0].label != w[1].label));
        }
        LabeledGraph {
            words: table,
            out,
            arc_count: self.arcs.len(),
        }
    }
}

/// Builds the full graph: vertices are the square-free words of length
/// `2p-3`, arcs the one-letter shifts. Oracle scale only.
pub fn build_full_rauzy(
    alphabet: &Alphabet,
    p: usize,
    budget: &GraphBudget,
) -> Result<(LabeledGraph, GraphMeta), RauzyError> {
    if p < 2 {
        return Err(RauzyError::PeriodTooSmall(p));
    }
    let len = 2 * p - 3;
    let bound = PeriodBound::Below(p);
    let mut builder = Builder::new(len);
    let mut word: Vec<Letter> = Vec::with_capacity(len);
    let mut visited: u64 = 0;

    fn grow(
        alphabet: &Alphabet,
        bound: PeriodBound,
        len: usize,
        word: &mut Vec<Letter>,
        builder: &mut Builder,
        visited: &mut u64,
        budget: &GraphBudget,
    ) -> Result<(), RauzyError> {
        if word.len() == len {
            if builder.table.len() >= budget.max_vertices {
                return Err(RauzyError::BudgetExceeded {
                    visited: *visited,
                    vertices: builder.table.len(),
                    max_nodes: budget.max_nodes,
                    max_vertices: budget.max_vertices,
                });
            }
            builder.table.intern(word);
            return Ok(());
        }
        for a in alphabet.letters() {
            word.push(a);
            let ok = !has_square_suffix(word, bound);
            *visited += 1;
            if *visited > budget.max_nodes {
                return Err(RauzyError::BudgetExceeded {
                    visited: *visited,
                    vertices: builder.table.len(),
                    max_nodes: budget.max_nodes,
                    max_vertices: budget.max_vertices,
                });
            }
            if ok {
                grow(alphabet, bound, len, word, builder, visited, budget)?;
            }
            word.pop();
        }
        Ok(())
    }

    grow(alphabet, bound, len, &mut word, &mut builder, &mut visited, budget)?;

    for v in 0..builder.table.len() as u32 {
        for b in alphabet.letters() {
            let src = builder.table.get(v);
            let mut next = Vec::with_capacity(len + 1);
            next.extend_from_slice(src);
            next.push(b);
            if !has_square_suffix(&next, bound) {
                let target = builder
                    .table
                    .lookup(&next[1..])
                    .expect("shifted word is a vertex");
                builder.arcs.push((v, target, b));
            }
        }
    }

    Ok((
        builder.finish(),
        GraphMeta {
            alphabet: *alphabet,
            period_bound: p,
            mode: GraphMode::Full,
        },
    ))
}

/// The mismatch condition that makes a suffix usable as a compressed state:
/// every period `i` in `{ceil(m/2)+1, ..., p-1}` is already excluded by a
/// mismatch near the end of `s`.
fn qualifies(s: &[Letter], p: usize) -> bool {
    let m = s.len();
    let lo = m / 2 + m % 2 + 1;
    for i in lo..p {
        if i >= m {
            return false;
        }
        let found = (0..m - i).any(|k| s[m - 1 - k] != s[m - 1 - k - i]);
        if !found {
            return false;
        }
    }
    true
}

/// Length of the shortest qualifying suffix, if any.
fn shortest_qualifying_suffix(w: &[Letter], p: usize) -> Option<usize> {
    (1..=w.len()).find(|&m| qualifies(&w[w.len() - m..], p))
}

/// The compression map: the shortest suffix of `w` that satisfies the
/// mismatch condition. Errors when no suffix does (short inputs); words of
/// length `2p-3` always reduce.
pub fn psi(w: &Word, p: usize) -> Result<Word, RauzyError> {
    if p < 2 {
        return Err(RauzyError::PeriodTooSmall(p));
    }
    match shortest_qualifying_suffix(w.letters(), p) {
        Some(m) => Ok(Word::from_validated(w.letters()[w.len() - m..].to_vec())),
        None => Err(RauzyError::NotReducible {
            word: w.to_string(),
        }),
    }
}

/// Compressed successor: append `letter` to a compressed state and
/// re-reduce. The result is the unique arc target for that label.
pub fn psi_step(state: &Word, letter: Letter, p: usize) -> Result<Word, RauzyError> {
    if p < 2 {
        return Err(RauzyError::PeriodTooSmall(p));
    }
    let mut next = Vec::with_capacity(state.len() + 1);
    next.extend_from_slice(state.letters());
    next.push(letter);
    if has_square_suffix(&next, PeriodBound::Below(p)) {
        return Err(RauzyError::ArcMissing {
            state: state.to_string(),
            letter: crate::words::letter_to_char(letter),
        });
    }
    match shortest_qualifying_suffix(&next, p) {
        Some(m) => Ok(Word::from_validated(next[next.len() - m..].to_vec())),
        None => Err(RauzyError::InvalidState {
            state: state.to_string(),
        }),
    }
}

/// Vertex enumeration strategy for the compressed graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiMode {
    /// Every vertex, by backtracking over square-free words with the
    /// fixed-point suffix test and a left-extendability filter.
    Exhaustive,
    /// Closure under arc steps from `seeds` greedily extended words
    /// (`None` = one per letter).
    Reachable { seeds: Option<usize> },
}

/// Can `w` be extended on the left, within the bounded-period square-free
/// words, up to `target_len`? Works on the reversal so the incremental
/// square check applies.
fn left_extendable(
    rev: &mut Vec<Letter>,
    alphabet: &Alphabet,
    bound: PeriodBound,
    target_len: usize,
    visited: &mut u64,
    budget: &GraphBudget,
) -> Result<bool, RauzyError> {
    if rev.len() >= target_len {
        return Ok(true);
    }
    for a in alphabet.letters() {
        rev.push(a);
        *visited += 1;
        if *visited > budget.max_nodes {
            return Err(RauzyError::BudgetExceeded {
                visited: *visited,
                vertices: 0,
                max_nodes: budget.max_nodes,
                max_vertices: budget.max_vertices,
            });
        }
        let ok = !has_square_suffix(rev, bound)
            && left_extendable(rev, alphabet, bound, target_len, visited, budget)?;
        rev.pop();
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Builds the compressed graph.
///
/// Exhaustive mode enumerates, over all bounded-period square-free words up
/// to length `2p-3`, those that are their own shortest qualifying suffix and
/// can be left-extended to length `2p-3`; that set equals the image of the
/// full graph's vertex set under the compression map. Subtrees below a word
/// with a shorter qualifying suffix are pruned: appending letters preserves
/// the condition, so no descendant can be a fixed point.
///
/// Reachable mode closes greedy seeds under `psi_step`; its vertex set is a
/// subset of the exhaustive one and every kept vertex keeps all its arcs, so
/// pruning on it remains sound.
pub fn build_psi_graph(
    alphabet: &Alphabet,
    p: usize,
    mode: PsiMode,
    budget: &GraphBudget,
) -> Result<(LabeledGraph, GraphMeta), RauzyError> {
    if p < 2 {
        return Err(RauzyError::PeriodTooSmall(p));
    }
    let len = 2 * p - 3;
    let bound = PeriodBound::Below(p);
    let mut builder = Builder::new(len);
    let mut visited: u64 = 0;

    match mode {
        PsiMode::Exhaustive => {
            let mut word: Vec<Letter> = Vec::with_capacity(len);
            enumerate_fixed_points(
                alphabet,
                p,
                len,
                bound,
                &mut word,
                &mut builder,
                &mut visited,
                budget,
            )?;
        }
        PsiMode::Reachable { seeds } => {
            let k = alphabet.size();
            let seeds = seeds.unwrap_or(k);
            for j in 0..seeds {
                let start = (j % k) as Letter;
                let rotation = j / k;
                if let Some(seed) = greedy_full_length(alphabet, bound, len, start, rotation) {
                    let m = shortest_qualifying_suffix(&seed, p).expect("full-length word reduces");
                    if builder.table.len() >= budget.max_vertices {
                        return budget_err(&builder, visited, budget);
                    }
                    builder.table.intern(&seed[seed.len() - m..]);
                }
            }
        }
    }

    // arcs: one step per (vertex, letter); targets stay inside the set in
    // exhaustive mode and are added to it in reachable mode
    let mut frontier: Vec<u32> = (0..builder.table.len() as u32).collect();
    let reachable = matches!(mode, PsiMode::Reachable { .. });
    while let Some(v) = frontier.pop() {
        for a in alphabet.letters() {
            let state = builder.table.get(v);
            let mut next = Vec::with_capacity(state.len() + 1);
            next.extend_from_slice(state);
            next.push(a);
            if has_square_suffix(&next, bound) {
                continue;
            }
            let m = match shortest_qualifying_suffix(&next, p) {
                Some(m) => m,
                None => {
                    return Err(RauzyError::InvalidState {
                        state: render(state),
                    })
                }
            };
            let target_word = &next[next.len() - m..];
            let target = match builder.table.lookup(target_word) {
                Some(t) => t,
                None if reachable => {
                    if builder.table.len() >= budget.max_vertices {
                        return budget_err(&builder, visited, budget);
                    }
                    let t = builder.table.intern(target_word);
                    frontier.push(t);
                    t
                }
                None => {
                    return Err(RauzyError::InvalidState {
                        state: render(state),
                    })
                }
            };
            builder.arcs.push((v, target, a));
        }
    }

    Ok((
        builder.finish(),
        GraphMeta {
            alphabet: *alphabet,
            period_bound: p,
            mode: match mode {
                PsiMode::Exhaustive => GraphMode::Exhaustive,
                PsiMode::Reachable { .. } => GraphMode::Reachable,
            },
        },
    ))
}

fn render(w: &[Letter]) -> String {
    w.iter().map(|&l| crate::words::letter_to_char(l)).collect()
}

fn budget_err<T>(
    builder: &Builder,
    visited: u64,
    budget: &GraphBudget,
) -> Result<T, RauzyError> {
    Err(RauzyError::BudgetExceeded {
        visited,
        vertices: builder.table.len(),
        max_nodes: budget.max_nodes,
        max_vertices: budget.max_vertices,
    })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_fixed_points(
    alphabet: &Alphabet,
    p: usize,
    len: usize,
    bound: PeriodBound,
    word: &mut Vec<Letter>,
    builder: &mut Builder,
    visited: &mut u64,
    budget: &GraphBudget,
) -> Result<(), RauzyError> {
    if !word.is_empty() {
        // early-exit suffix scan, shortest first
        match shortest_qualifying_suffix(word, p) {
            Some(m) if m < word.len() => return Ok(()), // descendants can never be fixed points
            Some(_) => {
                let mut rev: Vec<Letter> = word.iter().rev().copied().collect();
                if left_extendable(&mut rev, alphabet, bound, len, visited, budget)? {
                    if builder.table.len() >= budget.max_vertices {
                        return budget_err(builder, *visited, budget);
                    }
                    builder.table.intern(word);
                }
            }
            None => {}
        }
        if word.len() >= len {
            return Ok(());
        }
    }
    for a in alphabet.letters() {
        word.push(a);
        *visited += 1;
        if *visited > budget.max_nodes {
            return budget_err(builder, *visited, budget);
        }
        if !has_square_suffix(word, bound) {
            enumerate_fixed_points(alphabet, p, len, bound, word, builder, visited, budget)?;
        }
        word.pop();
    }
    Ok(())
}

/// First full-length word found by depth-first search trying letters in a
/// rotated order; `None` when the language dies out before `len`.
fn greedy_full_length(
    alphabet: &Alphabet,
    bound: PeriodBound,
    len: usize,
    start: Letter,
    rotation: usize,
) -> Option<Vec<Letter>> {
    let k = alphabet.size();
    fn rec(
        word: &mut Vec<Letter>,
        k: usize,
        bound: PeriodBound,
        len: usize,
        rotation: usize,
    ) -> bool {
        if word.len() == len {
            return true;
        }
        for off in 0..k {
            let a = ((off + rotation) % k) as Letter;
            word.push(a);
            if !has_square_suffix(word, bound) && rec(word, k, bound, len, rotation) {
                return true;
            }
            word.pop();
        }
        false
    }
    let mut word = vec![start];
    rec(&mut word, k, bound, len, rotation).then_some(word)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(k: usize) -> Alphabet {
        Alphabet::new(k).unwrap()
    }

    fn w(text: &str, k: usize) -> Word {
        Word::parse(text, &a(k)).unwrap()
    }

    #[test]
    fn full_rauzy_ternary_p3() {
        let (g, meta) = build_full_rauzy(&a(3), 3, &GraphBudget::default()).unwrap();
        assert_eq!(g.vertex_count(), 12);
        assert_eq!(g.arc_count(), 18);
        assert_eq!(meta.mode, GraphMode::Full);
        // 6 aba-shaped vertices with out-degree 1, 6 abc-shaped with 2
        let mut deg1 = 0;
        let mut deg2 = 0;
        for v in 0..g.vertex_count() {
            let word = g.word(v);
            match g.arcs_from(v).len() {
                1 => {
                    assert_eq!(word[0], word[2]);
                    deg1 += 1;
                }
                2 => {
                    assert_ne!(word[0], word[2]);
                    deg2 += 1;
                }
                d => panic!("unexpected out-degree {d}"),
            }
        }
        assert_eq!((deg1, deg2), (6, 6));
    }

    #[test]
    fn full_rauzy_binary_p3_has_no_arcs() {
        let (g, _) = build_full_rauzy(&a(2), 3, &GraphBudget::default()).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.arc_count(), 0);
        let words: Vec<String> = (0..2).map(|v| render(g.word(v))).collect();
        assert_eq!(words, ["010", "101"]);
    }

    #[test]
    fn full_rauzy_ternary_p2() {
        let (g, _) = build_full_rauzy(&a(3), 2, &GraphBudget::default()).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.arc_count(), 6);
        for (s, t, l) in g.arcs() {
            assert_ne!(s, t);
            assert_eq!(g.word(t), [l]);
        }
    }

    #[test]
    fn full_rauzy_budget_error() {
        let tight = GraphBudget {
            max_vertices: 4,
            max_nodes: u64::MAX,
        };
        match build_full_rauzy(&a(3), 3, &tight) {
            Err(RauzyError::BudgetExceeded { vertices, .. }) => assert!(vertices >= 4),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn psi_paper_example() {
        assert_eq!(psi(&w("0210120", 3), 5).unwrap(), w("10120", 3));
        // idempotence on the image
        assert_eq!(psi(&w("10120", 3), 5).unwrap(), w("10120", 3));
    }

    #[test]
    fn psi_is_identity_on_length3_at_p3() {
        let al = a(3);
        for x in al.letters() {
            for y in al.letters() {
                for z in al.letters() {
                    let word = Word::new(vec![x, y, z], &al).unwrap();
                    if !crate::words::is_square_free(word.letters(), PeriodBound::Below(3)) {
                        continue;
                    }
                    assert_eq!(psi(&word, 3).unwrap(), word);
                }
            }
        }
    }

    #[test]
    fn psi_not_reducible_for_short_input() {
        match psi(&w("0", 3), 5) {
            Err(RauzyError::NotReducible { word }) => assert_eq!(word, "0"),
            other => panic!("expected NotReducible, got {other:?}"),
        }
    }

    #[test]
    fn psi_step_examples() {
        assert_eq!(psi_step(&w("012", 3), 0, 3).unwrap(), w("120", 3));
        match psi_step(&w("010", 3), 1, 3) {
            Err(RauzyError::ArcMissing { state, letter }) => {
                assert_eq!((state.as_str(), letter), ("010", '1'));
            }
            other => panic!("expected ArcMissing, got {other:?}"),
        }
        // derived via the full-graph image at p=5
        assert_eq!(psi_step(&w("10120", 3), 2, 5).unwrap(), w("01202", 3));
    }

    #[test]
    fn exhaustive_psi_p3_matches_full_graph() {
        let (full, _) = build_full_rauzy(&a(3), 3, &GraphBudget::default()).unwrap();
        let (compressed, meta) =
            build_psi_graph(&a(3), 3, PsiMode::Exhaustive, &GraphBudget::default()).unwrap();
        assert_eq!(meta.mode, GraphMode::Exhaustive);
        assert_eq!(compressed, full);
    }

    #[test]
    fn exhaustive_psi_binary_p3() {
        let (g, _) =
            build_psi_graph(&a(2), 3, PsiMode::Exhaustive, &GraphBudget::default()).unwrap();
        assert_eq!((g.vertex_count(), g.arc_count()), (2, 0));
    }

    #[test]
    fn exhaustive_out_degree_at_most_k_minus_one() {
        for (k, p) in [(3usize, 5usize), (4, 3)] {
            let (g, _) =
                build_psi_graph(&a(k), p, PsiMode::Exhaustive, &GraphBudget::default()).unwrap();
            for v in 0..g.vertex_count() {
                assert!(g.arcs_from(v).len() < k);
                // one arc per label
                let mut labels: Vec<_> = g.arcs_from(v).iter().map(|x| x.label).collect();
                labels.dedup();
                assert_eq!(labels.len(), g.arcs_from(v).len());
            }
        }
    }

    #[test]
    fn dead_end_fixed_points_are_not_vertices() {
        // at p=6 a few palindromic words reduce to themselves yet are not
        // the compressed state of any full-length word: they admit no
        // square-free extension on either side, so the exhaustive builder
        // must leave them out
        let al = a(3);
        let word = w("0102010", 3);
        assert_eq!(psi(&word, 6).unwrap(), word);
        for x in al.letters() {
            let mut ext = word.letters().to_vec();
            ext.push(x);
            assert!(has_square_suffix(&ext, PeriodBound::Below(6)));
        }
        let (g, _) =
            build_psi_graph(&al, 6, PsiMode::Exhaustive, &GraphBudget::default()).unwrap();
        assert!(g.find_vertex(word.letters()).is_none());
        assert_eq!(g.vertex_count(), 42);
    }

    #[test]
    fn reachable_is_subset_of_exhaustive() {
        for (k, p) in [(3usize, 4usize), (3, 5), (4, 3)] {
            let (ex, _) =
                build_psi_graph(&a(k), p, PsiMode::Exhaustive, &GraphBudget::default()).unwrap();
            let (re, meta) = build_psi_graph(
                &a(k),
                p,
                PsiMode::Reachable { seeds: None },
                &GraphBudget::default(),
            )
            .unwrap();
            assert_eq!(meta.mode, GraphMode::Reachable);
            assert!(re.vertex_count() <= ex.vertex_count());
            for v in 0..re.vertex_count() {
                let word = re.word(v);
                let in_ex = ex.find_vertex(word).expect("reachable vertex in exhaustive");
                // arcs out of a reachable vertex match the exhaustive ones
                assert_eq!(re.arcs_from(v).len(), ex.arcs_from(in_ex).len());
            }
        }
    }

    #[test]
    fn psi_idempotence_and_suffix_properties() {
        // over all square-free words up to length 2p-3 for (3,3),(3,4),(3,5)
        for p in [3usize, 4, 5] {
            let al = a(3);
            let len = 2 * p - 3;
            let mut stack = vec![Vec::new()];
            while let Some(word) = stack.pop() {
                if !word.is_empty() {
                    let word_w = Word::new(word.clone(), &al).unwrap();
                    if let Ok(img) = psi(&word_w, p) {
                        assert!(word_w.to_string().ends_with(&img.to_string()));
                        assert!(!img.is_empty());
                        assert_eq!(psi(&img, p).unwrap(), img, "idempotence at {word_w}");
                    }
                }
                if word.len() < len {
                    for x in al.letters() {
                        let mut next = word.clone();
                        next.push(x);
                        if !has_square_suffix(&next, PeriodBound::Below(p)) {
                            stack.push(next);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn induced_subgraph_filters_arcs() {
        let (g, _) = build_full_rauzy(&a(3), 3, &GraphBudget::default()).unwrap();
        let keep: Vec<bool> = (0..g.vertex_count())
            .map(|v| {
                let w = g.word(v);
                w[0] != w[2]
            })
            .collect();
        let (sub, remap) = g.induced(&keep);
        assert_eq!(sub.vertex_count(), 6);
        for v in 0..g.vertex_count() {
            assert_eq!(keep[v], remap[v].is_some());
        }
        // every abc vertex keeps exactly the arc to bca inside the subset
        for v in 0..sub.vertex_count() {
            assert_eq!(sub.arcs_from(v).len(), 1);
        }
    }

    #[test]
    fn from_parts_rejects_bad_input() {
        assert!(LabeledGraph::from_parts(vec![vec![0], vec![0]], vec![]).is_err());
        assert!(LabeledGraph::from_parts(vec![vec![0]], vec![(0, 1, 0)]).is_err());
        assert!(
            LabeledGraph::from_parts(vec![vec![0], vec![1]], vec![(0, 1, 0), (0, 0, 0)]).is_err()
        );
    }

    #[test]
    fn period_bound_below_two_is_rejected() {
        let al = a(3);
        assert!(matches!(
            build_psi_graph(&al, 1, PsiMode::Exhaustive, &GraphBudget::default()),
            Err(RauzyError::PeriodTooSmall(1))
        ));
        assert!(matches!(
            build_full_rauzy(&al, 0, &GraphBudget::default()),
            Err(RauzyError::PeriodTooSmall(0))
        ));
        assert!(matches!(
            psi(&w("0", 3), 1),
            Err(RauzyError::PeriodTooSmall(1))
        ));
    }
}
