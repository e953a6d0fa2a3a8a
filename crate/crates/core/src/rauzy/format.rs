//! Line-oriented text format for labeled graphs.
//!
//! ```text
//! RAUZY v1 k=<int> p=<int> mode=<exhaustive|reachable|full> |V|=<int> |A|=<int>
//! <one vertex word per line, index = line order>
//! <one arc per line: src dst label>
//! ```
//!
//! UTF-8, LF endings, no trailing whitespace. Vertex words use the usual
//! letter rendering; arc endpoints are 0-based vertex indices and the label
//! is a letter character.

use std::io::{BufRead, Write};

use crate::words::{letter_from_char, letter_to_char, Alphabet, Letter};

use super::{GraphMeta, GraphMode, LabeledGraph, RauzyError};

pub fn graph_header(g: &LabeledGraph, meta: &GraphMeta) -> String {
    format!(
        "RAUZY v1 k={} p={} mode={} |V|={} |A|={}",
        meta.alphabet.size(),
        meta.period_bound,
        meta.mode,
        g.vertex_count(),
        g.arc_count()
    )
}

pub fn serialize_graph<W: Write>(
    g: &LabeledGraph,
    meta: &GraphMeta,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "{}", graph_header(g, meta))?;
    for v in 0..g.vertex_count() {
        for &l in g.word(v) {
            write!(out, "{}", letter_to_char(l))?;
        }
        writeln!(out)?;
    }
    for (src, dst, label) in g.arcs() {
        writeln!(out, "{} {} {}", src, dst, letter_to_char(label))?;
    }
    Ok(())
}

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T, RauzyError> {
    Err(RauzyError::Parse {
        line,
        msg: msg.into(),
    })
}

fn field<'a>(tok: Option<&'a str>, key: &str, line: usize) -> Result<&'a str, RauzyError> {
    match tok.and_then(|t| t.strip_prefix(key)) {
        Some(v) => Ok(v),
        None => parse_err(line, format!("expected {key}<value> in header")),
    }
}

pub fn deserialize_graph<R: BufRead>(input: R) -> Result<(LabeledGraph, GraphMeta), RauzyError> {
    let mut lines = input.lines().enumerate();
    let (_, header) = match lines.next() {
        Some((i, l)) => (i, l?),
        None => return parse_err(1, "empty input"),
    };
    let mut toks = header.split(' ');
    if toks.next() != Some("RAUZY") || toks.next() != Some("v1") {
        return parse_err(1, "expected header starting with 'RAUZY v1'");
    }
    let k: usize = field(toks.next(), "k=", 1)?
        .parse()
        .map_err(|e| RauzyError::Parse {
            line: 1,
            msg: format!("bad k: {e}"),
        })?;
    let p: usize = field(toks.next(), "p=", 1)?
        .parse()
        .map_err(|e| RauzyError::Parse {
            line: 1,
            msg: format!("bad p: {e}"),
        })?;
    let mode_str = field(toks.next(), "mode=", 1)?;
    let mode = match GraphMode::parse(mode_str) {
        Some(m) => m,
        None => return parse_err(1, format!("unknown mode {mode_str:?}")),
    };
    let n_vertices: usize = field(toks.next(), "|V|=", 1)?
        .parse()
        .map_err(|e| RauzyError::Parse {
            line: 1,
            msg: format!("bad |V|: {e}"),
        })?;
    let n_arcs: usize = field(toks.next(), "|A|=", 1)?
        .parse()
        .map_err(|e| RauzyError::Parse {
            line: 1,
            msg: format!("bad |A|: {e}"),
        })?;
    if toks.next().is_some() {
        return parse_err(1, "trailing tokens in header");
    }
    let alphabet = Alphabet::new(k).map_err(|e| RauzyError::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    if p < 2 {
        return parse_err(1, format!("p={p} is below 2"));
    }
    let max_word_len = 2 * p - 3;

    let mut words: Vec<Vec<Letter>> = Vec::with_capacity(n_vertices);
    let mut seen_words: std::collections::HashSet<Vec<Letter>> = std::collections::HashSet::new();
    for _ in 0..n_vertices {
        let (idx, line) = match lines.next() {
            Some((i, l)) => (i + 1, l?),
            None => return parse_err(n_vertices + 1, "fewer vertex lines than |V| declares"),
        };
        let mut word = Vec::with_capacity(line.len());
        for c in line.chars() {
            match letter_from_char(c) {
                Some(l) if alphabet.contains(l) => word.push(l),
                _ => return parse_err(idx, format!("bad letter {c:?} in vertex word")),
            }
        }
        if word.is_empty() {
            return parse_err(idx, "empty vertex word");
        }
        if word.len() > max_word_len {
            return parse_err(
                idx,
                format!("vertex word longer than 2p-3 = {max_word_len}"),
            );
        }
        if mode == GraphMode::Full && word.len() != max_word_len {
            return parse_err(
                idx,
                format!("full-mode vertex word must have length 2p-3 = {max_word_len}"),
            );
        }
        if !seen_words.insert(word.clone()) {
            return parse_err(idx, format!("duplicate vertex word {line:?}"));
        }
        words.push(word);
    }

    let mut arcs: Vec<(usize, usize, Letter)> = Vec::with_capacity(n_arcs);
    let mut seen_labels: Vec<Vec<Letter>> = vec![Vec::new(); n_vertices];
    for _ in 0..n_arcs {
        let (idx, line) = match lines.next() {
            Some((i, l)) => (i + 1, l?),
            None => {
                return parse_err(
                    n_vertices + n_arcs + 1,
                    "fewer arc lines than |A| declares",
                )
            }
        };
        let mut cols = line.split(' ');
        let (src, dst, label) = match (cols.next(), cols.next(), cols.next(), cols.next()) {
            (Some(s), Some(d), Some(l), None) => (s, d, l),
            _ => return parse_err(idx, "expected 'src dst label'"),
        };
        let src: usize = src
            .parse()
            .map_err(|e| RauzyError::Parse {
                line: idx,
                msg: format!("bad source index: {e}"),
            })?;
        let dst: usize = dst
            .parse()
            .map_err(|e| RauzyError::Parse {
                line: idx,
                msg: format!("bad target index: {e}"),
            })?;
        let label = match label.chars().next().filter(|_| label.len() == 1) {
            Some(c) => match letter_from_char(c) {
                Some(l) if alphabet.contains(l) => l,
                _ => return parse_err(idx, format!("bad label {label:?}")),
            },
            None => return parse_err(idx, format!("bad label {label:?}")),
        };
        if src >= n_vertices || dst >= n_vertices {
            return parse_err(idx, format!("arc ({src},{dst}) out of range"));
        }
        if seen_labels[src].contains(&label) {
            return parse_err(
                idx,
                format!("vertex {src} already has an outgoing arc labeled {label}"),
            );
        }
        seen_labels[src].push(label);
        arcs.push((src, dst, label));
    }
    if let Some((idx, line)) = lines.next() {
        let line = line?;
        if !line.is_empty() {
            return parse_err(idx + 1, "trailing content after declared arcs");
        }
    }

    let first_data_line = 2;
    let graph = LabeledGraph::from_parts(words, arcs).map_err(|e| match e {
        RauzyError::InvalidGraph(msg) => RauzyError::Parse {
            line: first_data_line,
            msg,
        },
        other => other,
    })?;
    Ok((
        graph,
        GraphMeta {
            alphabet,
            period_bound: p,
            mode,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rauzy::{build_full_rauzy, build_psi_graph, GraphBudget, PsiMode};

    fn roundtrip(g: &LabeledGraph, meta: &GraphMeta) -> (LabeledGraph, GraphMeta) {
        let mut buf = Vec::new();
        serialize_graph(g, meta, &mut buf).unwrap();
        deserialize_graph(buf.as_slice()).unwrap()
    }

    #[test]
    fn roundtrip_identity_small_graphs() {
        let a3 = Alphabet::new(3).unwrap();
        let (g, meta) = build_full_rauzy(&a3, 3, &GraphBudget::default()).unwrap();
        let (g2, meta2) = roundtrip(&g, &meta);
        assert_eq!(g, g2);
        assert_eq!(meta, meta2);

        let (g, meta) =
            build_psi_graph(&a3, 5, PsiMode::Exhaustive, &GraphBudget::default()).unwrap();
        let (g2, meta2) = roundtrip(&g, &meta);
        assert_eq!(g, g2);
        assert_eq!(meta, meta2);
    }

    #[test]
    fn serialization_is_byte_stable() {
        let a3 = Alphabet::new(3).unwrap();
        let (g, meta) = build_full_rauzy(&a3, 3, &GraphBudget::default()).unwrap();
        let mut one = Vec::new();
        serialize_graph(&g, &meta, &mut one).unwrap();
        let (g2, meta2) = deserialize_graph(one.as_slice()).unwrap();
        let mut two = Vec::new();
        serialize_graph(&g2, &meta2, &mut two).unwrap();
        assert_eq!(one, two);
        assert!(one.starts_with(b"RAUZY v1 k=3 p=3 mode=full |V|=12 |A|=18\n"));
    }

    #[test]
    fn empty_graph_roundtrips() {
        // binary p=4 has no vertices at all
        let a2 = Alphabet::new(2).unwrap();
        let (g, meta) =
            build_psi_graph(&a2, 4, PsiMode::Exhaustive, &GraphBudget::default()).unwrap();
        assert_eq!(g.vertex_count(), 0);
        let (g2, meta2) = roundtrip(&g, &meta);
        assert_eq!(g, g2);
        assert_eq!(meta, meta2);
    }

    #[test]
    fn header_count_mismatch_is_an_error() {
        let text = "RAUZY v1 k=3 p=3 mode=full |V|=2 |A|=0\n010\n";
        match deserialize_graph(text.as_bytes()) {
            Err(RauzyError::Parse { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("fewer vertex lines"), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad_word = "RAUZY v1 k=3 p=3 mode=full |V|=1 |A|=0\n0x0\n";
        match deserialize_graph(bad_word.as_bytes()) {
            Err(RauzyError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let bad_arc = "RAUZY v1 k=3 p=2 mode=full |V|=2 |A|=1\n0\n1\n0 7 1\n";
        match deserialize_graph(bad_arc.as_bytes()) {
            Err(RauzyError::Parse { line, msg }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("out of range"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        let dup_label = "RAUZY v1 k=3 p=2 mode=full |V|=2 |A|=2\n0\n1\n0 1 1\n0 1 1\n";
        match deserialize_graph(dup_label.as_bytes()) {
            Err(RauzyError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        let dup_word = "RAUZY v1 k=3 p=2 mode=full |V|=2 |A|=0\n0\n0\n";
        match deserialize_graph(dup_word.as_bytes()) {
            Err(RauzyError::Parse { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("duplicate"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        let bad_header = "RAUZY v2 k=3 p=3 mode=full |V|=0 |A|=0\n";
        assert!(matches!(
            deserialize_graph(bad_header.as_bytes()),
            Err(RauzyError::Parse { line: 1, .. })
        ));
    }
}
