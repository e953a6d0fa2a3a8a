//! Command-line front end for the square-free-words toolkit.
//!
//! Exit codes are a stable contract: 0 = success / PASS / PROVEN,
//! 1 = honest negative (FAIL, NOT PROVEN, budget exceeded),
//! 2 = usage or validation error.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sqfree_core::certificate::{
    check_singleton, parse_rational, read_certificate, ParsedCertificate,
};
use sqfree_core::prune::{certify_branching, prune_fixed_point, walk_counts_final, write_pruned, VertexSet};
use sqfree_core::rauzy::{
    build_full_rauzy, build_psi_graph, deserialize_graph, graph_header, serialize_graph,
    GraphBudget, GraphMeta, GraphMode, LabeledGraph, PsiMode, RauzyError,
};
use sqfree_core::search::{
    count_compatible_squarefree, oracle_psi_image, PsiImage, SearchBudget, SearchStatus,
};
use sqfree_core::words::{Alphabet, PartialWord, PeriodicPartialWord, Symbol, Word};

#[derive(Parser)]
#[command(name = "sqfree", version, about = "Square-free words under forced letters: graphs, pruning, certificates, searches")]
struct Cli {
    /// Worker threads for walk counting (default: rayon's choice)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Full,
    Exhaustive,
    Reachable,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scale {
    Paper,
    Desk,
}

impl Scale {
    fn as_str(self) -> &'static str {
        match self {
            Scale::Paper => "paper",
            Scale::Desk => "desk",
        }
    }
}

/// Where a certificate comes from: an explicit file, or a named preset.
#[derive(Args)]
struct CertSource {
    /// Certificate file (CERT v1)
    #[arg(long)]
    cert: Option<PathBuf>,
    /// Preset scale; combine with --preset
    #[arg(long, value_enum)]
    scale: Option<Scale>,
    /// Preset name: six-letter | quaternary | ternary
    #[arg(long)]
    preset: Option<String>,
}

const PRESETS: &[(&str, &str, &str)] = &[
    (
        "paper",
        "six-letter",
        include_str!("../../../presets/paper/six-letter.cert"),
    ),
    (
        "paper",
        "quaternary",
        include_str!("../../../presets/paper/quaternary.cert"),
    ),
    (
        "paper",
        "ternary",
        include_str!("../../../presets/paper/ternary.cert"),
    ),
    (
        "desk",
        "six-letter",
        include_str!("../../../presets/desk/six-letter.cert"),
    ),
    (
        "desk",
        "quaternary",
        include_str!("../../../presets/desk/quaternary.cert"),
    ),
];

impl CertSource {
    fn resolve(&self) -> Result<(ParsedCertificate, String)> {
        match (&self.cert, self.scale, &self.preset) {
            (Some(path), None, None) => {
                let file = File::open(path)
                    .with_context(|| format!("cannot open certificate {}", path.display()))?;
                let parsed = read_certificate(BufReader::new(file))?;
                Ok((parsed, path.display().to_string()))
            }
            (None, Some(scale), Some(name)) => {
                let text = PRESETS
                    .iter()
                    .find(|(s, n, _)| *s == scale.as_str() && n == name)
                    .map(|(_, _, t)| *t)
                    .ok_or_else(|| {
                        let available: Vec<String> = PRESETS
                            .iter()
                            .map(|(s, n, _)| format!("{s}/{n}"))
                            .collect();
                        anyhow!(
                            "no preset {}/{name}; available: {}",
                            scale.as_str(),
                            available.join(", ")
                        )
                    })?;
                let parsed = read_certificate(text.as_bytes())?;
                Ok((parsed, format!("preset {}/{name}", scale.as_str())))
            }
            _ => bail!("give either --cert <file> or --scale <paper|desk> --preset <name>"),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a graph and write it to a file
    BuildGraph {
        /// Alphabet size
        #[arg(long)]
        k: usize,
        /// Period bound (squares of period < p are excluded)
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        /// Output graph file
        #[arg(long)]
        out: PathBuf,
        /// Cap on search nodes visited during construction
        #[arg(long, default_value_t = GraphBudget::default().max_nodes)]
        max_nodes: u64,
        /// Cap on vertices held
        #[arg(long, default_value_t = GraphBudget::default().max_vertices)]
        max_vertices: usize,
        /// Seed words for reachable mode (default: one per letter)
        #[arg(long)]
        seeds: Option<usize>,
    },
    /// Prune a graph to the largest subgraph meeting the thresholds
    Prune {
        /// Graph file to prune
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        cert: CertSource,
        /// Output file for the retained vertex set
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the weight-system inequality of a certificate
    CheckCert {
        #[command(flatten)]
        cert: CertSource,
    },
    /// Verify the single-pattern inequality
    CheckSingleton {
        /// Branching threshold C
        #[arg(long)]
        c: u64,
        /// Block length |w|
        #[arg(long)]
        len_w: usize,
        /// Period bound p (a multiple of |w|, at least 2|w|)
        #[arg(long)]
        p: usize,
        /// Weight x as a fraction, e.g. 51/100
        #[arg(long)]
        x: String,
    },
    /// Count square-free words compatible with a periodic partial word
    LowerBound {
        /// Alphabet size
        #[arg(long)]
        k: usize,
        /// Repeating block, e.g. "0.1.2.3." ('.' is a hole)
        #[arg(long)]
        cycle: String,
        /// Optional non-repeating prefix block
        #[arg(long)]
        prefix: Option<String>,
        /// Cap on word length
        #[arg(long, default_value_t = SearchBudget::default().max_len)]
        max_len: usize,
        /// Cap on words counted
        #[arg(long, default_value_t = SearchBudget::default().max_nodes)]
        max_nodes: u64,
    },
    /// Compare a compressed graph against the brute-force image of the full
    /// graph, including walk counts on random patterns
    OracleVerify {
        /// Alphabet size (taken from --graph when omitted)
        #[arg(long)]
        k: Option<usize>,
        /// Period bound (taken from --graph when omitted)
        #[arg(long)]
        p: Option<usize>,
        /// Graph file to verify instead of building one in process
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Random patterns for the walk-count comparison
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Full pipeline: prune, certify the branching guarantee, check the
    /// weight system; PROVEN only if a non-empty subgraph and a passing
    /// certificate both exist
    Prove {
        /// Graph file; when omitted the graph is built in process
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        cert: CertSource,
        /// Cap on search nodes when building in process
        #[arg(long, default_value_t = GraphBudget::default().max_nodes)]
        max_nodes: u64,
        /// Cap on vertices when building in process
        #[arg(long, default_value_t = GraphBudget::default().max_vertices)]
        max_vertices: usize,
        /// Write the retained vertex set here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // a failure here only means a pool already exists (e.g. in tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

const EXIT_OK: ExitCode = ExitCode::SUCCESS;
const EXIT_NEGATIVE: u8 = 1;

fn run(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::BuildGraph {
            k,
            p,
            mode,
            out,
            max_nodes,
            max_vertices,
            seeds,
        } => cmd_build_graph(k, p, mode, &out, max_nodes, max_vertices, seeds),
        Cmd::Prune { graph, cert, out } => cmd_prune(&graph, &cert, out.as_deref()),
        Cmd::CheckCert { cert } => cmd_check_cert(&cert),
        Cmd::CheckSingleton { c, len_w, p, x } => cmd_check_singleton(c, len_w, p, &x),
        Cmd::LowerBound {
            k,
            cycle,
            prefix,
            max_len,
            max_nodes,
        } => cmd_lower_bound(k, &cycle, prefix.as_deref(), max_len, max_nodes),
        Cmd::OracleVerify {
            k,
            p,
            graph,
            samples,
            seed,
        } => cmd_oracle_verify(k, p, graph.as_deref(), samples, seed),
        Cmd::Prove {
            graph,
            cert,
            max_nodes,
            max_vertices,
            out,
        } => cmd_prove(graph.as_deref(), &cert, max_nodes, max_vertices, out.as_deref()),
    }
}

fn budget_negative(err: &RauzyError) -> bool {
    matches!(err, RauzyError::BudgetExceeded { .. })
}

fn cmd_build_graph(
    k: usize,
    p: usize,
    mode: ModeArg,
    out: &Path,
    max_nodes: u64,
    max_vertices: usize,
    seeds: Option<usize>,
) -> Result<ExitCode> {
    let alphabet = Alphabet::new(k)?;
    let budget = GraphBudget {
        max_vertices,
        max_nodes,
    };
    let built = match mode {
        ModeArg::Full => build_full_rauzy(&alphabet, p, &budget),
        ModeArg::Exhaustive => build_psi_graph(&alphabet, p, PsiMode::Exhaustive, &budget),
        ModeArg::Reachable => build_psi_graph(&alphabet, p, PsiMode::Reachable { seeds }, &budget),
    };
    let (graph, meta) = match built {
        Ok(pair) => pair,
        Err(e) if budget_negative(&e) => {
            eprintln!("budget exceeded before the graph was complete: {e}");
            return Ok(ExitCode::from(EXIT_NEGATIVE));
        }
        Err(e) => return Err(e.into()),
    };
    let file = File::create(out)
        .with_context(|| format!("cannot create output file {}", out.display()))?;
    serialize_graph(&graph, &meta, BufWriter::new(file))?;
    println!("wrote {}", out.display());
    println!("|V|={} |A|={}", graph.vertex_count(), graph.arc_count());
    println!(
        "peak memory estimate: ~{} MiB",
        graph.memory_estimate().div_ceil(1 << 20)
    );
    Ok(EXIT_OK)
}

fn load_graph(path: &Path) -> Result<(LabeledGraph, GraphMeta)> {
    let file =
        File::open(path).with_context(|| format!("cannot open graph {}", path.display()))?;
    Ok(deserialize_graph(BufReader::new(file))?)
}

fn check_consistency(meta: &GraphMeta, parsed: &ParsedCertificate) -> Result<()> {
    if meta.alphabet.size() != parsed.alphabet.size() {
        bail!(
            "alphabet mismatch: graph has k={}, certificate has k={}",
            meta.alphabet.size(),
            parsed.alphabet.size()
        );
    }
    if meta.period_bound != parsed.period_bound {
        bail!(
            "period bound mismatch: graph has p={}, certificate has p={}",
            meta.period_bound,
            parsed.period_bound
        );
    }
    Ok(())
}

fn echo_patterns(parsed: &ParsedCertificate) {
    let by_length: BTreeMap<usize, usize> =
        parsed
            .patterns
            .iter()
            .fold(BTreeMap::new(), |mut acc, pat| {
                *acc.entry(pat.len()).or_insert(0) += 1;
                acc
            });
    let lengths: Vec<String> = by_length
        .iter()
        .map(|(len, n)| format!("{n} of length {len}"))
        .collect();
    println!(
        "patterns: {} ({}), k={}, p={}",
        parsed.patterns.len(),
        lengths.join(", "),
        parsed.alphabet.size(),
        parsed.period_bound
    );
    if parsed.patterns.len() <= 50 {
        let rendered: Vec<String> = parsed.patterns.iter().map(|p| p.to_string()).collect();
        println!("expanded: {}", rendered.join(" "));
    }
}

fn cmd_prune(graph_path: &Path, cert: &CertSource, out: Option<&Path>) -> Result<ExitCode> {
    let (graph, meta) = load_graph(graph_path)?;
    let (parsed, origin) = cert.resolve()?;
    check_consistency(&meta, &parsed)?;
    let patterns = parsed.pattern_set()?;
    println!("graph: {}", graph_header(&graph, &meta));
    println!("certificate: {origin}");
    echo_patterns(&parsed);
    let pruned = prune_fixed_point(&graph, &patterns);
    println!("|X|={} of {}", pruned.len(), graph.vertex_count());
    if let Some(path) = out {
        let file = File::create(path)
            .with_context(|| format!("cannot create output file {}", path.display()))?;
        write_pruned(&pruned, &graph_header(&graph, &meta), BufWriter::new(file))?;
        println!("wrote {}", path.display());
    }
    if pruned.is_empty() {
        println!("pruned subgraph is empty: the thresholds are not certifiable on this graph");
        return Ok(ExitCode::from(EXIT_NEGATIVE));
    }
    Ok(EXIT_OK)
}

fn cmd_check_cert(cert: &CertSource) -> Result<ExitCode> {
    let (parsed, origin) = cert.resolve()?;
    println!("certificate: {origin}");
    echo_patterns(&parsed);
    let certificate = parsed.certificate()?;
    let report = certificate.check_main();
    println!("{report}");
    Ok(if report.pass() {
        EXIT_OK
    } else {
        ExitCode::from(EXIT_NEGATIVE)
    })
}

fn cmd_check_singleton(c: u64, len_w: usize, p: usize, x: &str) -> Result<ExitCode> {
    let x = parse_rational(x).ok_or_else(|| anyhow!("bad rational {x:?}, expected num/den"))?;
    let report = check_singleton(c, len_w, p, &x)?;
    println!("C={c} |w|={len_w} p={p} x={x}: {report}");
    Ok(if report.holds {
        EXIT_OK
    } else {
        ExitCode::from(EXIT_NEGATIVE)
    })
}

fn cmd_lower_bound(
    k: usize,
    cycle: &str,
    prefix: Option<&str>,
    max_len: usize,
    max_nodes: u64,
) -> Result<ExitCode> {
    let alphabet = Alphabet::new(k)?;
    let cycle_block = PartialWord::parse(cycle, &alphabet)?;
    let prefix_blocks = match prefix {
        Some(p) => vec![PartialWord::parse(p, &alphabet)?],
        None => Vec::new(),
    };
    let mu = PeriodicPartialWord::cyclic(prefix_blocks, vec![cycle_block])?;
    let budget = SearchBudget {
        max_len,
        max_nodes,
    };
    println!("mu = {mu} over an alphabet of {k} letters");
    let outcome = count_compatible_squarefree(&mu, &alphabet, &budget);
    println!("{}", outcome.summary_line());
    println!(
        "nonempty count: {} (the count above includes the empty word)",
        outcome.nonempty()
    );
    println!(
        "deepest witness ({} letters): {}",
        outcome.witness.len(),
        outcome.witness
    );
    Ok(match outcome.status {
        SearchStatus::Exhausted => EXIT_OK,
        SearchStatus::BudgetExceeded => ExitCode::from(EXIT_NEGATIVE),
    })
}

fn random_pattern(rng: &mut impl FnMut() -> u64, k: usize, max_len: usize) -> PartialWord {
    let len = 1 + (rng() as usize) % max_len;
    let symbols = (0..len)
        .map(|_| {
            if rng().is_multiple_of(2) {
                Symbol::Hole
            } else {
                Symbol::Letter((rng() % k as u64) as u8)
            }
        })
        .collect();
    PartialWord::new(symbols, &Alphabet::new(k).unwrap()).unwrap()
}

/// Small deterministic generator so the verification runs are reproducible
/// without pulling a rand dependency into the binary.
fn splitmix(seed: u64) -> impl FnMut() -> u64 {
    let mut state = seed;
    move || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

fn cmd_oracle_verify(
    k: Option<usize>,
    p: Option<usize>,
    graph: Option<&Path>,
    samples: usize,
    seed: u64,
) -> Result<ExitCode> {
    let budget = GraphBudget::default();
    let (compressed, meta) = match graph {
        Some(path) => {
            let (g, meta) = load_graph(path)?;
            if let Some(k) = k {
                if k != meta.alphabet.size() {
                    bail!("--k {} disagrees with the graph's k={}", k, meta.alphabet.size());
                }
            }
            if let Some(p) = p {
                if p != meta.period_bound {
                    bail!("--p {} disagrees with the graph's p={}", p, meta.period_bound);
                }
            }
            (g, meta)
        }
        None => {
            let k = k.ok_or_else(|| anyhow!("--k is required without --graph"))?;
            let p = p.ok_or_else(|| anyhow!("--p is required without --graph"))?;
            let alphabet = Alphabet::new(k)?;
            build_psi_graph(&alphabet, p, PsiMode::Exhaustive, &budget)?
        }
    };
    let alphabet = meta.alphabet;
    let p = meta.period_bound;
    println!(
        "verifying {} against the brute-force image at k={} p={}",
        graph_header(&compressed, &meta),
        alphabet.size(),
        p
    );

    let image = oracle_psi_image(&alphabet, p, &budget)?;
    let under_test = PsiImage::of_graph(&compressed);
    let mut all_ok = true;

    if under_test.vertices == image.vertices {
        println!("vertices: PASS ({})", image.vertices.len());
    } else {
        all_ok = false;
        let missing: Vec<String> = image
            .vertices
            .difference(&under_test.vertices)
            .take(10)
            .map(|w| w.to_string())
            .collect();
        let extra: Vec<String> = under_test
            .vertices
            .difference(&image.vertices)
            .take(10)
            .map(|w| w.to_string())
            .collect();
        println!(
            "vertices: FAIL ({} vs {} expected; missing: [{}]; extra: [{}])",
            under_test.vertices.len(),
            image.vertices.len(),
            missing.join(" "),
            extra.join(" ")
        );
    }

    if under_test.arcs == image.arcs {
        println!("arcs: PASS ({})", image.arcs.len());
    } else {
        all_ok = false;
        println!(
            "arcs: FAIL ({} vs {} expected)",
            under_test.arcs.len(),
            image.arcs.len()
        );
    }

    // walk counts transfer: compare the full graph against the compressed
    // one at every vertex, for `samples` random patterns
    if all_ok {
        let (full, _) = build_full_rauzy(&alphabet, p, &budget)?;
        let image_index: Vec<usize> = (0..full.vertex_count())
            .map(|v| {
                let w = Word::new(full.word(v).to_vec(), &alphabet).expect("valid");
                let img = sqfree_core::rauzy::psi(&w, p).expect("full-length word reduces");
                compressed.find_vertex(img.letters()).expect("image vertex")
            })
            .collect();
        let x_full = VertexSet::full(full.vertex_count());
        let x_compressed = VertexSet::full(compressed.vertex_count());
        let mut rng = splitmix(seed);
        let max_len = (2 * p - 3).min(8);
        let mut agreed = 0usize;
        for _ in 0..samples {
            let w = random_pattern(&mut rng, alphabet.size(), max_len);
            let on_full = walk_counts_final(&full, &x_full, &w, u64::MAX)?;
            let on_compressed = walk_counts_final(&compressed, &x_compressed, &w, u64::MAX)?;
            let ok = (0..full.vertex_count())
                .all(|v| on_full[v] == on_compressed[image_index[v]]);
            if ok {
                agreed += 1;
            } else {
                all_ok = false;
                println!("walk-counts: mismatch on pattern {w}");
            }
        }
        println!(
            "walk-counts: {} ({agreed}/{samples} patterns agree)",
            if agreed == samples { "PASS" } else { "FAIL" }
        );
    } else {
        println!("walk-counts: SKIPPED (vertex or arc sets already differ)");
    }

    println!("oracle verification: {}", if all_ok { "PASS" } else { "FAIL" });
    Ok(if all_ok {
        EXIT_OK
    } else {
        ExitCode::from(EXIT_NEGATIVE)
    })
}

fn cmd_prove(
    graph: Option<&Path>,
    cert: &CertSource,
    max_nodes: u64,
    max_vertices: usize,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let (parsed, origin) = cert.resolve()?;
    println!("certificate: {origin}");
    echo_patterns(&parsed);

    let (graph, meta) = match graph {
        Some(path) => {
            let pair = load_graph(path)?;
            check_consistency(&pair.1, &parsed)?;
            pair
        }
        None => {
            println!(
                "building the compressed graph in process (k={}, p={}, exhaustive)",
                parsed.alphabet.size(),
                parsed.period_bound
            );
            let budget = GraphBudget {
                max_vertices,
                max_nodes,
            };
            match build_psi_graph(
                &parsed.alphabet,
                parsed.period_bound,
                PsiMode::Exhaustive,
                &budget,
            ) {
                Ok(pair) => pair,
                Err(e) if budget_negative(&e) => {
                    eprintln!("budget exceeded before the graph was complete: {e}");
                    println!("result: NOT PROVEN — graph construction exceeded its budget; rerun with a larger budget or a precomputed --graph file");
                    return Ok(ExitCode::from(EXIT_NEGATIVE));
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    println!("graph: {}", graph_header(&graph, &meta));

    let patterns = parsed.pattern_set()?;
    let certificate = parsed.certificate()?;

    let pruned = prune_fixed_point(&graph, &patterns);
    println!("prune: |X|={} of {}", pruned.len(), graph.vertex_count());
    if pruned.is_empty() {
        println!("result: NOT PROVEN — pruned subgraph empty (the branching thresholds are not certifiable on this graph)");
        return Ok(ExitCode::from(EXIT_NEGATIVE));
    }
    if let Some(path) = out {
        let file = File::create(path)
            .with_context(|| format!("cannot create output file {}", path.display()))?;
        write_pruned(&pruned, &graph_header(&graph, &meta), BufWriter::new(file))?;
        println!("wrote {}", path.display());
    }

    let certified = certify_branching(&graph, pruned.retained(), &patterns)?;
    println!(
        "branching re-check on X: {}",
        if certified { "PASS" } else { "FAIL" }
    );
    if !certified {
        println!("result: NOT PROVEN — independent branching re-check failed");
        return Ok(ExitCode::from(EXIT_NEGATIVE));
    }

    let report = certificate.check_main();
    println!("weight system:");
    println!("{report}");
    if !report.pass() {
        println!("result: NOT PROVEN — the weight system does not hold");
        return Ok(ExitCode::from(EXIT_NEGATIVE));
    }

    println!("result: PROVEN — every infinite concatenation of the patterns admits infinitely many compatible square-free words");
    if meta.mode == GraphMode::Reachable {
        println!("note: the graph was built in reachable mode; that is sound for this conclusion");
    }
    Ok(EXIT_OK)
}
