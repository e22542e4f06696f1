//! Command-line entry points and the read-only HTTP API.

mod api;
mod http;
mod render;

use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

pub use api::{Api, ApiResponse};
pub use http::{router, serve};
pub use render::{coordinates_tsv, map_svg};

use crate::atlas::{self, MapStatus, Prepared, Resource};
use crate::ca::Weighting;
use crate::config::BuildConfig;
use crate::error::{Error, Result};
use crate::ingest::{self, CorpusFormat};
use crate::morpho::{self, LexicalUnit, MorphoLexicon, PosTag};
use crate::relations::{self, RelationMode};

#[derive(Debug, Parser)]
#[command(name = "atlas", version, about = "Build and browse corpus-driven semantic maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Window,
    Sentence,
    Syntactic,
    Synonyms,
}

impl From<ModeArg> for RelationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Window => RelationMode::Window,
            ModeArg::Sentence => RelationMode::Sentence,
            ModeArg::Syntactic => RelationMode::Syntactic,
            ModeArg::Synonyms => RelationMode::Synonyms,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeightingArg {
    Binary,
    Support,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a resource from a corpus directory (*.txt, or *.tsv when annotated).
    Build {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        stop_top: Option<usize>,
        #[arg(long)]
        context_quantile: Option<f64>,
        #[arg(long)]
        edge_min: Option<usize>,
        #[arg(long)]
        min_freq: Option<u64>,
        #[arg(long, value_enum)]
        weighting: Option<WeightingArg>,
        /// Morphological lexicon: surface, lemma, POS per line.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Synonym pairs, required by the synonyms mode.
        #[arg(long)]
        synonyms: Option<PathBuf>,
    },
    /// Render one word's map as SVG and/or a coordinate table.
    Map {
        word: String,
        #[arg(long)]
        resource: PathBuf,
        /// Two 1-based axes, comma separated.
        #[arg(long, default_value = "1,2")]
        axes: String,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        tsv: Option<PathBuf>,
        #[arg(long)]
        pos: Option<PosTag>,
    },
    /// Print the contexts attesting one clique of a word.
    Contexts {
        word: String,
        clique: usize,
        #[arg(long)]
        resource: PathBuf,
        #[arg(long)]
        pos: Option<PosTag>,
    },
    /// Compare one word's map across two resources.
    Compare {
        a: PathBuf,
        b: PathBuf,
        word: String,
        #[arg(long)]
        pos: Option<PosTag>,
    },
    /// Serve the HTTP API over a resource.
    Serve {
        #[arg(long)]
        resource: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
}

/// A failed command: message and process exit code.
struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) => 2,
            _ => 1,
        };
        Failure(code, e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Runs the command line and returns the process exit code. Regular output
/// goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Build {
            corpus,
            out: out_dir,
            mode,
            window,
            stop_top,
            context_quantile,
            edge_min,
            min_freq,
            weighting,
            lexicon,
            synonyms,
        } => {
            let mut cfg = BuildConfig::for_mode(mode.into());
            if let Some(v) = window {
                cfg.window_width = v;
            }
            if let Some(v) = stop_top {
                cfg.filter.stop_top_k = v;
            }
            if let Some(v) = context_quantile {
                cfg.filter.context_quantile = v;
            }
            if let Some(v) = edge_min {
                cfg.edge_min = v;
            }
            if let Some(v) = min_freq {
                cfg.min_freq = v;
            }
            if let Some(w) = weighting {
                cfg.weighting = match w {
                    WeightingArg::Binary => Weighting::Binary,
                    WeightingArg::Support => Weighting::Support,
                };
            }
            cmd_build(corpus.as_deref(), &out_dir, &cfg, lexicon.as_deref(), synonyms.as_deref(), out)
        }
        Command::Map {
            word,
            resource,
            axes,
            svg,
            tsv,
            pos,
        } => cmd_map(&resource, &word, pos, &axes, svg.as_deref(), tsv.as_deref(), out),
        Command::Contexts {
            word,
            clique,
            resource,
            pos,
        } => cmd_contexts(&resource, &word, pos, clique, out),
        Command::Compare { a, b, word, pos } => cmd_compare(&a, &b, &word, pos, out),
        Command::Serve { resource, port, host } => cmd_serve(&resource, SocketAddr::new(host, port), out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn open(path: &Path) -> Result<BufReader<fs::File>> {
    fs::File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Reads the corpus (or synonym file), builds every map and writes the
/// resource.
fn cmd_build(
    corpus: Option<&Path>,
    out_dir: &Path,
    cfg: &BuildConfig,
    lexicon: Option<&Path>,
    synonyms: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let started = Instant::now();
    cfg.validate()?;
    let prepared = if cfg.mode == RelationMode::Synonyms {
        let path = synonyms.ok_or_else(|| Failure(2, "synonyms mode requires --synonyms FILE".into()))?;
        let source = relations::load_synonyms(open(path)?, &path.display().to_string())?;
        Prepared::from_synonyms(source)
    } else {
        let root = corpus.ok_or_else(|| Failure(2, "--corpus DIR is required".into()))?;
        if !root.is_dir() {
            return Err(Failure(2, format!("corpus directory not found: {}", root.display())));
        }
        let annotated = !ingest::corpus_files(root, CorpusFormat::Annotated)?.is_empty();
        if cfg.mode == RelationMode::Syntactic && !annotated {
            return Err(Failure(2, "syntactic mode requires annotated input".into()));
        }
        let format = if annotated { CorpusFormat::Annotated } else { CorpusFormat::Plain };
        let docs = ingest::load_corpus(root, format)?;
        let lexicon = match lexicon {
            Some(path) => morpho::load_lexicon(open(path)?, &path.display().to_string())?,
            None => MorphoLexicon::new(),
        };
        Prepared::from_documents(&docs, &lexicon, cfg)?
    };
    let res = atlas::build_resource(&prepared, cfg)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    atlas::save_resource(&res, out_dir)?;
    let m = &res.manifest;
    let _ = writeln!(
        out,
        "vocabulary {}, mapped {}, not mappable {}, {:.2}s",
        m.vocabulary_size,
        m.mapped,
        m.not_mappable,
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

/// Vocabulary keys sharing the longest common prefix with `word`.
fn nearest_keys(res: &Resource, word: &str, limit: usize) -> Vec<String> {
    let common = |k: &str| k.chars().zip(word.chars()).take_while(|(a, b)| a == b).count();
    let best = res.vocabulary.iter().map(|e| common(&e.unit.key)).max().unwrap_or(0);
    if best == 0 {
        return Vec::new();
    }
    let mut keys: Vec<String> = res
        .vocabulary
        .iter()
        .filter(|e| common(&e.unit.key) == best && e.status == MapStatus::Mapped)
        .map(|e| e.unit.key.to_string())
        .collect();
    keys.dedup();
    keys.truncate(limit);
    keys
}

/// Finds the map of `word`, or explains why there is none.
fn find_map<'r>(res: &'r Resource, word: &str, pos: Option<PosTag>) -> std::result::Result<&'r atlas::SemanticMap, Failure> {
    let Some(unit) = res.resolve(word, pos) else {
        let near = nearest_keys(res, word, 8);
        let hint = if near.is_empty() { String::new() } else { format!("; nearest: {}", near.join(", ")) };
        return Err(Failure(1, format!("no map for {word}{hint}")));
    };
    if let Some(map) = res.maps.get(&unit) {
        return Ok(map);
    }
    Err(match res.entry(&unit).map(|e| &e.status) {
        Some(MapStatus::NotMappable(reason)) => Failure(1, format!("{unit} is NOT_MAPPABLE: {reason}")),
        _ => Failure(1, format!("no map for {word}: frequency below min_freq")),
    })
}

fn parse_axes(axes: &str) -> std::result::Result<(usize, usize), Failure> {
    let bad = || Failure(2, format!("--axes expects two integers such as 1,2, got {axes:?}"));
    let (a, b) = axes.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn cmd_map(
    resource: &Path,
    word: &str,
    pos: Option<PosTag>,
    axes: &str,
    svg: Option<&Path>,
    tsv: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let (k1, k2) = parse_axes(axes)?;
    let res = atlas::load_resource(resource)?;
    let map = find_map(&res, word, pos)?;
    let proj = map.geometry.project(k1, k2).map_err(|e| Failure(2, e.to_string()))?;
    let table = coordinates_tsv(map, &proj);
    if let Some(path) = svg {
        fs::write(path, map_svg(map, &proj)).map_err(|e| Error::io(path, e))?;
    }
    match tsv {
        Some(path) => fs::write(path, &table).map_err(|e| Error::io(path, e))?,
        None if svg.is_none() => {
            let _ = out.write_all(table.as_bytes());
        }
        None => {}
    }
    Ok(())
}

fn cmd_contexts(resource: &Path, word: &str, pos: Option<PosTag>, clique: usize, out: &mut dyn Write) -> CmdResult {
    let res = atlas::load_resource(resource)?;
    let map = find_map(&res, word, pos)?;
    for hit in atlas::lookup_contexts(&res, &map.headword, clique)? {
        let _ = writeln!(out, "{}\t{}\t{}", hit.ctx_id, hit.doc_id, hit.text);
    }
    Ok(())
}

fn cmd_compare(a: &Path, b: &Path, word: &str, pos: Option<PosTag>, out: &mut dyn Write) -> CmdResult {
    let ra = atlas::load_resource(a)?;
    let rb = atlas::load_resource(b)?;
    let unit: LexicalUnit = ra
        .resolve(word, pos)
        .or_else(|| rb.resolve(word, pos))
        .ok_or_else(|| Failure(1, format!("no map for {word} in either resource")))?;
    let report = atlas::compare_resources(&ra, &rb, &unit);
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).map_err(Error::from)?);
    Ok(())
}

fn cmd_serve(resource: &Path, addr: SocketAddr, out: &mut dyn Write) -> CmdResult {
    let res = atlas::load_resource(resource)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::io(resource, e))?;
    runtime.block_on(serve(Api::new(res), addr, |local| {
        let _ = writeln!(out, "listening on http://{local}");
        let _ = out.flush();
    }))?;
    Ok(())
}
