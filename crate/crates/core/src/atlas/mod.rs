//! Whole-vocabulary builds, the persisted resource and its sense index.

mod cluster;
mod diachrony;
mod store;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use cluster::{cluster_map, Cluster};
pub use diachrony::{compare_resources, CliqueMatch, DiachronyReport};
pub use store::{load_resource, map_file_name, save_resource};

use crate::ca::{self, CaResult, Projection};
use crate::cliques::{self, Clique};
use crate::config::BuildConfig;
use crate::error::{Error, Result};
use crate::ingest::Document;
use crate::morpho::{self, LexicalUnit, MorphoLexicon, NormalizedCorpus};
use crate::relations::{self, ContexonymFilter, FrequencyTable, RelationInstance, RelationMode, SynonymSource};

pub const FORMAT_VERSION: u32 = 1;

/// Rounds to 12 significant digits, the precision of every persisted
/// coordinate. Negative zero becomes zero.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Map geometry as persisted: row-major coordinates at 12 significant
/// digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub singular_values: Vec<f64>,
    pub inertia_total: f64,
    pub inertia_share: Vec<f64>,
    pub row_coords: Vec<Vec<f64>>,
    pub col_coords: Vec<Vec<f64>>,
    pub row_masses: Vec<f64>,
    pub col_masses: Vec<f64>,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().map(round_sig12).collect()).collect()
}

fn round_all(v: &[f64]) -> Vec<f64> {
    v.iter().copied().map(round_sig12).collect()
}

impl From<&CaResult> for Geometry {
    fn from(res: &CaResult) -> Self {
        Geometry {
            singular_values: round_all(&res.singular_values),
            inertia_total: round_sig12(res.inertia_total),
            inertia_share: round_all(&res.inertia_share),
            row_coords: rows_of(&res.row_coords),
            col_coords: rows_of(&res.col_coords),
            row_masses: round_all(&res.row_masses),
            col_masses: round_all(&res.col_masses),
        }
    }
}

impl Geometry {
    pub fn n_axes(&self) -> usize {
        self.singular_values.len()
    }

    pub fn to_ca_result(&self) -> CaResult {
        let k = self.n_axes();
        let matrix = |rows: &[Vec<f64>]| DMatrix::from_fn(rows.len(), k, |i, j| rows[i][j]);
        CaResult {
            row_coords: matrix(&self.row_coords),
            col_coords: matrix(&self.col_coords),
            singular_values: self.singular_values.clone(),
            inertia_total: self.inertia_total,
            inertia_share: self.inertia_share.clone(),
            row_masses: self.row_masses.clone(),
            col_masses: self.col_masses.clone(),
        }
    }

    pub fn project(&self, k1: usize, k2: usize) -> Result<Projection> {
        ca::project(&self.to_ca_result(), k1, k2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticMap {
    pub headword: LexicalUnit,
    pub cliques: Vec<Clique>,
    /// Set when clique enumeration hit a cap.
    pub partial: bool,
    /// Clique id of each geometry row.
    pub rows: Vec<usize>,
    /// Contexonym of each geometry column.
    pub columns: Vec<LexicalUnit>,
    #[serde(flatten)]
    pub geometry: Geometry,
    pub clusters: Vec<Cluster>,
    /// Per clique (aligned with `cliques`): sorted contexts that support
    /// the clique and contain the headword.
    pub sense_contexts: Vec<Vec<u32>>,
}

impl SemanticMap {
    pub fn clique(&self, clique_id: usize) -> Option<&Clique> {
        self.cliques.iter().find(|c| c.clique_id == clique_id)
    }

    pub fn contexts_of(&self, clique_id: usize) -> Option<&[u32]> {
        self.cliques
            .iter()
            .position(|c| c.clique_id == clique_id)
            .map(|i| self.sense_contexts[i].as_slice())
    }

    pub fn row_of(&self, clique_id: usize) -> Option<usize> {
        self.rows.iter().position(|&r| r == clique_id)
    }

    /// Units appearing in at least one clique.
    pub fn contexonyms(&self) -> BTreeSet<LexicalUnit> {
        self.cliques.iter().flat_map(|c| c.members.iter().cloned()).collect()
    }
}

/// Relations and statistics for one build.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub corpus: NormalizedCorpus,
    pub instances: Vec<RelationInstance>,
    pub stats: FrequencyTable,
    pub fingerprint: String,
}

fn fingerprint(corpus: &NormalizedCorpus) -> String {
    let mut h = Sha256::new();
    for ctx in corpus.contexts() {
        h.update(ctx.doc_id.as_bytes());
        h.update([0]);
        h.update(ctx.text.as_bytes());
        h.update([0]);
    }
    hex::encode(h.finalize())
}

impl Prepared {
    /// Extracts relations from a normalized corpus according to the mode.
    pub fn from_corpus(corpus: NormalizedCorpus, cfg: &BuildConfig) -> Result<Self> {
        let instances = match cfg.mode {
            RelationMode::Window => relations::extract_window(&corpus, cfg.window_width)?,
            RelationMode::Sentence => relations::extract_sentence(&corpus),
            RelationMode::Syntactic => {
                if corpus.n_contexts() > 0 && !corpus.is_annotated() {
                    return Err(Error::Config("syntactic mode requires annotated input".into()));
                }
                relations::extract_syntactic(&corpus)?
            }
            RelationMode::Synonyms => {
                return Err(Error::Config("synonyms mode takes a synonym-pair file".into()))
            }
        };
        let stats = relations::corpus_stats(&instances, &corpus);
        Ok(Prepared {
            fingerprint: fingerprint(&corpus),
            corpus,
            instances,
            stats,
        })
    }

    pub fn from_documents(docs: &[Document], lexicon: &MorphoLexicon, cfg: &BuildConfig) -> Result<Self> {
        Self::from_corpus(morpho::normalize_corpus(docs, lexicon, &cfg.normalization), cfg)
    }

    pub fn from_synonyms(source: SynonymSource) -> Self {
        let stats = relations::corpus_stats(&source.instances, &source.corpus);
        Prepared {
            fingerprint: fingerprint(&source.corpus),
            corpus: source.corpus,
            instances: source.instances,
            stats,
        }
    }
}

/// Builds one headword's map: contexonyms, graph, maximal cliques,
/// contingency table, correspondence analysis, clusters.
///
/// Degenerate words come back as [`Error::NotMappable`] with the reason.
pub fn build_map(w: &LexicalUnit, stats: &FrequencyTable, cfg: &BuildConfig) -> Result<SemanticMap> {
    let filter = ContexonymFilter::new(stats, cfg.filter)?;
    build_map_with(w, stats, &filter, cfg)
}

fn build_map_with(
    w: &LexicalUnit,
    stats: &FrequencyTable,
    filter: &ContexonymFilter<'_>,
    cfg: &BuildConfig,
) -> Result<SemanticMap> {
    if stats.id(w).is_none() {
        return Err(Error::NotMappable(format!("{w} does not occur in the corpus")));
    }
    let ctxs = filter.contexonyms(w);
    if ctxs.len() < 2 {
        return Err(Error::NotMappable(format!("{} contexonym(s) after filtering", ctxs.len())));
    }
    let graph = cliques::build_graph(w, &ctxs, stats, cfg.edge_min)?;
    let set = cliques::maximal_cliques(&graph, cfg.caps);
    if set.cliques.len() < 2 {
        return Err(Error::NotMappable(format!(
            "{} clique(s) among {} contexonyms",
            set.cliques.len(),
            ctxs.len()
        )));
    }
    let table = ca::contingency(&set.cliques, cfg.weighting)?;
    let res = ca::correspondence_analysis(&table)?;
    let head_ctx = stats.unit_contexts(w);
    let sense_contexts = set
        .cliques
        .iter()
        .map(|c| {
            c.support_ctx
                .iter()
                .copied()
                .filter(|x| head_ctx.binary_search(x).is_ok())
                .collect()
        })
        .collect();
    let mut map = SemanticMap {
        headword: w.clone(),
        cliques: set.cliques,
        partial: set.partial,
        rows: table.rows,
        columns: table.cols,
        geometry: Geometry::from(&res),
        clusters: Vec::new(),
        sense_contexts,
    };
    map.clusters = cluster_map(&map, cfg.cluster_threshold);
    Ok(map)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum MapStatus {
    Mapped,
    NotMappable(String),
    BelowMinFreq,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabularyEntry {
    pub unit: LexicalUnit,
    pub freq: u64,
    pub status: MapStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub corpus_fingerprint: String,
    pub mode: RelationMode,
    pub config: BuildConfig,
    /// Seconds since the Unix epoch.
    pub built_at: u64,
    pub vocabulary_size: usize,
    pub mapped: usize,
    pub not_mappable: usize,
    pub n_contexts: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextEntry {
    pub doc_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextHit {
    pub ctx_id: u32,
    pub doc_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resource {
    pub manifest: Manifest,
    /// Sorted by unit.
    pub vocabulary: Vec<VocabularyEntry>,
    pub maps: BTreeMap<LexicalUnit, SemanticMap>,
    pub context_store: BTreeMap<u32, ContextEntry>,
}

impl Resource {
    pub fn entry(&self, unit: &LexicalUnit) -> Option<&VocabularyEntry> {
        self.vocabulary
            .binary_search_by(|e| e.unit.cmp(unit))
            .ok()
            .map(|i| &self.vocabulary[i])
    }

    /// Sense index entry for `(headword, clique)`.
    pub fn indexed_contexts(&self, w: &LexicalUnit, clique_id: usize) -> Option<&[u32]> {
        self.maps.get(w).and_then(|m| m.contexts_of(clique_id))
    }

    /// Resolves a bare key to a unit: the most frequent POS for that key,
    /// or the given one.
    pub fn resolve(&self, key: &str, pos: Option<crate::morpho::PosTag>) -> Option<LexicalUnit> {
        match pos {
            Some(p) => {
                let u = LexicalUnit::new(key, p);
                self.entry(&u).map(|e| e.unit.clone())
            }
            None => self
                .vocabulary
                .iter()
                .filter(|e| e.unit.key.as_ref() == key)
                .max_by(|a, b| a.freq.cmp(&b.freq).then(b.unit.cmp(&a.unit)))
                .map(|e| e.unit.clone()),
        }
    }

    /// Checks that every indexed context resolves and every map headword is
    /// in the vocabulary.
    pub fn check_closure(&self) -> Result<()> {
        for (w, map) in &self.maps {
            if self.entry(w).is_none() {
                return Err(Error::Resource(format!("map for {w} has no vocabulary entry")));
            }
            if map.sense_contexts.len() != map.cliques.len() {
                return Err(Error::Resource(format!("sense index of {w} misaligned")));
            }
            for ctx in map.sense_contexts.iter().flatten() {
                if !self.context_store.contains_key(ctx) {
                    return Err(Error::Resource(format!("context {ctx} indexed for {w} is missing")));
                }
            }
        }
        Ok(())
    }
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Maps every unit occurring at least `min_freq` times. Words are processed
/// in parallel after the statistics pass; progress is logged every 1000
/// words.
pub fn build_resource(input: &Prepared, cfg: &BuildConfig) -> Result<Resource> {
    cfg.validate()?;
    let stats = &input.stats;
    let filter = ContexonymFilter::new(stats, cfg.filter)?;
    let eligible: Vec<&LexicalUnit> = stats
        .vocabulary()
        .iter()
        .filter(|u| stats.unit_freq(u) >= cfg.min_freq)
        .collect();
    let done = AtomicUsize::new(0);
    let total = eligible.len();
    let outcomes: Vec<(LexicalUnit, Result<SemanticMap>)> = eligible
        .par_iter()
        .map(|&w| {
            let out = build_map_with(w, stats, &filter, cfg);
            let n = done.fetch_add(1, Ordering::Relaxed) + 1;
            if n.is_multiple_of(1000) {
                log::info!("mapped {n}/{total} words");
            }
            (w.clone(), out)
        })
        .collect();

    let mut maps = BTreeMap::new();
    let mut statuses: BTreeMap<LexicalUnit, MapStatus> = BTreeMap::new();
    for (w, out) in outcomes {
        match out {
            Ok(map) => {
                maps.insert(w.clone(), map);
                statuses.insert(w, MapStatus::Mapped);
            }
            Err(Error::NotMappable(reason)) => {
                statuses.insert(w, MapStatus::NotMappable(reason));
            }
            Err(e) => return Err(e),
        }
    }
    let vocabulary: Vec<VocabularyEntry> = stats
        .vocabulary()
        .iter()
        .map(|u| VocabularyEntry {
            unit: u.clone(),
            freq: stats.unit_freq(u),
            status: statuses.remove(u).unwrap_or(MapStatus::BelowMinFreq),
        })
        .collect();
    let context_store = input
        .corpus
        .contexts()
        .map(|c| {
            (
                c.ctx_id,
                ContextEntry {
                    doc_id: c.doc_id.to_string(),
                    text: c.text.clone(),
                },
            )
        })
        .collect();
    let not_mappable = vocabulary
        .iter()
        .filter(|e| matches!(e.status, MapStatus::NotMappable(_)))
        .count();
    Ok(Resource {
        manifest: Manifest {
            version: FORMAT_VERSION,
            corpus_fingerprint: input.fingerprint.clone(),
            mode: cfg.mode,
            config: cfg.clone(),
            built_at: now_unix(),
            vocabulary_size: vocabulary.len(),
            mapped: maps.len(),
            not_mappable,
            n_contexts: stats.n_contexts(),
        },
        vocabulary,
        maps,
        context_store,
    })
}

/// Contexts attesting one sense of `w`, sorted by context id.
pub fn lookup_contexts(res: &Resource, w: &LexicalUnit, clique_id: usize) -> Result<Vec<ContextHit>> {
    let map = res
        .maps
        .get(w)
        .ok_or_else(|| Error::NotFound(format!("no map for {w}")))?;
    let ctxs = map
        .contexts_of(clique_id)
        .ok_or_else(|| Error::NotFound(format!("{w} has no clique {clique_id}")))?;
    ctxs.iter()
        .map(|&ctx_id| {
            let entry = res
                .context_store
                .get(&ctx_id)
                .ok_or_else(|| Error::Resource(format!("context {ctx_id} missing from store")))?;
            Ok(ContextHit {
                ctx_id,
                doc_id: entry.doc_id.clone(),
                text: entry.text.clone(),
            })
        })
        .collect()
}
