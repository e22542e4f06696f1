//! Relation extraction, corpus statistics and contexonym filtering.
//!
//! Four sources of links between lexical units are supported: a sliding
//! window of surviving units, the sentence, dependency links (primary and
//! secondary) and synonym-pair files. All of them feed one
//! [`FrequencyTable`], from which per-headword contexonym sets are drawn.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::BufRead;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Head;
use crate::morpho::{LexicalUnit, NormalizedContext, NormalizedCorpus, PosTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RelationKind {
    Window,
    Sentence,
    SynPrimary,
    SynSecondary,
    Synonym,
}

/// How relations are drawn from the input for a whole build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationMode {
    Window,
    Sentence,
    Syntactic,
    Synonyms,
}

impl RelationMode {
    pub fn is_proximity(self) -> bool {
        matches!(self, RelationMode::Window | RelationMode::Sentence)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RelationMode::Window => "window",
            RelationMode::Sentence => "sentence",
            RelationMode::Syntactic => "syntactic",
            RelationMode::Synonyms => "synonyms",
        }
    }
}

impl FromStr for RelationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "window" => Ok(RelationMode::Window),
            "sentence" => Ok(RelationMode::Sentence),
            "syntactic" => Ok(RelationMode::Syntactic),
            "synonyms" | "synonym" => Ok(RelationMode::Synonyms),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// One attested link. `a < b` always holds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationInstance {
    pub ctx_id: u32,
    pub a: LexicalUnit,
    pub b: LexicalUnit,
    pub kind: RelationKind,
}

impl RelationInstance {
    /// Canonicalizes the pair; `None` for a self-pair.
    pub fn new(x: LexicalUnit, y: LexicalUnit, kind: RelationKind, ctx_id: u32) -> Option<Self> {
        if x == y {
            return None;
        }
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        Some(RelationInstance { ctx_id, a, b, kind })
    }

    pub fn pair(&self) -> (&LexicalUnit, &LexicalUnit) {
        (&self.a, &self.b)
    }
}

fn sort_instances(instances: &mut [RelationInstance]) {
    instances.sort_by(|x, y| {
        (x.ctx_id, &x.a, &x.b, x.kind).cmp(&(y.ctx_id, &y.a, &y.b, y.kind))
    });
}

/// Pairs each surviving unit with every distinct unit among the next
/// `width - 1` surviving units of the same document. Distance is counted in
/// surviving units, not raw tokens; `ctx_id` is the left member's sentence.
pub fn extract_window(corpus: &NormalizedCorpus, width: usize) -> Result<Vec<RelationInstance>> {
    if width < 2 {
        return Err(Error::Config(format!("window width must be at least 2, got {width}")));
    }
    let mut out = Vec::new();
    for doc in &corpus.documents {
        let stream: Vec<(&LexicalUnit, u32)> = doc
            .iter()
            .flat_map(|c| c.surviving().map(move |u| (u, c.ctx_id)))
            .collect();
        for (p, &(left, ctx_id)) in stream.iter().enumerate() {
            let end = (p + width).min(stream.len());
            let mut seen: HashSet<&LexicalUnit> = HashSet::new();
            for &(right, _) in &stream[p + 1..end] {
                if right != left && seen.insert(right) {
                    out.extend(RelationInstance::new(
                        left.clone(),
                        right.clone(),
                        RelationKind::Window,
                        ctx_id,
                    ));
                }
            }
        }
    }
    sort_instances(&mut out);
    Ok(out)
}

/// One instance per unordered pair of distinct units in each sentence.
pub fn extract_sentence(corpus: &NormalizedCorpus) -> Vec<RelationInstance> {
    let mut out = Vec::new();
    for ctx in corpus.contexts() {
        let distinct: BTreeSet<&LexicalUnit> = ctx.surviving().collect();
        let distinct: Vec<_> = distinct.into_iter().collect();
        for (i, a) in distinct.iter().enumerate() {
            for b in &distinct[i + 1..] {
                out.push(RelationInstance {
                    ctx_id: ctx.ctx_id,
                    a: (*a).clone(),
                    b: (*b).clone(),
                    kind: RelationKind::Sentence,
                });
            }
        }
    }
    sort_instances(&mut out);
    out
}

/// Dependency relations.
///
/// Every edge whose endpoints both survive normalization gives a primary
/// link. Two surviving tokens that share a neighbour in the (undirected)
/// dependency tree are at distance exactly two and give a secondary link,
/// unless the same pair is already linked by a primary relation in that
/// sentence. The intermediate token may be any token, function words
/// included.
pub fn extract_syntactic(corpus: &NormalizedCorpus) -> Result<Vec<RelationInstance>> {
    let mut out = Vec::new();
    for ctx in corpus.contexts() {
        extract_sentence_syntax(ctx, &mut out)?;
    }
    sort_instances(&mut out);
    Ok(out)
}

fn extract_sentence_syntax(ctx: &NormalizedContext, out: &mut Vec<RelationInstance>) -> Result<()> {
    let n = ctx.units.len();
    let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (child, head) in ctx.heads.iter().enumerate() {
        match head {
            None => {
                return Err(Error::MissingHead {
                    ctx_id: ctx.ctx_id,
                    position: child,
                })
            }
            Some(Head::Root) => {}
            Some(Head::Token(h)) => {
                if *h != child {
                    neighbours[child].push(*h);
                    neighbours[*h].push(child);
                }
            }
        }
    }

    let mut primary: BTreeSet<(LexicalUnit, LexicalUnit)> = BTreeSet::new();
    for (child, head) in ctx.heads.iter().enumerate() {
        if let Some(Head::Token(h)) = head {
            if let (Some(u), Some(v)) = (&ctx.units[child], &ctx.units[*h]) {
                if let Some(r) = RelationInstance::new(u.clone(), v.clone(), RelationKind::SynPrimary, ctx.ctx_id) {
                    primary.insert((r.a, r.b));
                }
            }
        }
    }

    let mut secondary: BTreeSet<(LexicalUnit, LexicalUnit)> = BTreeSet::new();
    for around in &neighbours {
        for (i, &x) in around.iter().enumerate() {
            for &y in &around[i + 1..] {
                if x == y {
                    continue;
                }
                if let (Some(u), Some(v)) = (&ctx.units[x], &ctx.units[y]) {
                    if let Some(r) =
                        RelationInstance::new(u.clone(), v.clone(), RelationKind::SynSecondary, ctx.ctx_id)
                    {
                        let key = (r.a, r.b);
                        if !primary.contains(&key) {
                            secondary.insert(key);
                        }
                    }
                }
            }
        }
    }

    out.extend(primary.into_iter().map(|(a, b)| RelationInstance {
        ctx_id: ctx.ctx_id,
        a,
        b,
        kind: RelationKind::SynPrimary,
    }));
    out.extend(secondary.into_iter().map(|(a, b)| RelationInstance {
        ctx_id: ctx.ctx_id,
        a,
        b,
        kind: RelationKind::SynSecondary,
    }));
    Ok(())
}

/// Synonym pairs plus a pseudo-corpus with one context per accepted line,
/// so that statistics and the context store work as for a text corpus.
#[derive(Debug, Clone, Default)]
pub struct SynonymSource {
    pub instances: Vec<RelationInstance>,
    pub corpus: NormalizedCorpus,
}

/// Reads `WORD1 WORD2 SOURCE [POS [POS2]]` lines. A single POS column
/// applies to both words; without one, both are `X`. `ctx_id` is the
/// zero-based line index. Self-pairs are skipped with a warning.
pub fn load_synonyms<R: BufRead>(reader: R, file: &str) -> Result<SynonymSource> {
    let mut instances = Vec::new();
    let mut contexts = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(file, lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if !(3..=5).contains(&cols.len()) || cols[..2].iter().any(|c| c.trim().is_empty()) {
            return Err(Error::parse(
                file,
                lineno,
                "expected WORD1<TAB>WORD2<TAB>SOURCE[<TAB>POS[<TAB>POS2]]",
            ));
        }
        let pos_a = cols.get(3).map_or(PosTag::X, |p| PosTag::lenient(p));
        let pos_b = cols.get(4).map_or(pos_a, |p| PosTag::lenient(p));
        let a = LexicalUnit::new(cols[0].trim(), pos_a);
        let b = LexicalUnit::new(cols[1].trim(), pos_b);
        let ctx_id = idx as u32;
        match RelationInstance::new(a.clone(), b.clone(), RelationKind::Synonym, ctx_id) {
            Some(r) => {
                instances.push(r);
                contexts.push(NormalizedContext {
                    ctx_id,
                    doc_id: Arc::from(cols[2].trim()),
                    text: format!("{} ~ {}", cols[0].trim(), cols[1].trim()),
                    units: vec![Some(a), Some(b)],
                    heads: vec![None, None],
                });
            }
            None => log::warn!("{file}:{lineno}: skipping self-pair `{}`", cols[0]),
        }
    }
    sort_instances(&mut instances);
    Ok(SynonymSource {
        instances,
        corpus: NormalizedCorpus {
            documents: vec![contexts],
        },
    })
}

pub fn load_synonym_pairs<R: BufRead>(reader: R, file: &str) -> Result<Vec<RelationInstance>> {
    load_synonyms(reader, file).map(|s| s.instances)
}

/// Unit and pair statistics over interned unit ids.
///
/// Ids follow the `LexicalUnit` order, so the canonical pair `(lo, hi)` of
/// ids matches the canonical pair of units.
#[derive(Debug, Clone, Default)]
pub struct FrequencyTable {
    units: Vec<LexicalUnit>,
    index: HashMap<LexicalUnit, u32>,
    unit_freq: Vec<u64>,
    unit_contexts: Vec<Vec<u32>>,
    pairs: HashMap<(u32, u32), Vec<u32>>,
    partners: Vec<Vec<(u32, u32)>>,
    n_contexts: usize,
}

/// Counts unit occurrences in the normalized corpus and distinct
/// `(pair, ctx_id)` attestations among the instances.
pub fn corpus_stats(instances: &[RelationInstance], corpus: &NormalizedCorpus) -> FrequencyTable {
    let mut vocab: BTreeSet<&LexicalUnit> = corpus.contexts().flat_map(|c| c.surviving()).collect();
    for r in instances {
        vocab.insert(&r.a);
        vocab.insert(&r.b);
    }
    let units: Vec<LexicalUnit> = vocab.into_iter().cloned().collect();
    let index: HashMap<LexicalUnit, u32> = units
        .iter()
        .enumerate()
        .map(|(i, u)| (u.clone(), i as u32))
        .collect();

    let mut unit_freq = vec![0u64; units.len()];
    let mut unit_contexts: Vec<Vec<u32>> = vec![Vec::new(); units.len()];
    for ctx in corpus.contexts() {
        for u in ctx.surviving() {
            let id = index[u] as usize;
            unit_freq[id] += 1;
            if unit_contexts[id].last() != Some(&ctx.ctx_id) {
                unit_contexts[id].push(ctx.ctx_id);
            }
        }
    }
    for list in &mut unit_contexts {
        list.sort_unstable();
        list.dedup();
    }

    let mut pairs: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for r in instances {
        let key = (index[&r.a], index[&r.b]);
        pairs.entry(key).or_default().push(r.ctx_id);
    }
    let mut partners: Vec<Vec<(u32, u32)>> = vec![Vec::new(); units.len()];
    for (&(a, b), ctxs) in pairs.iter_mut() {
        ctxs.sort_unstable();
        ctxs.dedup();
        let count = ctxs.len() as u32;
        partners[a as usize].push((b, count));
        partners[b as usize].push((a, count));
    }
    for list in &mut partners {
        list.sort_unstable();
    }

    FrequencyTable {
        units,
        index,
        unit_freq,
        unit_contexts,
        pairs,
        partners,
        n_contexts: corpus.n_contexts(),
    }
}

impl FrequencyTable {
    pub fn n_contexts(&self) -> usize {
        self.n_contexts
    }

    /// All units, sorted.
    pub fn vocabulary(&self) -> &[LexicalUnit] {
        &self.units
    }

    pub fn id(&self, unit: &LexicalUnit) -> Option<u32> {
        self.index.get(unit).copied()
    }

    pub fn unit(&self, id: u32) -> &LexicalUnit {
        &self.units[id as usize]
    }

    pub fn unit_freq(&self, unit: &LexicalUnit) -> u64 {
        self.id(unit).map_or(0, |i| self.unit_freq[i as usize])
    }

    /// Sorted contexts in which the unit occurs.
    pub fn unit_contexts(&self, unit: &LexicalUnit) -> &[u32] {
        self.id(unit).map_or(&[], |i| &self.unit_contexts[i as usize])
    }

    pub fn pair_contexts_by_id(&self, x: u32, y: u32) -> &[u32] {
        let key = if x < y { (x, y) } else { (y, x) };
        self.pairs.get(&key).map_or(&[], Vec::as_slice)
    }

    /// Sorted distinct contexts attesting the pair, in either argument order.
    pub fn pair_contexts(&self, x: &LexicalUnit, y: &LexicalUnit) -> &[u32] {
        match (self.id(x), self.id(y)) {
            (Some(a), Some(b)) => self.pair_contexts_by_id(a, b),
            _ => &[],
        }
    }

    pub fn pair_freq(&self, x: &LexicalUnit, y: &LexicalUnit) -> usize {
        self.pair_contexts(x, y).len()
    }

    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// `(partner id, pair count)`, sorted by partner id.
    pub fn partners_by_id(&self, id: u32) -> &[(u32, u32)] {
        &self.partners[id as usize]
    }

    pub fn partners(&self, unit: &LexicalUnit) -> Vec<(LexicalUnit, usize)> {
        self.id(unit).map_or_else(Vec::new, |i| {
            self.partners[i as usize]
                .iter()
                .map(|&(p, c)| (self.unit(p).clone(), c as usize))
                .collect()
        })
    }

    /// Ids of the `k` most frequent units, ties broken by unit order.
    pub fn most_frequent(&self, k: usize) -> Vec<u32> {
        let mut ids: Vec<u32> = (0..self.units.len() as u32).collect();
        ids.sort_by(|&a, &b| self.unit_freq[b as usize].cmp(&self.unit_freq[a as usize]).then(a.cmp(&b)));
        ids.truncate(k);
        ids
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub stop_top_k: usize,
    pub context_quantile: f64,
    pub min_pair_count: u32,
    pub reciprocal_filter: bool,
}

impl FilterConfig {
    pub fn for_mode(mode: RelationMode) -> Self {
        let proximity = mode.is_proximity();
        FilterConfig {
            stop_top_k: 500,
            context_quantile: 0.05,
            min_pair_count: if proximity { 2 } else { 1 },
            reciprocal_filter: proximity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.context_quantile > 0.0 && self.context_quantile <= 1.0) {
            return Err(Error::Config(format!(
                "context quantile must lie in (0, 1], got {}",
                self.context_quantile
            )));
        }
        if self.min_pair_count < 1 {
            return Err(Error::Config("min pair count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Contexonym selection with the stop list precomputed, for repeated
/// queries against one table.
pub struct ContexonymFilter<'a> {
    stats: &'a FrequencyTable,
    cfg: FilterConfig,
    stopped: Vec<bool>,
}

impl<'a> ContexonymFilter<'a> {
    pub fn new(stats: &'a FrequencyTable, cfg: FilterConfig) -> Result<Self> {
        cfg.validate()?;
        let mut stopped = vec![false; stats.units.len()];
        for id in stats.most_frequent(cfg.stop_top_k) {
            stopped[id as usize] = true;
        }
        Ok(ContexonymFilter { stats, cfg, stopped })
    }

    pub fn config(&self) -> &FilterConfig {
        &self.cfg
    }

    pub fn is_stopped(&self, unit: &LexicalUnit) -> bool {
        self.stats.id(unit).is_some_and(|i| self.stopped[i as usize])
    }

    /// Partners of `id` surviving the stop list (except `keep`, always
    /// admitted) and the minimum count.
    fn candidates(&self, id: u32, keep: Option<u32>) -> Vec<(u32, u32)> {
        self.stats
            .partners_by_id(id)
            .iter()
            .copied()
            .filter(|&(p, c)| {
                (Some(p) == keep || !self.stopped[p as usize]) && c >= self.cfg.min_pair_count
            })
            .collect()
    }

    /// Smallest count inside the top quantile of a count distribution; the
    /// top `max(1, ceil(q * n))` counts are inside, ties at the boundary too.
    fn quantile_threshold(&self, counts: impl Iterator<Item = u32>) -> Option<u32> {
        let mut counts: Vec<u32> = counts.collect();
        if counts.is_empty() {
            return None;
        }
        counts.sort_unstable_by(|a, b| b.cmp(a));
        let k = ((self.cfg.context_quantile * counts.len() as f64) - 1e-9).ceil().max(1.0) as usize;
        Some(counts[k.min(counts.len()) - 1])
    }

    pub fn contexonym_ids(&self, w: u32) -> Vec<u32> {
        let cands = self.candidates(w, None);
        let Some(threshold) = self.quantile_threshold(cands.iter().map(|&(_, c)| c)) else {
            return Vec::new();
        };
        cands
            .into_iter()
            .filter(|&(_, c)| c >= threshold)
            .filter(|&(u, c)| {
                if !self.cfg.reciprocal_filter {
                    return true;
                }
                let theirs = self.candidates(u, Some(w));
                self.quantile_threshold(theirs.iter().map(|&(_, c)| c))
                    .is_some_and(|t| c >= t)
            })
            .map(|(u, _)| u)
            .collect()
    }

    pub fn contexonyms(&self, w: &LexicalUnit) -> BTreeSet<LexicalUnit> {
        match self.stats.id(w) {
            None => BTreeSet::new(),
            Some(id) => self
                .contexonym_ids(id)
                .into_iter()
                .map(|u| self.stats.unit(u).clone())
                .collect(),
        }
    }
}

/// Contexonyms of `w`: its partners minus the globally most frequent
/// units, above the minimum count, inside the top quantile of `w`'s own
/// pair-count distribution (at least one kept) and, with the reciprocal
/// filter, with `w` inside the top quantile of each partner's distribution.
pub fn contexonyms(w: &LexicalUnit, stats: &FrequencyTable, cfg: &FilterConfig) -> Result<BTreeSet<LexicalUnit>> {
    Ok(ContexonymFilter::new(stats, *cfg)?.contexonyms(w))
}
