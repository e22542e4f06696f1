//! Lexical units and the normalization policy.
//!
//! Nouns (and proper nouns) keep their textual form so that number
//! inflection stays visible (`trottoir` vs `trottoirs`); every other
//! category is reduced to its lemma. Function-word categories are dropped.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Document, Head, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PosTag {
    Noun,
    Propn,
    Verb,
    Adj,
    Adv,
    Det,
    Adp,
    Pron,
    Cconj,
    Sconj,
    Aux,
    Part,
    Intj,
    Num,
    Punct,
    X,
}

impl PosTag {
    pub const ALL: [PosTag; 16] = [
        PosTag::Noun,
        PosTag::Propn,
        PosTag::Verb,
        PosTag::Adj,
        PosTag::Adv,
        PosTag::Det,
        PosTag::Adp,
        PosTag::Pron,
        PosTag::Cconj,
        PosTag::Sconj,
        PosTag::Aux,
        PosTag::Part,
        PosTag::Intj,
        PosTag::Num,
        PosTag::Punct,
        PosTag::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::Noun => "NOUN",
            PosTag::Propn => "PROPN",
            PosTag::Verb => "VERB",
            PosTag::Adj => "ADJ",
            PosTag::Adv => "ADV",
            PosTag::Det => "DET",
            PosTag::Adp => "ADP",
            PosTag::Pron => "PRON",
            PosTag::Cconj => "CCONJ",
            PosTag::Sconj => "SCONJ",
            PosTag::Aux => "AUX",
            PosTag::Part => "PART",
            PosTag::Intj => "INTJ",
            PosTag::Num => "NUM",
            PosTag::Punct => "PUNCT",
            PosTag::X => "X",
        }
    }

    /// Parses a tag leniently: unknown tags become `X`.
    pub fn lenient(s: &str) -> PosTag {
        s.parse().unwrap_or(PosTag::X)
    }
}

impl FromStr for PosTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        PosTag::ALL
            .into_iter()
            .find(|t| t.as_str() == upper)
            .ok_or_else(|| Error::Config(format!("unknown POS tag `{s}`")))
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A normalized vocabulary item. `(key, pos)` is its identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LexicalUnit {
    pub key: Arc<str>,
    pub pos: PosTag,
}

impl LexicalUnit {
    pub fn new(key: impl AsRef<str>, pos: PosTag) -> Self {
        LexicalUnit {
            key: Arc::from(key.as_ref()),
            pos,
        }
    }
}

impl fmt::Display for LexicalUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.key, self.pos)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationPolicy {
    surface_pos: BTreeSet<PosTag>,
    stop_pos: BTreeSet<PosTag>,
}

impl Default for NormalizationPolicy {
    fn default() -> Self {
        use PosTag::*;
        NormalizationPolicy {
            surface_pos: [Noun, Propn].into_iter().collect(),
            stop_pos: [Det, Adp, Pron, Cconj, Sconj, Aux, Part, Intj, Punct]
                .into_iter()
                .collect(),
        }
    }
}

impl NormalizationPolicy {
    pub fn new(surface_pos: BTreeSet<PosTag>, stop_pos: BTreeSet<PosTag>) -> Result<Self> {
        if let Some(t) = surface_pos.intersection(&stop_pos).next() {
            return Err(Error::Config(format!(
                "{t} cannot be both a surface-form and a stop category"
            )));
        }
        Ok(NormalizationPolicy {
            surface_pos,
            stop_pos,
        })
    }

    pub fn surface_pos(&self) -> &BTreeSet<PosTag> {
        &self.surface_pos
    }

    pub fn stop_pos(&self) -> &BTreeSet<PosTag> {
        &self.stop_pos
    }

    pub fn is_stop(&self, pos: PosTag) -> bool {
        self.stop_pos.contains(&pos)
    }
}

/// Surface form → readings `(lemma, pos)`, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MorphoLexicon {
    entries: HashMap<String, Vec<(String, PosTag)>>,
}

impl MorphoLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, surface: impl Into<String>, lemma: impl Into<String>, pos: PosTag) {
        self.entries
            .entry(surface.into())
            .or_default()
            .push((lemma.into(), pos));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Case-insensitive lookup (lowercased surface first), falling back to
    /// the exact surface so capitalised entries still match.
    pub fn readings(&self, surface: &str) -> Option<&[(String, PosTag)]> {
        self.entries
            .get(&surface.to_lowercase())
            .or_else(|| self.entries.get(surface))
            .map(Vec::as_slice)
    }
}

/// Reads a `SURFACE LEMMA UPOS` TSV lexicon. Blank and `#` lines are skipped.
pub fn load_lexicon<R: BufRead>(reader: R, file: &str) -> Result<MorphoLexicon> {
    let mut lexicon = MorphoLexicon::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(file, lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 || cols.iter().any(|c| c.trim().is_empty()) {
            return Err(Error::parse(
                file,
                lineno,
                "expected SURFACE<TAB>LEMMA<TAB>UPOS",
            ));
        }
        lexicon.insert(cols[0], cols[1], PosTag::lenient(cols[2]));
    }
    Ok(lexicon)
}

/// Lemma and category of a token. Annotation wins, then the first lexicon
/// reading; otherwise the lowercased surface with `X` (`PUNCT` for
/// punctuation-only tokens).
pub fn analyze(token: &Token, lexicon: &MorphoLexicon) -> (String, PosTag) {
    if let Some(ann) = &token.annotation {
        return (ann.lemma.clone(), ann.pos);
    }
    if let Some((lemma, pos)) = lexicon.readings(&token.surface).and_then(|r| r.first()) {
        return (lemma.clone(), *pos);
    }
    let pos = if !token.surface.is_empty() && token.surface.chars().all(|c| !c.is_alphanumeric()) {
        PosTag::Punct
    } else {
        PosTag::X
    };
    (token.surface.to_lowercase(), pos)
}

/// Applies the policy. `None` means the token is dropped.
pub fn normalize(surface: &str, lemma: &str, pos: PosTag, policy: &NormalizationPolicy) -> Option<LexicalUnit> {
    if policy.is_stop(pos) {
        return None;
    }
    let base = if policy.surface_pos.contains(&pos) {
        surface
    } else {
        lemma
    };
    let key = if pos == PosTag::Propn {
        base.to_string()
    } else {
        base.to_lowercase()
    };
    if key.trim().is_empty() {
        return None;
    }
    Some(LexicalUnit::new(key, pos))
}

/// One sentence after normalization. `units` stays aligned with the
/// original token positions (`None` for dropped tokens) so that dependency
/// paths can still route through function words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedContext {
    pub ctx_id: u32,
    pub doc_id: Arc<str>,
    pub text: String,
    pub units: Vec<Option<LexicalUnit>>,
    pub heads: Vec<Option<Head>>,
}

impl NormalizedContext {
    pub fn surviving(&self) -> impl Iterator<Item = &LexicalUnit> {
        self.units.iter().flatten()
    }

    pub fn contains(&self, unit: &LexicalUnit) -> bool {
        self.surviving().any(|u| u == unit)
    }
}

/// The corpus as seen by relation extraction: documents of normalized
/// contexts, in `ctx_id` order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizedCorpus {
    pub documents: Vec<Vec<NormalizedContext>>,
}

impl NormalizedCorpus {
    pub fn contexts(&self) -> impl Iterator<Item = &NormalizedContext> {
        self.documents.iter().flatten()
    }

    pub fn n_contexts(&self) -> usize {
        self.documents.iter().map(Vec::len).sum()
    }

    pub fn is_annotated(&self) -> bool {
        self.contexts().all(|c| c.heads.iter().all(Option::is_some))
            && self.contexts().next().is_some()
    }
}

pub fn normalize_corpus(
    docs: &[Document],
    lexicon: &MorphoLexicon,
    policy: &NormalizationPolicy,
) -> NormalizedCorpus {
    let documents = docs
        .iter()
        .map(|doc| {
            let doc_id: Arc<str> = Arc::from(doc.doc_id.as_str());
            doc.sentences
                .iter()
                .map(|sentence| {
                    let units: Vec<Option<LexicalUnit>> = sentence
                        .tokens
                        .iter()
                        .map(|t| {
                            let (lemma, pos) = analyze(t, lexicon);
                            normalize(&t.surface, &lemma, pos, policy)
                        })
                        .collect();
                    debug_assert!(units.iter().flatten().all(|u| !policy.is_stop(u.pos)));
                    NormalizedContext {
                        ctx_id: sentence.ctx_id,
                        doc_id: doc_id.clone(),
                        text: doc.sentence_text(sentence).to_string(),
                        heads: sentence
                            .tokens
                            .iter()
                            .map(|t| t.annotation.as_ref().and_then(|a| a.head))
                            .collect(),
                        units,
                    }
                })
                .collect()
        })
        .collect();
    NormalizedCorpus { documents }
}
