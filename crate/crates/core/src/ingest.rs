//! Corpus reading: plain text or pre-annotated dependency files.
//!
//! Every sentence gets a corpus-wide context id (`ctx_id`). Ids are dense,
//! start at 0 and follow document order, with documents ordered
//! lexicographically by path.

use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morpho::PosTag;

/// Byte offsets `(start, end)` into a document's text.
pub type Span = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Head {
    Root,
    /// 0-based position of the governor within the same sentence.
    Token(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub lemma: String,
    pub pos: PosTag,
    pub head: Option<Head>,
    pub deprel: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub position: usize,
    pub span: Span,
    pub annotation: Option<Annotation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub ctx_id: u32,
    pub tokens: Vec<Token>,
    pub char_span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub source_path: String,
    /// Source text for plain input. For annotated input, one line per
    /// sentence with forms joined by single spaces.
    pub text: String,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn sentence_text(&self, sentence: &Sentence) -> &str {
        &self.text[sentence.char_span.0..sentence.char_span.1]
    }

    pub fn token_text(&self, token: &Token) -> &str {
        &self.text[token.span.0..token.span.1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Plain,
    Annotated,
}

impl CorpusFormat {
    pub fn extension(self) -> &'static str {
        match self {
            CorpusFormat::Plain => "txt",
            CorpusFormat::Annotated => "tsv",
        }
    }
}

/// Lists corpus files of the given format, sorted by path.
pub fn corpus_files(root: &Path, format: CorpusFormat) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let path = entry.path();
        if path.is_file() && path.extension().and_then(|e| e.to_str()) == Some(format.extension()) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Reads every `*.txt` (plain) or `*.tsv` (annotated) file directly under
/// `root`. Files are parsed in parallel; context ids are assigned afterwards
/// in a single sequential pass.
pub fn load_corpus(root: &Path, format: CorpusFormat) -> Result<Vec<Document>> {
    if !root.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "corpus directory not found"),
        ));
    }
    let files = corpus_files(root, format)?;
    let mut docs = files
        .par_iter()
        .map(|path| load_document(path, format))
        .collect::<Result<Vec<_>>>()?;
    assign_context_ids(&mut docs);
    Ok(docs)
}

fn load_document(path: &Path, format: CorpusFormat) -> Result<Document> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|_| Error::Encoding {
        path: path.to_path_buf(),
    })?;
    let doc_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let source_path = path.display().to_string();
    match format {
        CorpusFormat::Plain => Ok(plain_document(doc_id, source_path, text)),
        CorpusFormat::Annotated => {
            let sentences = parse_annotated(text.as_bytes(), &source_path)?;
            Ok(annotated_document(doc_id, source_path, sentences))
        }
    }
}

/// Segments raw text into a document. Context ids are left at zero; see
/// [`assign_context_ids`].
pub fn plain_document(doc_id: String, source_path: String, text: String) -> Document {
    let sentences = segment_plain(&text);
    Document {
        doc_id,
        source_path,
        text,
        sentences,
    }
}

/// Builds a document whose text is reconstructed from annotated forms,
/// fixing up token and sentence spans to point into it.
pub fn annotated_document(doc_id: String, source_path: String, mut sentences: Vec<Sentence>) -> Document {
    let mut text = String::new();
    for sentence in &mut sentences {
        if !text.is_empty() {
            text.push('\n');
        }
        let start = text.len();
        for (i, token) in sentence.tokens.iter_mut().enumerate() {
            if i > 0 {
                text.push(' ');
            }
            let s = text.len();
            text.push_str(&token.surface);
            token.span = (s, text.len());
        }
        sentence.char_span = (start, text.len());
    }
    Document {
        doc_id,
        source_path,
        text,
        sentences,
    }
}

pub fn assign_context_ids(docs: &mut [Document]) {
    let mut next = 0u32;
    for doc in docs {
        for sentence in &mut doc.sentences {
            sentence.ctx_id = next;
            next += 1;
        }
    }
}

fn is_terminal(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| matches!(c, '.' | '!' | '?'))
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '«' | '»' | '…' | '–' | '—' | '‘' | '’' | '“' | '”' | '„' | '¿' | '¡' | '·'
        )
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '’'
}

/// Splits text into tokens: whitespace separates, punctuation characters are
/// detached one per token. Hyphens inside a word are kept; an apostrophe
/// after letters ends the token (French elision, `l'arc` → `l'` `arc`).
fn tokenize(text: &str) -> Vec<Span> {
    let mut spans = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let end_of = |i: usize| chars.get(i + 1).map_or(text.len(), |&(b, _)| b);
    let mut word_start: Option<usize> = None;
    for (i, &(byte, c)) in chars.iter().enumerate() {
        let prev_alnum = i > 0 && chars[i - 1].1.is_alphanumeric();
        let next_alnum = chars.get(i + 1).is_some_and(|&(_, n)| n.is_alphanumeric());
        if c.is_whitespace() {
            if let Some(s) = word_start.take() {
                spans.push((s, byte));
            }
        } else if is_apostrophe(c) && prev_alnum && word_start.is_some() {
            let s = word_start.take().unwrap();
            spans.push((s, end_of(i)));
        } else if c == '-' && prev_alnum && next_alnum && word_start.is_some() {
            // internal hyphen, keep going
        } else if is_punct(c) {
            if let Some(s) = word_start.take() {
                spans.push((s, byte));
            }
            spans.push((byte, end_of(i)));
        } else if word_start.is_none() {
            word_start = Some(byte);
        }
    }
    if let Some(s) = word_start {
        spans.push((s, text.len()));
    }
    spans
}

/// Segments raw text into sentences of whitespace/punctuation tokens.
///
/// A sentence ends after a run of `.`, `!` or `?` that is followed by
/// whitespace and a capitalised token, or by the end of the text. A period
/// directly after a single capital letter (`M. Dupont`) never ends a
/// sentence. Returned sentences carry `ctx_id` 0; ids are assigned at the
/// corpus level.
pub fn segment_plain(text: &str) -> Vec<Sentence> {
    let spans = tokenize(text);
    let slice = |sp: Span| &text[sp.0..sp.1];
    let mut sentences = Vec::new();
    let mut current: Vec<Span> = Vec::new();
    for (i, &span) in spans.iter().enumerate() {
        current.push(span);
        if !is_terminal(slice(span)) {
            continue;
        }
        let next = spans.get(i + 1).copied();
        if next.is_some_and(|n| is_terminal(slice(n)) && n.0 == span.1) {
            continue;
        }
        let boundary = match next {
            None => true,
            Some(n) => {
                let gap = &text[span.1..n.0];
                let capital = slice(n).chars().next().is_some_and(char::is_uppercase);
                !gap.is_empty() && gap.chars().all(char::is_whitespace) && capital
            }
        };
        let abbreviation = slice(span) == "."
            && i > 0
            && spans[i - 1].1 == span.0
            && {
                let mut cs = slice(spans[i - 1]).chars();
                matches!((cs.next(), cs.next()), (Some(c), None) if c.is_uppercase())
            };
        if boundary && !abbreviation {
            sentences.push(build_sentence(text, std::mem::take(&mut current)));
        }
    }
    if !current.is_empty() {
        sentences.push(build_sentence(text, current));
    }
    sentences
}

fn build_sentence(text: &str, spans: Vec<Span>) -> Sentence {
    let char_span = (spans[0].0, spans[spans.len() - 1].1);
    let tokens = spans
        .into_iter()
        .enumerate()
        .map(|(position, span)| Token {
            surface: text[span.0..span.1].to_string(),
            position,
            span,
            annotation: None,
        })
        .collect();
    Sentence {
        ctx_id: 0,
        tokens,
        char_span,
    }
}

struct RawRow {
    line: usize,
    form: String,
    lemma: String,
    pos: PosTag,
    head: Option<usize>,
    deprel: Option<String>,
}

/// Parses the six-column `ID FORM LEMMA UPOS HEAD DEPREL` format.
///
/// Blank lines separate sentences and `#` lines are skipped. `HEAD` is a
/// 1-based token id, `0` for the root, or `_` when absent. `file` is used
/// only in error messages.
pub fn parse_annotated<R: BufRead>(reader: R, file: &str) -> Result<Vec<Sentence>> {
    let mut sentences = Vec::new();
    let mut rows: Vec<RawRow> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(file, lineno, e.to_string()))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            if !rows.is_empty() {
                sentences.push(finish_annotated(std::mem::take(&mut rows), file)?);
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 {
            return Err(Error::parse(
                file,
                lineno,
                format!("expected 6 tab-separated columns, found {}", cols.len()),
            ));
        }
        let id: usize = cols[0]
            .parse()
            .map_err(|_| Error::parse(file, lineno, format!("token id `{}` is not an integer", cols[0])))?;
        if id != rows.len() + 1 {
            return Err(Error::parse(
                file,
                lineno,
                format!("token id {id} out of sequence, expected {}", rows.len() + 1),
            ));
        }
        let head = match cols[4] {
            "_" => None,
            h => Some(
                h.parse::<usize>()
                    .map_err(|_| Error::parse(file, lineno, format!("head `{h}` is not an integer")))?,
            ),
        };
        let form = cols[1].to_string();
        let lemma = match cols[2] {
            "_" | "" => form.to_lowercase(),
            l => l.to_string(),
        };
        rows.push(RawRow {
            line: lineno,
            form,
            lemma,
            pos: cols[3].parse().unwrap_or(PosTag::X),
            head,
            deprel: match cols[5] {
                "_" | "" => None,
                d => Some(d.to_string()),
            },
        });
    }
    if !rows.is_empty() {
        sentences.push(finish_annotated(rows, file)?);
    }
    Ok(sentences)
}

fn finish_annotated(rows: Vec<RawRow>, file: &str) -> Result<Sentence> {
    let n = rows.len();
    let mut tokens = Vec::with_capacity(n);
    for (position, row) in rows.into_iter().enumerate() {
        let head = match row.head {
            None => None,
            Some(0) => Some(Head::Root),
            Some(h) if h <= n => Some(Head::Token(h - 1)),
            Some(h) => {
                return Err(Error::parse(
                    file,
                    row.line,
                    format!("head {h} out of range for a {n}-token sentence"),
                ))
            }
        };
        tokens.push(Token {
            surface: row.form,
            position,
            span: (0, 0),
            annotation: Some(Annotation {
                lemma: row.lemma,
                pos: row.pos,
                head,
                deprel: row.deprel,
            }),
        });
    }
    Ok(Sentence {
        ctx_id: 0,
        tokens,
        char_span: (0, 0),
    })
}
