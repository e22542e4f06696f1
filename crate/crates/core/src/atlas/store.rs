//! On-disk layout of a resource:
//!
//! ```text
//! manifest.json
//! vocabulary.tsv     key  POS  freq  status  reason
//! contexts.tsv       ctx_id  doc_id  text
//! maps/<key>.<POS>.json
//! ```
//!
//! Text fields in the TSV files escape tab, newline, carriage return and
//! backslash. Map file names percent-encode the key.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

use super::{ContextEntry, MapStatus, Resource, SemanticMap, VocabularyEntry, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::morpho::{LexicalUnit, PosTag};

const KEY_SET: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_');

/// `<percent-encoded key>.<POS>.json`
pub fn map_file_name(unit: &LexicalUnit) -> String {
    format!("{}.{}.json", utf8_percent_encode(&unit.key, KEY_SET), unit.pos.as_str())
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            '\\' => out.push('\\'),
            't' => out.push('\t'),
            'n' => out.push('\n'),
            'r' => out.push('\r'),
            _ => return None,
        }
    }
    Some(out)
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

/// Writes the resource under `dir`, replacing any previous `maps/` content.
pub fn save_resource(res: &Resource, dir: &Path) -> Result<()> {
    let maps_dir = dir.join("maps");
    if maps_dir.exists() {
        fs::remove_dir_all(&maps_dir).map_err(|e| Error::io(&maps_dir, e))?;
    }
    fs::create_dir_all(&maps_dir).map_err(|e| Error::io(&maps_dir, e))?;

    write_json(&dir.join("manifest.json"), &res.manifest)?;

    let path = dir.join("vocabulary.tsv");
    let mut w = create(&path)?;
    let io = |e| Error::io(&path, e);
    for e in &res.vocabulary {
        let (status, reason) = match &e.status {
            MapStatus::Mapped => ("mapped", String::new()),
            MapStatus::NotMappable(r) => ("not_mappable", escape(r)),
            MapStatus::BelowMinFreq => ("below_min_freq", String::new()),
        };
        writeln!(w, "{}\t{}\t{}\t{}\t{}", escape(&e.unit.key), e.unit.pos.as_str(), e.freq, status, reason).map_err(io)?;
    }
    w.flush().map_err(io)?;

    let path = dir.join("contexts.tsv");
    let mut w = create(&path)?;
    let io = |e| Error::io(&path, e);
    for (id, c) in &res.context_store {
        writeln!(w, "{id}\t{}\t{}", escape(&c.doc_id), escape(&c.text)).map_err(io)?;
    }
    w.flush().map_err(io)?;

    for (unit, map) in &res.maps {
        write_json(&maps_dir.join(map_file_name(unit)), map)?;
    }
    Ok(())
}

fn tsv_lines(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let fields = line
            .split('\t')
            .map(|f| unescape(f).ok_or_else(|| Error::parse(&name, i + 1, "bad escape sequence")))
            .collect::<Result<Vec<_>>>()?;
        out.push((i + 1, fields));
    }
    Ok(out)
}

/// Reads a resource written by [`save_resource`] and checks that the maps,
/// vocabulary and context store agree.
pub fn load_resource(dir: &Path) -> Result<Resource> {
    let manifest: super::Manifest = read_json(&dir.join("manifest.json"))?;
    if manifest.version != FORMAT_VERSION {
        return Err(Error::Resource(format!(
            "format version {} is not supported (expected {FORMAT_VERSION})",
            manifest.version
        )));
    }

    let path = dir.join("vocabulary.tsv");
    let name = path.display().to_string();
    let mut vocabulary = Vec::new();
    for (line, f) in tsv_lines(&path)? {
        if f.len() != 5 {
            return Err(Error::parse(&name, line, "expected 5 columns"));
        }
        let pos: PosTag = f[1].parse().map_err(|_| Error::parse(&name, line, "unknown POS tag"))?;
        let freq = f[2].parse().map_err(|_| Error::parse(&name, line, "bad frequency"))?;
        let status = match f[3].as_str() {
            "mapped" => MapStatus::Mapped,
            "not_mappable" => MapStatus::NotMappable(f[4].clone()),
            "below_min_freq" => MapStatus::BelowMinFreq,
            _ => return Err(Error::parse(&name, line, "unknown status")),
        };
        vocabulary.push(VocabularyEntry {
            unit: LexicalUnit::new(&f[0], pos),
            freq,
            status,
        });
    }
    vocabulary.sort_by(|a, b| a.unit.cmp(&b.unit));

    let path = dir.join("contexts.tsv");
    let name = path.display().to_string();
    let mut context_store = BTreeMap::new();
    for (line, f) in tsv_lines(&path)? {
        if f.len() != 3 {
            return Err(Error::parse(&name, line, "expected 3 columns"));
        }
        let id: u32 = f[0].parse().map_err(|_| Error::parse(&name, line, "bad context id"))?;
        context_store.insert(
            id,
            ContextEntry {
                doc_id: f[1].clone(),
                text: f[2].clone(),
            },
        );
    }

    let maps_dir = dir.join("maps");
    let mut maps = BTreeMap::new();
    let entries = fs::read_dir(&maps_dir).map_err(|e| Error::io(&maps_dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(&maps_dir, e))?.path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let map: SemanticMap = read_json(&path)?;
        let expected = map_file_name(&map.headword);
        if path.file_name().and_then(|n| n.to_str()) != Some(expected.as_str()) {
            return Err(Error::Resource(format!(
                "{} holds the map of {}",
                path.display(),
                map.headword
            )));
        }
        maps.insert(map.headword.clone(), map);
    }

    let res = Resource {
        manifest,
        vocabulary,
        maps,
        context_store,
    };
    for w in res.maps.keys() {
        match res.entry(w).map(|e| &e.status) {
            Some(MapStatus::Mapped) => {}
            _ => return Err(Error::Resource(format!("{w} has a map but is not listed as mapped"))),
        }
    }
    res.check_closure()?;
    Ok(res)
}
