//! Request handling for the read-only HTTP API, independent of any server.
//!
//! Routes (GET only):
//!
//! - `/api/manifest`
//! - `/api/words?prefix=P&limit=N`
//! - `/api/map/{word}?k1=1&k2=2&pos=NOUN`
//! - `/api/contexts/{word}/{clique}?pos=NOUN`
//!
//! Path segments are percent-encoded normalized keys. Every body is a JSON
//! object carrying the resource format `version`.

use percent_encoding::percent_decode_str;
use serde::Serialize;
use serde_json::{json, Value};

use crate::atlas::{self, MapStatus, Resource, SemanticMap};
use crate::error::Error;
use crate::morpho::{LexicalUnit, PosTag};

const DEFAULT_WORD_LIMIT: usize = 50;
const MAX_WORD_LIMIT: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct ApiResponse {
    pub status: u16,
    pub body: Value,
}

#[derive(Serialize)]
struct WordItem<'a> {
    key: &'a str,
    pos: PosTag,
    freq: u64,
    mapped: bool,
}

#[derive(Serialize)]
struct PointItem<'a> {
    clique_id: usize,
    cluster_id: Option<usize>,
    x: f64,
    y: f64,
    members: &'a [LexicalUnit],
    n_contexts: usize,
}

#[derive(Serialize)]
struct LabelItem<'a> {
    unit: &'a LexicalUnit,
    x: f64,
    y: f64,
}

/// Immutable view over one resource; safe to share between threads.
#[derive(Debug)]
pub struct Api {
    resource: Resource,
}

struct Query(Vec<(String, String)>);

impl Query {
    fn parse(raw: &str) -> Result<Self, ApiResponse> {
        let mut pairs = Vec::new();
        for part in raw.split('&').filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').unwrap_or((part, ""));
            pairs.push((decode_query(k)?, decode_query(v)?));
        }
        Ok(Query(pairs))
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn number(&self, key: &str, default: usize) -> Result<usize, ApiResponse> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| bad_request(format!("{key} must be a non-negative integer, got {v:?}"))),
        }
    }

    fn pos(&self) -> Result<Option<PosTag>, ApiResponse> {
        self.get("pos")
            .map(|p| p.parse::<PosTag>().map_err(|_| bad_request(format!("unknown POS tag {p:?}"))))
            .transpose()
    }
}

fn decode_query(s: &str) -> Result<String, ApiResponse> {
    decode(&s.replace('+', " "))
}

fn decode(s: &str) -> Result<String, ApiResponse> {
    percent_decode_str(s)
        .decode_utf8()
        .map(|c| c.into_owned())
        .map_err(|_| bad_request("percent-encoding is not valid UTF-8"))
}

fn error(status: u16, code: &str, message: impl Into<String>) -> ApiResponse {
    ApiResponse {
        status,
        body: json!({
            "version": atlas::FORMAT_VERSION,
            "error": code,
            "message": message.into(),
        }),
    }
}

fn bad_request(message: impl Into<String>) -> ApiResponse {
    error(400, "BAD_REQUEST", message)
}

fn not_found(message: impl Into<String>) -> ApiResponse {
    error(404, "NOT_FOUND", message)
}

fn ok(mut body: Value) -> ApiResponse {
    body["version"] = json!(atlas::FORMAT_VERSION);
    ApiResponse { status: 200, body }
}

impl Api {
    pub fn new(resource: Resource) -> Self {
        Api { resource }
    }

    pub fn resource(&self) -> &Resource {
        &self.resource
    }

    /// Answers one GET request. `path` excludes the query string; `query`
    /// is the raw text after `?` (possibly empty).
    pub fn handle(&self, path: &str, query: &str) -> ApiResponse {
        let q = match Query::parse(query) {
            Ok(q) => q,
            Err(resp) => return resp,
        };
        let segments: Vec<&str> = path.trim_matches('/').split('/').collect();
        let result = match segments.as_slice() {
            ["api", "manifest"] => Ok(self.manifest()),
            ["api", "words"] => self.words(&q),
            ["api", "map", word] => decode(word).and_then(|w| self.map(&w, &q)),
            ["api", "contexts", word, clique] => decode(word).and_then(|w| self.contexts(&w, clique, &q)),
            _ => Err(not_found(format!("no route for {path}"))),
        };
        result.unwrap_or_else(|resp| resp)
    }

    fn manifest(&self) -> ApiResponse {
        ok(json!({ "manifest": self.resource.manifest }))
    }

    /// With a prefix: matching keys in lexicographic order. Without one:
    /// the most frequent words first.
    fn words(&self, q: &Query) -> Result<ApiResponse, ApiResponse> {
        let limit = q.number("limit", DEFAULT_WORD_LIMIT)?.min(MAX_WORD_LIMIT);
        let prefix = q.get("prefix").unwrap_or("");
        let mut entries: Vec<_> = self
            .resource
            .vocabulary
            .iter()
            .filter(|e| e.status != MapStatus::BelowMinFreq && e.unit.key.starts_with(prefix))
            .collect();
        if prefix.is_empty() {
            entries.sort_by(|a, b| b.freq.cmp(&a.freq).then_with(|| a.unit.cmp(&b.unit)));
        }
        let total = entries.len();
        let words: Vec<WordItem> = entries
            .into_iter()
            .take(limit)
            .map(|e| WordItem {
                key: &e.unit.key,
                pos: e.unit.pos,
                freq: e.freq,
                mapped: e.status == MapStatus::Mapped,
            })
            .collect();
        Ok(ok(json!({ "prefix": prefix, "total": total, "words": words })))
    }

    fn resolve(&self, word: &str, q: &Query) -> Result<&SemanticMap, ApiResponse> {
        let pos = q.pos()?;
        let unit = self
            .resource
            .resolve(word, pos)
            .ok_or_else(|| not_found(format!("no map for {word}")))?;
        if let Some(map) = self.resource.maps.get(&unit) {
            return Ok(map);
        }
        Err(match self.resource.entry(&unit).map(|e| &e.status) {
            Some(MapStatus::NotMappable(reason)) => ApiResponse {
                status: 404,
                body: json!({
                    "version": atlas::FORMAT_VERSION,
                    "error": "NOT_MAPPABLE",
                    "word": unit,
                    "message": reason,
                }),
            },
            _ => not_found(format!("no map for {unit}: below the minimum frequency")),
        })
    }

    fn map(&self, word: &str, q: &Query) -> Result<ApiResponse, ApiResponse> {
        let map = self.resolve(word, q)?;
        let k1 = q.number("k1", 1)?;
        let k2 = q.number("k2", 2)?;
        let proj = map.geometry.project(k1, k2).map_err(|e| bad_request(e.to_string()))?;

        let cluster_of = |clique_id: usize| {
            map.clusters
                .iter()
                .find(|c| c.clique_ids.contains(&clique_id))
                .map(|c| c.cluster_id)
        };
        let points: Vec<PointItem> = map
            .rows
            .iter()
            .zip(&proj.points)
            .map(|(&clique_id, p)| {
                let i = map.cliques.iter().position(|c| c.clique_id == clique_id).expect("row clique exists");
                PointItem {
                    clique_id,
                    cluster_id: cluster_of(clique_id),
                    x: p[0],
                    y: p[1],
                    members: &map.cliques[i].members,
                    n_contexts: map.sense_contexts[i].len(),
                }
            })
            .collect();
        let labels: Vec<LabelItem> = map
            .columns
            .iter()
            .zip(&proj.labels)
            .map(|(unit, p)| LabelItem { unit, x: p[0], y: p[1] })
            .collect();
        Ok(ok(json!({
            "word": map.headword,
            "axes": [k1, k2],
            "n_axes": map.geometry.n_axes(),
            "partial": map.partial,
            "singular_values": map.geometry.singular_values,
            "inertia_total": map.geometry.inertia_total,
            "inertia_share": map.geometry.inertia_share,
            "points": points,
            "labels": labels,
            "clusters": map.clusters,
            "cliques": map.cliques,
        })))
    }

    fn contexts(&self, word: &str, clique: &str, q: &Query) -> Result<ApiResponse, ApiResponse> {
        let clique_id: usize = clique
            .parse()
            .map_err(|_| bad_request(format!("clique id must be a non-negative integer, got {clique:?}")))?;
        let map = self.resolve(word, q)?;
        match atlas::lookup_contexts(&self.resource, &map.headword, clique_id) {
            Ok(hits) => Ok(ok(json!({
                "word": map.headword,
                "clique_id": clique_id,
                "contexts": hits,
            }))),
            Err(Error::NotFound(msg)) => Err(not_found(msg)),
            Err(e) => Err(error(500, "INTERNAL", e.to_string())),
        }
    }
}
