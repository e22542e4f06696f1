//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when
//! any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Cursor;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use semantic_atlas::atlas::{self, map_file_name};
use semantic_atlas::ca::{self, ContingencyTable};
use semantic_atlas::cliques::{self, CliqueCaps};
use semantic_atlas::ingest::{self, Document};
use semantic_atlas::morpho::{self, MorphoLexicon, NormalizationPolicy, NormalizedContext, NormalizedCorpus};
use semantic_atlas::relations::{self, ContexonymFilter, FilterConfig, RelationKind};
use semantic_atlas::serve::Api;
use semantic_atlas::synthetic::SenseCorpus;
use semantic_atlas::{LexicalUnit, PosTag};

use common::*;

type Outcome = Result<String, String>;

const CA_TABLES: usize = 240;
const CLIQUE_GRAPHS: usize = 120;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed < Duration::from_secs(limit_s), || {
        format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

fn analyse(m: &DMatrix<f64>) -> ca::CaResult {
    let table = ContingencyTable::from_matrix(m.clone()).expect("valid table");
    ca::correspondence_analysis(&table).expect("analysis succeeds")
}

/// σ² against the eigenvalues of SᵀS, and Σσ² against χ²/n.
fn ca_oracle() -> Outcome {
    let start = Instant::now();
    let tables = table_suite(0xCA, CA_TABLES);
    let mut worst_eig = 0.0f64;
    let mut worst_inertia = 0.0f64;
    for (t, m) in tables.iter().enumerate() {
        let res = analyse(m);
        let k = m.nrows().min(m.ncols()) - 1;
        ensure(res.n_axes() == k, || format!("table {t}: {} axes, expected {k}", res.n_axes()))?;
        let eig = jacobi_eigenvalues(residual_gram(m));
        let top = eig[0].max(f64::MIN_POSITIVE);
        for (a, &lambda) in eig.iter().enumerate() {
            let sigma2 = res.singular_values.get(a).map_or(0.0, |s| s * s);
            // Eigenvalues far below the leading one carry only rounding
            // noise, so they are compared on the scale of the leading one.
            let scale = if lambda.abs() >= 1e-6 * top { lambda.abs() } else { top };
            let err = (sigma2 - lambda).abs() / scale;
            worst_eig = worst_eig.max(err);
            ensure(err <= 1e-8, || format!("table {t} axis {a}: σ²={sigma2:e} λ={lambda:e}"))?;
        }
        let n: f64 = m.iter().sum();
        let expected = chi_square(m) / n;
        let err = (res.inertia_total - expected).abs();
        worst_inertia = worst_inertia.max(err);
        ensure(err <= 1e-9, || format!("table {t}: Σσ²={} χ²/n={expected}", res.inertia_total))?;
    }
    within(start.elapsed(), 10)?;
    Ok(format!(
        "{} tables, max σ² rel err {worst_eig:.1e}, max inertia err {worst_inertia:.1e}, {:.2}s",
        tables.len(),
        start.elapsed().as_secs_f64()
    ))
}

/// Centroids, χ² distances, transition formula, permutation equivariance
/// and determinism.
fn ca_invariants() -> Outcome {
    let tables = table_suite(0xCA, CA_TABLES);
    let mut perm_rng = rng(0x5EED);
    for (t, m) in tables.iter().enumerate() {
        let res = analyse(m);
        let (p, r, c) = masses(m);
        let k = res.n_axes();
        for axis in 0..k {
            let row_c: f64 = (0..m.nrows()).map(|i| r[i] * res.row_coords[(i, axis)]).sum();
            let col_c: f64 = (0..m.ncols()).map(|j| c[j] * res.col_coords[(j, axis)]).sum();
            ensure(row_c.abs() <= 1e-9 && col_c.abs() <= 1e-9, || {
                format!("table {t} axis {axis}: centroids {row_c:e}, {col_c:e}")
            })?;
        }
        for a in 0..m.nrows() {
            for b in a + 1..m.nrows() {
                let chi = chi2_row_distance(m, a, b);
                let euclid = (0..k)
                    .map(|x| (res.row_coords[(a, x)] - res.row_coords[(b, x)]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                ensure((chi - euclid).abs() <= 1e-8 * chi.max(1.0), || {
                    format!("table {t} rows {a},{b}: χ² distance {chi} vs map distance {euclid}")
                })?;
            }
        }
        for (axis, &sigma) in res.singular_values.iter().enumerate() {
            if sigma == 0.0 {
                continue;
            }
            for i in 0..m.nrows() {
                let from_cols: f64 = (0..m.ncols())
                    .map(|j| p[i][j] / r[i] * res.col_coords[(j, axis)])
                    .sum::<f64>()
                    / sigma;
                let f = res.row_coords[(i, axis)];
                ensure((from_cols - f).abs() <= 1e-8 * f.abs().max(1.0), || {
                    format!("table {t} row {i} axis {axis}: transition {from_cols} vs {f}")
                })?;
            }
        }

        let mut perm: Vec<usize> = (0..m.nrows()).collect();
        perm.shuffle(&mut perm_rng);
        let permuted = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(perm[i], j)]);
        let pres = analyse(&permuted);
        ensure(pres.singular_values == res.singular_values && pres.col_coords == res.col_coords, || {
            format!("table {t}: row permutation changed the factors")
        })?;
        for (i, &src) in perm.iter().enumerate() {
            ensure(pres.row_coords.row(i) == res.row_coords.row(src), || {
                format!("table {t}: row {src} moved to {i} changed coordinates")
            })?;
        }

        ensure(analyse(m) == res, || format!("table {t}: two runs differ"))?;
    }
    Ok(format!("{} tables; row permutations and reruns bit-identical", tables.len()))
}

fn clique_oracle() -> Outcome {
    let start = Instant::now();
    let mut g_rng = rng(0xC11);
    let mut total = 0;
    for t in 0..CLIQUE_GRAPHS {
        let n = if t < 10 { 20 } else { g_rng.random_range(0..=20) };
        let p = g_rng.random_range(0.02..0.98);
        let (g, adj) = random_graph(&mut g_rng, n, p);
        let fast = cliques::maximal_cliques(&g, CliqueCaps::default());
        ensure(!fast.partial, || format!("graph {t}: unexpected cap"))?;
        let slow = cliques::brute_force_cliques(&g).map_err(|e| e.to_string())?;
        ensure(fast.cliques == slow, || {
            format!("graph {t} (n={n}, p={p:.2}): {} vs {} cliques", fast.cliques.len(), slow.len())
        })?;
        check_cliques(&adj, &fast.cliques).map_err(|e| format!("graph {t}: {e}"))?;
        total += fast.cliques.len();
    }
    within(start.elapsed(), 5)?;
    Ok(format!(
        "{CLIQUE_GRAPHS} graphs, {total} cliques, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn normalized(docs: &[Document], lexicon: &MorphoLexicon) -> NormalizedCorpus {
    morpho::normalize_corpus(docs, lexicon, &NormalizationPolicy::default())
}

fn secondary_link() -> Outcome {
    let sentences = ingest::parse_annotated(Cursor::new(ARC_DE_CERCLE), "arc.tsv").map_err(|e| e.to_string())?;
    let mut docs = vec![ingest::annotated_document("arc".into(), "arc.tsv".into(), sentences)];
    ingest::assign_context_ids(&mut docs);
    let corpus = normalized(&docs, &MorphoLexicon::new());
    let got: BTreeSet<(String, String, RelationKind)> = relations::extract_syntactic(&corpus)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|r| (r.a.key.to_string(), r.b.key.to_string(), r.kind))
        .collect();
    let expected: BTreeSet<(String, String, RelationKind)> = [
        ("arc", "décrire", RelationKind::SynPrimary),
        ("arc", "cercle", RelationKind::SynPrimary),
        ("cercle", "décrire", RelationKind::SynSecondary),
    ]
    .into_iter()
    .map(|(a, b, k)| (a.to_string(), b.to_string(), k))
    .collect();
    ensure(got == expected, || format!("got {got:?}"))?;
    Ok("décrire–arc, arc–cercle primary; décrire–cercle secondary; nothing else".into())
}

fn units(ctx: &NormalizedContext) -> Vec<String> {
    let mut u: Vec<String> = ctx.surviving().map(|u| u.to_string()).collect();
    u.sort();
    u
}

fn normalization_policy() -> Outcome {
    let text = "Il fit des courses. Il fera des courses. Faire le trottoir. Faire les trottoirs.";
    let mut docs = vec![Document {
        doc_id: "norm".into(),
        source_path: "norm.txt".into(),
        text: text.into(),
        sentences: ingest::segment_plain(text),
    }];
    ingest::assign_context_ids(&mut docs);
    let corpus = normalized(&docs, &french_lexicon());
    let got: Vec<Vec<String>> = corpus.contexts().map(units).collect();
    let expected: Vec<Vec<String>> = [
        ["courses/NOUN", "faire/VERB"],
        ["courses/NOUN", "faire/VERB"],
        ["faire/VERB", "trottoir/NOUN"],
        ["faire/VERB", "trottoirs/NOUN"],
    ]
    .iter()
    .map(|s| s.iter().map(|x| x.to_string()).collect())
    .collect();
    ensure(got == expected, || format!("got {got:?}"))?;
    Ok("fit/fera → faire/VERB; trottoir ≠ trottoirs; determiners dropped".into())
}

fn community_of(corpus: &SenseCorpus, unit: &LexicalUnit) -> Option<usize> {
    corpus
        .communities
        .iter()
        .position(|c| c.words.iter().any(|w| w == unit.key.as_ref()))
}

fn sense_separation() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = SenseCorpus::two_senses(2024);
    let (_, res) = build_targ(dir.path(), &corpus);
    let map = res.maps.get(&x("targ")).ok_or("targ has no map")?;
    let mut side: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for c in &map.cliques {
        let owners: BTreeSet<Option<usize>> = c.members.iter().map(|u| community_of(&corpus, u)).collect();
        ensure(owners.len() == 1 && !owners.contains(&None), || {
            format!("clique {} mixes communities: {:?}", c.clique_id, c.members)
        })?;
        let community = owners.into_iter().next().flatten().expect("one owner");
        let row = map.row_of(c.clique_id).ok_or("clique without a map row")?;
        side.entry(community).or_default().push(map.geometry.row_coords[row][0]);
    }
    ensure(side.len() == 2, || format!("{} communities represented", side.len()))?;
    for (community, xs) in &side {
        ensure(xs.len() >= 2, || format!("community {community} has {} clique(s)", xs.len()))?;
    }
    let a = &side[&0];
    let b = &side[&1];
    let separated = (a.iter().all(|&v| v < 0.0) && b.iter().all(|&v| v > 0.0))
        || (a.iter().all(|&v| v > 0.0) && b.iter().all(|&v| v < 0.0));
    ensure(separated, || format!("axis 1 does not separate: {a:?} vs {b:?}"))?;
    within(start.elapsed(), 30)?;
    Ok(format!(
        "{} + {} cliques, axis-1 sign split, {:.2}s",
        a.len(),
        b.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn absent_sense() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = SenseCorpus::two_senses(2024);
    let (_, res) = build_targ(dir.path(), &corpus);
    let targ = x("targ");
    let map = res.maps.get(&targ).ok_or("targ has no map")?;
    let decoys: BTreeSet<&str> = corpus.decoy.iter().map(String::as_str).collect();
    let mut n_contexts = 0;
    for c in &map.cliques {
        ensure(c.members.iter().all(|u| !decoys.contains(u.key.as_ref())), || {
            format!("clique {} holds a decoy: {:?}", c.clique_id, c.members)
        })?;
        let hits = atlas::lookup_contexts(&res, &targ, c.clique_id).map_err(|e| e.to_string())?;
        ensure(!hits.is_empty(), || format!("clique {} has no contexts", c.clique_id))?;
        for hit in &hits {
            let has_targ = hit
                .text
                .to_lowercase()
                .split(|ch: char| !ch.is_alphanumeric())
                .any(|t| t == "targ");
            ensure(has_targ, || format!("context {} lacks targ: {}", hit.ctx_id, hit.text))?;
        }
        n_contexts += hits.len();
    }
    Ok(format!(
        "no decoy in {} cliques; {n_contexts} indexed contexts all contain targ",
        map.cliques.len()
    ))
}

/// Sentences of 3 to 8 words drawn with a skewed distribution over 30
/// words.
fn random_corpus(seed: u64) -> NormalizedCorpus {
    let mut g = rng(seed);
    let contexts = (0..150u32)
        .map(|ctx_id| {
            let len = g.random_range(3..=8);
            let units: Vec<Option<LexicalUnit>> = (0..len)
                .map(|_| {
                    let k = (g.random::<f64>().powi(2) * 30.0) as usize;
                    Some(LexicalUnit::new(format!("w{k:02}"), PosTag::Noun))
                })
                .collect();
            NormalizedContext {
                ctx_id,
                doc_id: "random".into(),
                text: String::new(),
                heads: vec![None; units.len()],
                units,
            }
        })
        .collect();
    NormalizedCorpus {
        documents: vec![contexts],
    }
}

fn filter_monotonicity() -> Outcome {
    let corpus = random_corpus(0xF117);
    let stats = relations::corpus_stats(&relations::extract_sentence(&corpus), &corpus);
    let vocab = stats.vocabulary().to_vec();
    let mut g = rng(0x7167);
    let mut nonempty = 0;
    for trial in 0..50 {
        let w = vocab[g.random_range(0..vocab.len())].clone();
        let loose = FilterConfig {
            stop_top_k: g.random_range(0..4),
            context_quantile: g.random_range(0.2..=1.0),
            min_pair_count: g.random_range(1..=3),
            reciprocal_filter: g.random_bool(0.5),
        };
        let tighter_count = FilterConfig {
            min_pair_count: loose.min_pair_count + g.random_range(1..=3),
            ..loose
        };
        let tighter_quantile = FilterConfig {
            context_quantile: loose.context_quantile * g.random_range(0.1..1.0),
            ..loose
        };
        let both = FilterConfig {
            context_quantile: tighter_quantile.context_quantile,
            ..tighter_count
        };
        let base = ContexonymFilter::new(&stats, loose).map_err(|e| e.to_string())?.contexonyms(&w);
        if !base.is_empty() {
            nonempty += 1;
        }
        for (name, cfg) in [("min_pair_count", tighter_count), ("context_quantile", tighter_quantile), ("both", both)] {
            let tight = ContexonymFilter::new(&stats, cfg).map_err(|e| e.to_string())?.contexonyms(&w);
            ensure(tight.is_subset(&base), || {
                format!("trial {trial} ({w}, tightened {name}): {tight:?} ⊄ {base:?}")
            })?;
        }
    }
    Ok(format!("50 (word, config) pairs, {nonempty} with non-empty base sets, all nested"))
}

fn significant_digits(rendered: &str) -> usize {
    let mantissa = rendered.trim_start_matches('-').split(['e', 'E']).next().unwrap_or("");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let trimmed = digits.trim_start_matches('0').trim_end_matches('0');
    trimmed.len()
}

fn resource_round_trip() -> Outcome {
    let build_dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = SenseCorpus::two_senses(77).with_extra_sense();
    let (_, res) = build_targ(build_dir.path(), &corpus);
    atlas::save_resource(&res, out.path()).map_err(|e| e.to_string())?;
    let back = atlas::load_resource(out.path()).map_err(|e| e.to_string())?;
    ensure(back.maps.len() == res.maps.len() && !res.maps.is_empty(), || "map count differs".into())?;
    for (w, m) in &res.maps {
        ensure(back.maps.get(w) == Some(m), || format!("map of {w} differs after reload"))?;
    }
    ensure(back == res, || "manifest, vocabulary or context store differs".into())?;

    let api = Api::new(back);
    let mut compared = 0;
    for (w, m) in &res.maps {
        let file = std::fs::read_to_string(out.path().join("maps").join(map_file_name(w))).map_err(|e| e.to_string())?;
        let persisted: serde_json::Value = serde_json::from_str(&file).map_err(|e| e.to_string())?;
        let k = m.geometry.n_axes();
        for (k1, k2) in [(1, 2), (2, 1), (1, k + 1)] {
            let path = format!("/api/map/{}", utf8_path(&w.key));
            let resp = api.handle(&path, &format!("k1={k1}&k2={k2}&pos={}", w.pos.as_str()));
            ensure(resp.status == 200, || format!("{w}: status {}", resp.status))?;
            for point in resp.body["points"].as_array().ok_or("points missing")? {
                let id = point["clique_id"].as_u64().ok_or("clique_id missing")? as usize;
                let row = m.row_of(id).ok_or("unknown clique")?;
                for (field, axis) in [("x", k1), ("y", k2)] {
                    let api_num = &point[field];
                    let file_num = persisted["row_coords"][row].get(axis - 1).cloned().unwrap_or(serde_json::json!(0.0));
                    let (a, b) = (api_num.to_string(), file_num.to_string());
                    ensure(a == b, || format!("{w} clique {id} axis {axis}: API {a} vs file {b}"))?;
                    ensure(significant_digits(&a) <= 12, || format!("{a} has more than 12 significant digits"))?;
                    compared += 1;
                }
            }
            for (field, key) in [("inertia_share", "inertia_share"), ("singular_values", "singular_values")] {
                ensure(resp.body[field] == persisted[key], || format!("{w}: {field} differs from file"))?;
            }
        }
    }
    Ok(format!("{} maps reloaded equal; {compared} API coordinates match the files", res.maps.len()))
}

fn utf8_path(key: &str) -> String {
    percent_encoding::utf8_percent_encode(key, percent_encoding::NON_ALPHANUMERIC).to_string()
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("ca-oracle-equivalence", ca_oracle),
        ("ca-structural-invariants", ca_invariants),
        ("clique-oracle-equivalence", clique_oracle),
        ("secondary-link-rule", secondary_link),
        ("normalization-policy", normalization_policy),
        ("end-to-end-sense-separation", sense_separation),
        ("absent-sense-fidelity", absent_sense),
        ("filter-monotonicity", filter_monotonicity),
        ("resource-round-trip", resource_round_trip),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
