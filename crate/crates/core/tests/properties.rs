//! Property tests for the invariants each stage promises.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;

use semantic_atlas::ca::{self, ContingencyTable};
use semantic_atlas::ingest::{self, CorpusFormat, Head};
use semantic_atlas::morpho::{self, MorphoLexicon, NormalizationPolicy, NormalizedContext, NormalizedCorpus};
use semantic_atlas::relations::{self, RelationKind};
use semantic_atlas::{LexicalUnit, PosTag};

fn word() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-zé]{1,7}",
        "[A-Z][a-z]{1,6}",
        Just("l'eau".to_string()),
        Just("porte-clé".to_string()),
        Just("M.".to_string()),
    ]
}

fn sentence() -> impl Strategy<Value = String> {
    (prop::collection::vec(word(), 1..8), prop::sample::select(vec![".", "!", "?", " ;", ","]))
        .prop_map(|(words, end)| format!("{}{end}", words.join(" ")))
}

/// A small corpus directory: two to three documents of a few sentences.
fn corpus_texts() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::collection::vec(sentence(), 0..6).prop_map(|s| s.join(" ")), 1..4)
}

fn write_corpus(texts: &[String]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in texts.iter().enumerate() {
        std::fs::write(dir.path().join(format!("doc{i}.txt")), text).unwrap();
    }
    dir
}

fn pos() -> impl Strategy<Value = PosTag> {
    prop::sample::select(PosTag::ALL.to_vec())
}

/// One dependency tree over `n` tokens: token `i > 0` hangs from some
/// earlier token. Units come from a four-word vocabulary so repeats occur;
/// about a third of the tokens are function words.
fn tree_context() -> impl Strategy<Value = NormalizedContext> {
    (1usize..9)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(prop::option::weighted(0.7, 0u8..4), n),
                (0..n).map(|i| if i == 0 { Just(0).boxed() } else { (0..i).boxed() }).collect::<Vec<_>>(),
            )
        })
        .prop_map(|(words, heads)| NormalizedContext {
            ctx_id: 0,
            doc_id: Arc::from("tree"),
            text: String::new(),
            units: words
                .iter()
                .map(|w| w.map(|k| LexicalUnit::new(format!("u{k}"), PosTag::Noun)))
                .collect(),
            heads: heads
                .iter()
                .enumerate()
                .map(|(i, &h)| Some(if i == 0 { Head::Root } else { Head::Token(h) }))
                .collect(),
        })
}

fn one_context(ctx: NormalizedContext) -> NormalizedCorpus {
    NormalizedCorpus {
        documents: vec![vec![ctx]],
    }
}

/// Tree distances by Floyd–Warshall.
fn distances(ctx: &NormalizedContext) -> Vec<Vec<usize>> {
    let n = ctx.units.len();
    let mut d = vec![vec![usize::MAX / 4; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (i, h) in ctx.heads.iter().enumerate() {
        if let Some(Head::Token(h)) = h {
            d[i][*h] = 1;
            d[*h][i] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    d
}

fn table() -> impl Strategy<Value = DMatrix<f64>> {
    (2usize..7, 2usize..8).prop_flat_map(|(r, c)| {
        prop::collection::vec(0u32..6, r * c).prop_filter_map("empty margin", move |v| {
            let m = DMatrix::from_fn(r, c, |i, j| v[i * c + j] as f64);
            let ok = m.row_iter().all(|x| x.sum() > 0.0) && m.column_iter().all(|x| x.sum() > 0.0);
            ok.then_some(m)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn context_ids_are_a_bijection(texts in corpus_texts()) {
        let dir = write_corpus(&texts);
        let docs = ingest::load_corpus(dir.path(), CorpusFormat::Plain).unwrap();
        let ids: Vec<u32> = docs.iter().flat_map(|d| d.sentences.iter().map(|s| s.ctx_id)).collect();
        let expected: Vec<u32> = (0..ids.len() as u32).collect();
        prop_assert_eq!(ids, expected);
    }

    #[test]
    fn loading_is_deterministic(texts in corpus_texts()) {
        let dir = write_corpus(&texts);
        let a = ingest::load_corpus(dir.path(), CorpusFormat::Plain).unwrap();
        let b = ingest::load_corpus(dir.path(), CorpusFormat::Plain).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn spans_slice_the_surface(texts in corpus_texts()) {
        let dir = write_corpus(&texts);
        for doc in ingest::load_corpus(dir.path(), CorpusFormat::Plain).unwrap() {
            for s in &doc.sentences {
                for t in &s.tokens {
                    prop_assert_eq!(&doc.text[t.span.0..t.span.1], t.surface.as_str());
                }
            }
        }
    }

    #[test]
    fn stop_categories_never_reach_relations(
        tagged in prop::collection::vec(("[a-z]{1,5}", pos()), 1..12),
    ) {
        let mut lexicon = MorphoLexicon::new();
        for (w, p) in &tagged {
            lexicon.insert(w.clone(), w.clone(), *p);
        }
        let text = format!("{}.", tagged.iter().map(|(w, _)| w.as_str()).collect::<Vec<_>>().join(" "));
        let mut docs = vec![ingest::Document {
            doc_id: "d".into(),
            source_path: "d.txt".into(),
            sentences: ingest::segment_plain(&text),
            text,
        }];
        ingest::assign_context_ids(&mut docs);
        let policy = NormalizationPolicy::default();
        let corpus = morpho::normalize_corpus(&docs, &lexicon, &policy);
        for ctx in corpus.contexts() {
            prop_assert!(ctx.surviving().all(|u| !policy.is_stop(u.pos)));
        }
        for r in relations::extract_sentence(&corpus) {
            prop_assert!(!policy.is_stop(r.a.pos) && !policy.is_stop(r.b.pos));
        }
    }

    #[test]
    fn syntactic_links_follow_tree_distance(ctx in tree_context()) {
        let d = distances(&ctx);
        let n = ctx.units.len();
        let mut primary = BTreeSet::new();
        let mut at_two = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                if let (Some(u), Some(v)) = (&ctx.units[i], &ctx.units[j]) {
                    if u < v {
                        if d[i][j] == 1 {
                            primary.insert((u.clone(), v.clone()));
                        } else if d[i][j] == 2 {
                            at_two.insert((u.clone(), v.clone()));
                        }
                    }
                }
            }
        }
        let secondary: BTreeSet<_> = at_two.difference(&primary).cloned().collect();

        let got = relations::extract_syntactic(&one_context(ctx)).unwrap();
        let got_primary: BTreeSet<_> = got.iter().filter(|r| r.kind == RelationKind::SynPrimary).map(|r| (r.a.clone(), r.b.clone())).collect();
        let got_secondary: BTreeSet<_> = got.iter().filter(|r| r.kind == RelationKind::SynSecondary).map(|r| (r.a.clone(), r.b.clone())).collect();
        prop_assert_eq!(&got_primary, &primary);
        prop_assert_eq!(&got_secondary, &secondary);
        prop_assert!(got_primary.is_disjoint(&got_secondary));
    }

    #[test]
    fn wide_window_contains_sentence_pairs(
        sents in prop::collection::vec(prop::collection::vec(0u8..6, 1..7), 1..6),
    ) {
        let contexts: Vec<NormalizedContext> = sents
            .iter()
            .enumerate()
            .map(|(i, s)| NormalizedContext {
                ctx_id: i as u32,
                doc_id: Arc::from("d"),
                text: String::new(),
                units: s.iter().map(|k| Some(LexicalUnit::new(format!("w{k}"), PosTag::Noun))).collect(),
                heads: vec![None; s.len()],
            })
            .collect();
        let corpus = NormalizedCorpus { documents: vec![contexts] };
        let width = sents.iter().map(Vec::len).max().unwrap().max(2);
        let window: BTreeSet<_> = relations::extract_window(&corpus, width)
            .unwrap()
            .into_iter()
            .map(|r| (r.ctx_id, r.a, r.b))
            .collect();
        for r in relations::extract_sentence(&corpus) {
            prop_assert!(window.contains(&(r.ctx_id, r.a.clone(), r.b.clone())), "{:?}", r);
        }
        let again: BTreeSet<_> = relations::extract_window(&corpus, width)
            .unwrap()
            .into_iter()
            .map(|r| (r.ctx_id, r.a, r.b))
            .collect();
        prop_assert_eq!(window, again);
    }

    #[test]
    fn pair_queries_are_symmetric(ctx in tree_context()) {
        let corpus = one_context(ctx);
        let stats = relations::corpus_stats(&relations::extract_syntactic(&corpus).unwrap(), &corpus);
        for a in stats.vocabulary() {
            for b in stats.vocabulary() {
                prop_assert_eq!(stats.pair_contexts(a, b), stats.pair_contexts(b, a));
            }
        }
    }

    #[test]
    fn ca_geometry_invariants(m in table()) {
        let res = ca::correspondence_analysis(&ContingencyTable::from_matrix(m.clone()).unwrap()).unwrap();
        let (p, r, c) = common::masses(&m);
        let k = res.n_axes();
        for axis in 0..k {
            let rc: f64 = (0..m.nrows()).map(|i| r[i] * res.row_coords[(i, axis)]).sum();
            let cc: f64 = (0..m.ncols()).map(|j| c[j] * res.col_coords[(j, axis)]).sum();
            prop_assert!(rc.abs() <= 1e-9 && cc.abs() <= 1e-9);
        }
        let n: f64 = m.iter().sum();
        prop_assert!((res.inertia_total - common::chi_square(&m) / n).abs() <= 1e-9);
        for a in 0..m.nrows() {
            for b in a + 1..m.nrows() {
                let chi = common::chi2_row_distance(&m, a, b);
                let e = (0..k).map(|x| (res.row_coords[(a, x)] - res.row_coords[(b, x)]).powi(2)).sum::<f64>().sqrt();
                prop_assert!((chi - e).abs() <= 1e-8 * chi.max(1.0));
            }
        }
        for (axis, &sigma) in res.singular_values.iter().enumerate() {
            if sigma <= 1e-12 {
                continue;
            }
            for i in 0..m.nrows() {
                let t: f64 = (0..m.ncols()).map(|j| p[i][j] / r[i] * res.col_coords[(j, axis)]).sum::<f64>() / sigma;
                prop_assert!((t - res.row_coords[(i, axis)]).abs() <= 1e-8 * t.abs().max(1.0));
            }
        }
    }

    #[test]
    fn ca_row_permutation_is_exact(m in table(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..m.nrows()).collect();
        perm.shuffle(&mut common::rng(seed));
        let permuted = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(perm[i], j)]);
        let run = |t: &DMatrix<f64>| ca::correspondence_analysis(&ContingencyTable::from_matrix(t.clone()).unwrap()).unwrap();
        let (a, b) = (run(&m), run(&permuted));
        prop_assert_eq!(&a.singular_values, &b.singular_values);
        prop_assert_eq!(&a.col_coords, &b.col_coords);
        for (i, &src) in perm.iter().enumerate() {
            prop_assert_eq!(b.row_coords.row(i), a.row_coords.row(src));
            prop_assert_eq!(b.row_masses[i], a.row_masses[src]);
        }
        prop_assert_eq!(run(&m), a);
    }
}
