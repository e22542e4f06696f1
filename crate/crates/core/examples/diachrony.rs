//! Compares a word across two corpora: one where it has two senses and
//! one where a third sense appears.

use semantic_atlas::atlas::{build_resource, compare_resources, Prepared, Resource};
use semantic_atlas::config::BuildConfig;
use semantic_atlas::ingest::{assign_context_ids, plain_document};
use semantic_atlas::morpho::MorphoLexicon;
use semantic_atlas::relations::RelationMode;
use semantic_atlas::synthetic::SenseCorpus;
use semantic_atlas::{LexicalUnit, PosTag};

fn resource(corpus: &SenseCorpus) -> semantic_atlas::Result<Resource> {
    let mut docs = vec![plain_document("targ".into(), "targ.txt".into(), corpus.render())];
    assign_context_ids(&mut docs);
    let mut cfg = BuildConfig::for_mode(RelationMode::Sentence);
    cfg.filter.stop_top_k = 1;
    cfg.filter.context_quantile = 1.0;
    let prepared = Prepared::from_documents(&docs, &MorphoLexicon::new(), &cfg)?;
    build_resource(&prepared, &cfg)
}

fn main() -> semantic_atlas::Result<()> {
    let before = resource(&SenseCorpus::two_senses(8))?;
    let after = resource(&SenseCorpus::two_senses(9).with_extra_sense())?;
    let report = compare_resources(&before, &after, &LexicalUnit::new("targ", PosTag::X));

    let keys = |v: &[LexicalUnit]| v.iter().map(|u| u.key.to_string()).collect::<Vec<_>>().join(" ");
    println!("shared: {}", keys(&report.shared_lexicon));
    println!("new:    {}", keys(&report.lexicon_only_b));
    println!("lost:   {}", keys(&report.lexicon_only_a));
    println!("lexicon jaccard {:.3}", report.jaccard_lexicon);
    for m in &report.best_match {
        match m.clique_b {
            Some(b) => println!("clique {} -> {} (jaccard {:.2})", m.clique_a, b, m.jaccard),
            None => println!("clique {} has no counterpart", m.clique_a),
        }
    }
    Ok(())
}
