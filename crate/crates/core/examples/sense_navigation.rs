//! Reads one word's map: its cliques, clusters of cliques, the first-plane
//! coordinates and the sentences behind a clique.

use semantic_atlas::atlas::{build_resource, lookup_contexts, Prepared};
use semantic_atlas::config::BuildConfig;
use semantic_atlas::ingest::{assign_context_ids, plain_document};
use semantic_atlas::morpho::MorphoLexicon;
use semantic_atlas::relations::RelationMode;
use semantic_atlas::synthetic::SenseCorpus;
use semantic_atlas::{LexicalUnit, PosTag};

fn main() -> semantic_atlas::Result<()> {
    let text = SenseCorpus::two_senses(3).render();
    let mut docs = vec![plain_document("targ".into(), "targ.txt".into(), text)];
    assign_context_ids(&mut docs);

    let mut cfg = BuildConfig::for_mode(RelationMode::Sentence);
    cfg.filter.stop_top_k = 1;
    cfg.filter.context_quantile = 1.0;
    let prepared = Prepared::from_documents(&docs, &MorphoLexicon::new(), &cfg)?;
    let resource = build_resource(&prepared, &cfg)?;

    let targ = LexicalUnit::new("targ", PosTag::X);
    let map = &resource.maps[&targ];
    println!("{} cliques over {} contexonyms", map.cliques.len(), map.columns.len());

    let proj = map.geometry.project(1, 2)?;
    for (&id, p) in map.rows.iter().zip(&proj.points) {
        let members: Vec<&str> = map.clique(id).unwrap().members.iter().map(|u| u.key.as_ref()).collect();
        println!("  clique {id:>2} ({:+.3}, {:+.3})  {}", p[0], p[1], members.join(" "));
    }
    for c in &map.clusters {
        let labels: Vec<&str> = c.labels.iter().map(|u| u.key.as_ref()).collect();
        println!("cluster {}: cliques {:?}, labelled {}", c.cluster_id, c.clique_ids, labels.join(", "));
    }

    let first = map.cliques[0].clique_id;
    println!("contexts of clique {first}:");
    for hit in lookup_contexts(&resource, &targ, first)?.iter().take(5) {
        println!("  [{}] {}", hit.ctx_id, hit.text);
    }
    Ok(())
}
