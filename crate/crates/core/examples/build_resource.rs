//! Builds a resource from a generated two-sense corpus, saves it and
//! reloads it.
//!
//! Usage: cargo run --example build_resource [OUT_DIR]

use semantic_atlas::atlas::{build_resource, load_resource, save_resource, MapStatus, Prepared};
use semantic_atlas::config::BuildConfig;
use semantic_atlas::ingest::{load_corpus, CorpusFormat};
use semantic_atlas::morpho::MorphoLexicon;
use semantic_atlas::relations::RelationMode;
use semantic_atlas::synthetic::SenseCorpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scratch = std::env::temp_dir().join("atlas-example");
    let out: std::path::PathBuf = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| scratch.join("resource"));
    let corpus_dir = scratch.join("corpus");
    std::fs::create_dir_all(&corpus_dir)?;
    std::fs::write(corpus_dir.join("targ.txt"), SenseCorpus::two_senses(1).render())?;

    // The vocabulary is tiny: stop only the filler word and keep every partner.
    let mut cfg = BuildConfig::for_mode(RelationMode::Sentence);
    cfg.filter.stop_top_k = 1;
    cfg.filter.context_quantile = 1.0;

    let docs = load_corpus(&corpus_dir, CorpusFormat::Plain)?;
    let prepared = Prepared::from_documents(&docs, &MorphoLexicon::new(), &cfg)?;
    let resource = build_resource(&prepared, &cfg)?;
    std::fs::create_dir_all(&out)?;
    save_resource(&resource, &out)?;

    let m = &resource.manifest;
    println!("{} contexts, vocabulary {}", m.n_contexts, m.vocabulary_size);
    println!("mapped {}, not mappable {}", m.mapped, m.not_mappable);
    for e in &resource.vocabulary {
        let status = match &e.status {
            MapStatus::Mapped => "mapped".to_string(),
            MapStatus::NotMappable(r) => format!("not mappable ({r})"),
            MapStatus::BelowMinFreq => "below min_freq".to_string(),
        };
        println!("  {:<10} {:>4}  {status}", e.unit.key.to_string(), e.freq);
    }

    let reloaded = load_resource(&out)?;
    println!("written to {}; reload identical: {}", out.display(), reloaded == resource);
    Ok(())
}
