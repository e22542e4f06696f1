//! Queries the HTTP API in-process, then optionally serves it.
//!
//! Usage: cargo run --example serve_api [--listen PORT]

use semantic_atlas::atlas::{build_resource, Prepared};
use semantic_atlas::config::BuildConfig;
use semantic_atlas::ingest::{assign_context_ids, plain_document};
use semantic_atlas::morpho::MorphoLexicon;
use semantic_atlas::relations::RelationMode;
use semantic_atlas::serve::{serve, Api};
use semantic_atlas::synthetic::SenseCorpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = SenseCorpus::two_senses(4).render();
    let mut docs = vec![plain_document("targ".into(), "targ.txt".into(), text)];
    assign_context_ids(&mut docs);
    let mut cfg = BuildConfig::for_mode(RelationMode::Sentence);
    cfg.filter.stop_top_k = 1;
    cfg.filter.context_quantile = 1.0;
    let prepared = Prepared::from_documents(&docs, &MorphoLexicon::new(), &cfg)?;
    let api = Api::new(build_resource(&prepared, &cfg)?);

    for (path, query) in [
        ("/api/words", "limit=5"),
        ("/api/map/targ", "k1=1&k2=2"),
        ("/api/contexts/targ/0", ""),
        ("/api/map/nuage", ""),
    ] {
        let reply = api.handle(path, query);
        let body = serde_json::to_string(&reply.body)?;
        let shown: String = body.chars().take(160).collect();
        println!("GET {path}?{query} -> {}\n  {shown}...", reply.status);
    }

    let args: Vec<String> = std::env::args().collect();
    if let Some(port) = args.iter().position(|a| a == "--listen").and_then(|i| args.get(i + 1)) {
        let addr = format!("127.0.0.1:{port}").parse()?;
        tokio::runtime::Runtime::new()?.block_on(serve(api, addr, |a| println!("listening on http://{a}")))?;
    }
    Ok(())
}
