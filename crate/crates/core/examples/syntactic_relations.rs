//! Dependency-based relations on "il décrire un arc de cercle".
//!
//! Direct dependencies give primary links. "arc" and "cercle" are two steps
//! apart through the preposition, which gives a secondary link.

use std::io::Cursor;

use semantic_atlas::ingest::{annotated_document, assign_context_ids, parse_annotated};
use semantic_atlas::morpho::{normalize_corpus, MorphoLexicon, NormalizationPolicy};
use semantic_atlas::relations::extract_syntactic;

const ANALYSIS: &str = "\
1\til\til\tPRON\t2\tnsubj
2\tdécrit\tdécrire\tVERB\t0\troot
3\tun\tun\tDET\t4\tdet
4\tarc\tarc\tNOUN\t2\tobj
5\tde\tde\tADP\t6\tcase
6\tcercle\tcercle\tNOUN\t4\tnmod
";

fn main() -> semantic_atlas::Result<()> {
    let sentences = parse_annotated(Cursor::new(ANALYSIS), "inline.tsv")?;
    let mut docs = vec![annotated_document("inline".into(), "inline.tsv".into(), sentences)];
    assign_context_ids(&mut docs);
    let corpus = normalize_corpus(&docs, &MorphoLexicon::new(), &NormalizationPolicy::default());
    for rel in extract_syntactic(&corpus)? {
        let (x, y) = rel.pair();
        println!("{:<14} {:<14} {:?} (context {})", x.to_string(), y.to_string(), rel.kind, rel.ctx_id);
    }
    Ok(())
}
