//! Lemmatization and filtering of a plain sentence with a small lexicon.
//!
//! Nouns keep their surface form (so "trottoirs" stays plural), other
//! categories are reduced to their lemma, and grammatical categories are
//! dropped.

use semantic_atlas::ingest::segment_plain;
use semantic_atlas::morpho::{analyze, normalize, MorphoLexicon, NormalizationPolicy};
use semantic_atlas::PosTag;

fn main() {
    let mut lexicon = MorphoLexicon::new();
    for (surface, lemma, pos) in [
        ("il", "il", PosTag::Pron),
        ("fit", "faire", PosTag::Verb),
        ("les", "le", PosTag::Det),
        ("courses", "course", PosTag::Noun),
        ("sur", "sur", PosTag::Adp),
        ("trottoirs", "trottoir", PosTag::Noun),
        ("mouillés", "mouillé", PosTag::Adj),
    ] {
        lexicon.insert(surface, lemma, pos);
    }
    let policy = NormalizationPolicy::default();

    let text = "Il fit les courses sur les trottoirs mouillés.";
    for sentence in segment_plain(text) {
        println!("{:<12} {:<10} {:<6} unit", "surface", "lemma", "pos");
        for token in &sentence.tokens {
            let (lemma, pos) = analyze(token, &lexicon);
            let unit = normalize(&token.surface, &lemma, pos, &policy)
                .map(|u| u.to_string())
                .unwrap_or_else(|| "(dropped)".into());
            println!("{:<12} {:<10} {:<6} {unit}", token.surface, lemma, pos.as_str());
        }
    }
}
