use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Resource;
use crate::morpho::LexicalUnit;

/// Best counterpart in the other resource for one clique.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueMatch {
    pub clique_a: usize,
    /// `None` when no clique of the other map shares a member.
    pub clique_b: Option<usize>,
    pub jaccard: f64,
}

/// How one word's map differs between two resources, typically two periods
/// of the same domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiachronyReport {
    pub word: LexicalUnit,
    pub present_in_a: bool,
    pub present_in_b: bool,
    /// Contexonyms only found in the map from `a`.
    pub lexicon_only_a: Vec<LexicalUnit>,
    pub lexicon_only_b: Vec<LexicalUnit>,
    pub shared_lexicon: Vec<LexicalUnit>,
    /// Jaccard index of the two contexonym sets.
    pub jaccard_lexicon: f64,
    /// For each clique of `a`, its closest clique of `b` by member overlap.
    pub best_match: Vec<CliqueMatch>,
}

fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

pub fn compare_resources(a: &Resource, b: &Resource, w: &LexicalUnit) -> DiachronyReport {
    let map_a = a.maps.get(w);
    let map_b = b.maps.get(w);
    let lex_a = map_a.map(|m| m.contexonyms()).unwrap_or_default();
    let lex_b = map_b.map(|m| m.contexonyms()).unwrap_or_default();

    let mut best_match = Vec::new();
    if let Some(ma) = map_a {
        for ca in &ma.cliques {
            let set_a: BTreeSet<&LexicalUnit> = ca.members.iter().collect();
            let mut best = CliqueMatch {
                clique_a: ca.clique_id,
                clique_b: None,
                jaccard: 0.0,
            };
            for cb in map_b.map(|m| m.cliques.as_slice()).unwrap_or(&[]) {
                let set_b: BTreeSet<&LexicalUnit> = cb.members.iter().collect();
                let j = jaccard(&set_a, &set_b);
                if j > best.jaccard {
                    best.clique_b = Some(cb.clique_id);
                    best.jaccard = j;
                }
            }
            best_match.push(best);
        }
    }

    DiachronyReport {
        word: w.clone(),
        present_in_a: map_a.is_some(),
        present_in_b: map_b.is_some(),
        lexicon_only_a: lex_a.difference(&lex_b).cloned().collect(),
        lexicon_only_b: lex_b.difference(&lex_a).cloned().collect(),
        shared_lexicon: lex_a.intersection(&lex_b).cloned().collect(),
        jaccard_lexicon: jaccard(&lex_a, &lex_b),
        best_match,
    }
}
