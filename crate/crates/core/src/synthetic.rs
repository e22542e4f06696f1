//! Generated corpora with known sense structure.
//!
//! A headword is embedded in several communities of co-occurring words.
//! Communities never share a word, so each one should come out as its own
//! region of the headword's map. Decoy sentences use a separate vocabulary
//! and never contain the headword.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Community {
    pub words: Vec<String>,
    /// Word groups (indices into `words`) that appear together in a sentence.
    pub groups: Vec<Vec<usize>>,
}

impl Community {
    /// Six words in three overlapping triples forming a ring:
    /// `{0,1,2}`, `{2,3,4}`, `{4,5,0}`.
    pub fn ring(words: [&str; 6]) -> Self {
        Community {
            words: words.iter().map(|w| w.to_string()).collect(),
            groups: vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 0]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenseCorpus {
    pub headword: String,
    pub communities: Vec<Community>,
    pub decoy: Vec<String>,
    /// Appears in every sentence; meant to be cut by the frequency stop list.
    pub filler: String,
    pub sentences_per_community: usize,
    pub decoy_sentences: usize,
    pub seed: u64,
}

impl SenseCorpus {
    /// "targ" in a tool sense and a music sense, 80 sentences each, plus 40
    /// weather decoy sentences (200 sentences overall).
    pub fn two_senses(seed: u64) -> Self {
        SenseCorpus {
            headword: "targ".into(),
            communities: vec![
                Community::ring(["lame", "acier", "forge", "manche", "tranchant", "meule"]),
                Community::ring(["corde", "archet", "violon", "accord", "partition", "chanson"]),
            ],
            decoy: ["nuage", "pluie", "orage", "vent", "brume"]
                .iter()
                .map(|w| w.to_string())
                .collect(),
            filler: "est".into(),
            sentences_per_community: 80,
            decoy_sentences: 40,
            seed,
        }
    }

    /// Adds a third community (a sailing sense).
    pub fn with_extra_sense(mut self) -> Self {
        self.communities
            .push(Community::ring(["voile", "mât", "coque", "quille", "gréement", "hauban"]));
        self
    }

    pub fn render(&self) -> String {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut sentences: Vec<Vec<String>> = Vec::new();
        for community in &self.communities {
            for _ in 0..self.sentences_per_community {
                let group = community.groups.choose(&mut rng).expect("community has groups");
                let mut words: Vec<String> = group.iter().map(|&i| community.words[i].clone()).collect();
                words.push(self.headword.clone());
                words.push(self.filler.clone());
                sentences.push(words);
            }
        }
        for _ in 0..self.decoy_sentences {
            let mut words: Vec<String> = self.decoy.choose_multiple(&mut rng, 3).cloned().collect();
            words.push(self.filler.clone());
            sentences.push(words);
        }
        sentences.shuffle(&mut rng);
        let mut text = String::new();
        for mut words in sentences {
            words.shuffle(&mut rng);
            let first = capitalize(&words[0]);
            words[0] = first;
            text.push_str(&words.join(" "));
            text.push_str(".\n");
        }
        text
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}
