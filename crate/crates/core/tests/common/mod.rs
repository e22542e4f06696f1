//! Independent oracles and fixtures shared by the integration tests.
//!
//! Nothing here calls into the numerical or graph code under test: the
//! eigen-solver, χ² statistic and clique checks are written from scratch
//! over plain vectors.

#![allow(dead_code)]

use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semantic_atlas::atlas::{self, Prepared, Resource};
use semantic_atlas::cliques::{Clique, ContexonymGraph};
use semantic_atlas::config::BuildConfig;
use semantic_atlas::ingest::{self, CorpusFormat};
use semantic_atlas::morpho::MorphoLexicon;
use semantic_atlas::relations::RelationMode;
use semantic_atlas::synthetic::SenseCorpus;
use semantic_atlas::{LexicalUnit, PosTag};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Non-negative integer table with no empty row or column. About a third
/// of the cells are zero.
pub fn random_table(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(r, c, |_, _| {
        if rng.random_bool(0.35) {
            0.0
        } else {
            rng.random_range(1..=20) as f64
        }
    });
    for i in 0..r {
        if m.row(i).sum() == 0.0 {
            let j = rng.random_range(0..c);
            m[(i, j)] = 1.0;
        }
    }
    for j in 0..c {
        if m.column(j).sum() == 0.0 {
            let i = rng.random_range(0..r);
            m[(i, j)] = 1.0;
        }
    }
    m
}

/// `n` seeded tables from 2×2 to 12×15, always including both extremes.
pub fn table_suite(seed: u64, n: usize) -> Vec<DMatrix<f64>> {
    let mut g = rng(seed);
    let mut out = vec![random_table(&mut g, 2, 2), random_table(&mut g, 12, 15)];
    while out.len() < n {
        let r = g.random_range(2..=12);
        let c = g.random_range(2..=15);
        out.push(random_table(&mut g, r, c));
    }
    out
}

/// Correspondence matrix, row masses and column masses.
pub fn masses(counts: &DMatrix<f64>) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let (nr, nc) = counts.shape();
    let n: f64 = counts.iter().sum();
    let p: Vec<Vec<f64>> = (0..nr).map(|i| (0..nc).map(|j| counts[(i, j)] / n).collect()).collect();
    let r = p.iter().map(|row| row.iter().sum()).collect();
    let c = (0..nc).map(|j| p.iter().map(|row| row[j]).sum()).collect();
    (p, r, c)
}

/// Pearson χ² statistic of the table.
pub fn chi_square(counts: &DMatrix<f64>) -> f64 {
    let (nr, nc) = counts.shape();
    let n: f64 = counts.iter().sum();
    let rows: Vec<f64> = (0..nr).map(|i| counts.row(i).sum()).collect();
    let cols: Vec<f64> = (0..nc).map(|j| counts.column(j).sum()).collect();
    let mut chi2 = 0.0;
    for i in 0..nr {
        for j in 0..nc {
            let e = rows[i] * cols[j] / n;
            chi2 += (counts[(i, j)] - e).powi(2) / e;
        }
    }
    chi2
}

/// `SᵀS` for the standardized residuals of the table.
pub fn residual_gram(counts: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let (p, r, c) = masses(counts);
    let (nr, nc) = (r.len(), c.len());
    let s: Vec<Vec<f64>> = (0..nr)
        .map(|i| (0..nc).map(|j| (p[i][j] - r[i] * c[j]) / (r[i] * c[j]).sqrt()).collect())
        .collect();
    (0..nc)
        .map(|a| (0..nc).map(|b| (0..nr).map(|i| s[i][a] * s[i][b]).sum()).collect())
        .collect()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// in descending order.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cos = 1.0 / (t * t + 1.0).sqrt();
                let sin = t * cos;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cos * akp - sin * akq;
                    a[k][q] = sin * akp + cos * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cos * apk - sin * aqk;
                    a[q][k] = sin * apk + cos * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    eig
}

/// Row-profile χ² distance between rows `a` and `b`.
pub fn chi2_row_distance(counts: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    let (p, r, c) = masses(counts);
    (0..c.len())
        .map(|j| (p[a][j] / r[a] - p[b][j] / r[b]).powi(2) / c[j])
        .sum::<f64>()
        .sqrt()
}

fn unit(i: usize) -> LexicalUnit {
    LexicalUnit::new(format!("n{i:02}"), PosTag::Noun)
}

/// Erdős–Rényi graph on `n` nodes with edge probability `p`, plus its
/// adjacency matrix.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> (ContexonymGraph, Vec<Vec<bool>>) {
    let mut adj = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                adj[i][j] = true;
                adj[j][i] = true;
                edges.push((i, j));
            }
        }
    }
    let nodes = (0..n).map(unit).collect();
    let g = ContexonymGraph::from_edges(LexicalUnit::new("head", PosTag::Noun), nodes, &edges);
    (g, adj)
}

/// Checks that every output is a clique of two or more nodes, is maximal,
/// is reported once, and that every edge lies in some output clique.
pub fn check_cliques(adj: &[Vec<bool>], cliques: &[Clique]) -> Result<(), String> {
    let n = adj.len();
    let index = |u: &LexicalUnit| -> usize { u.key[1..].parse().expect("node label") };
    let mut seen = std::collections::BTreeSet::new();
    let mut covered = vec![vec![false; n]; n];
    for c in cliques {
        let members: Vec<usize> = c.members.iter().map(index).collect();
        if members.len() < 2 {
            return Err(format!("clique {members:?} is smaller than two"));
        }
        if !seen.insert(members.clone()) {
            return Err(format!("clique {members:?} reported twice"));
        }
        for (x, &a) in members.iter().enumerate() {
            for &b in &members[x + 1..] {
                if !adj[a][b] {
                    return Err(format!("{members:?} is not a clique: {a}-{b} missing"));
                }
                covered[a][b] = true;
                covered[b][a] = true;
            }
        }
        if let Some(v) = (0..n).find(|v| !members.contains(v) && members.iter().all(|&m| adj[m][*v])) {
            return Err(format!("{members:?} is not maximal: {v} extends it"));
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if adj[a][b] && !covered[a][b] {
                return Err(format!("edge {a}-{b} is in no clique"));
            }
        }
    }
    Ok(())
}

/// Sentence-mode configuration for the generated "targ" corpus: the
/// vocabulary is tiny, so only the single most frequent unit (the filler)
/// is stopped and every partner count is kept.
pub fn targ_config() -> BuildConfig {
    let mut cfg = BuildConfig::for_mode(RelationMode::Sentence);
    cfg.filter.stop_top_k = 1;
    cfg.filter.context_quantile = 1.0;
    cfg
}

/// Writes the generated corpus to `dir/targ.txt` and builds it through the
/// normal file-based path.
pub fn build_targ(dir: &Path, corpus: &SenseCorpus) -> (Prepared, Resource) {
    std::fs::write(dir.join("targ.txt"), corpus.render()).expect("write corpus");
    let docs = ingest::load_corpus(dir, CorpusFormat::Plain).expect("load corpus");
    let cfg = targ_config();
    let prepared = Prepared::from_documents(&docs, &MorphoLexicon::new(), &cfg).expect("prepare");
    let res = atlas::build_resource(&prepared, &cfg).expect("build");
    (prepared, res)
}

pub fn x(key: &str) -> LexicalUnit {
    LexicalUnit::new(key, PosTag::X)
}

/// Dependency analysis of "il décrire un arc de cercle": `arc` depends on
/// `décrire`, `cercle` on `arc` through the preposition.
pub const ARC_DE_CERCLE: &str = "\
1\til\til\tPRON\t2\tnsubj
2\tdécrire\tdécrire\tVERB\t0\troot
3\tun\tun\tDET\t4\tdet
4\tarc\tarc\tNOUN\t2\tobj
5\tde\tde\tADP\t6\tcase
6\tcercle\tcercle\tNOUN\t4\tnmod
";

/// Inflected forms for the normalization fixture.
pub fn french_lexicon() -> MorphoLexicon {
    let mut lex = MorphoLexicon::new();
    for (surface, lemma, pos) in [
        ("il", "il", PosTag::Pron),
        ("fit", "faire", PosTag::Verb),
        ("fera", "faire", PosTag::Verb),
        ("faire", "faire", PosTag::Verb),
        ("des", "un", PosTag::Det),
        ("le", "le", PosTag::Det),
        ("les", "le", PosTag::Det),
        ("courses", "course", PosTag::Noun),
        ("trottoir", "trottoir", PosTag::Noun),
        ("trottoirs", "trottoir", PosTag::Noun),
    ] {
        lex.insert(surface, lemma, pos);
    }
    lex
}
