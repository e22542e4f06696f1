//! Contexonym graphs and their maximal cliques.
//!
//! A headword's contexonyms become the nodes of an undirected graph, linked
//! when the two contexonyms are themselves related somewhere in the corpus.
//! Each maximal clique of that graph is one fine-grained sense unit. The
//! headword is left out of the graph: it would belong to every clique.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morpho::LexicalUnit;
use crate::relations::FrequencyTable;

/// Fixed-width bit set over node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
struct NodeSet {
    words: Vec<u64>,
}

impl NodeSet {
    fn empty(n: usize) -> Self {
        NodeSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn intersection(&self, other: &NodeSet) -> NodeSet {
        NodeSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    fn difference(&self, other: &NodeSet) -> NodeSet {
        NodeSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }

    fn intersection_len(&self, other: &NodeSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContexonymGraph {
    pub headword: LexicalUnit,
    pub nodes: Vec<LexicalUnit>,
    adjacency: Vec<NodeSet>,
    /// `(i, j)` with `i < j` → sorted contexts attesting the edge.
    edge_contexts: BTreeMap<(usize, usize), Vec<u32>>,
    /// Per node, sorted contexts attesting its pair with the headword.
    head_contexts: Vec<Vec<u32>>,
}

impl ContexonymGraph {
    /// A graph from explicit edges, with no context bookkeeping. Self-loops
    /// are ignored.
    pub fn from_edges(headword: LexicalUnit, nodes: Vec<LexicalUnit>, edges: &[(usize, usize)]) -> Self {
        let n = nodes.len();
        let mut g = ContexonymGraph {
            headword,
            nodes,
            adjacency: vec![NodeSet::empty(n); n],
            edge_contexts: BTreeMap::new(),
            head_contexts: vec![Vec::new(); n],
        };
        for &(i, j) in edges {
            g.add_edge(i, j, Vec::new());
        }
        g
    }

    fn add_edge(&mut self, i: usize, j: usize, contexts: Vec<u32>) {
        if i == j {
            return;
        }
        self.adjacency[i].insert(j);
        self.adjacency[j].insert(i);
        self.edge_contexts.insert((i.min(j), i.max(j)), contexts);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_contexts.len()
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edge_contexts.keys().copied()
    }

    pub fn edge_contexts(&self, i: usize, j: usize) -> &[u32] {
        self.edge_contexts
            .get(&(i.min(j), i.max(j)))
            .map_or(&[], Vec::as_slice)
    }

    /// Number of distinct contexts attesting the edge (0 when absent).
    pub fn edge_support(&self, i: usize, j: usize) -> usize {
        self.edge_contexts(i, j).len()
    }

    pub fn head_contexts(&self, i: usize) -> &[u32] {
        &self.head_contexts[i]
    }
}

/// Builds the graph over `contexonyms`: nodes ordered by descending pair
/// count with the headword, then lexicographically; an edge wherever the
/// two contexonyms are attested together in at least `edge_min` contexts.
pub fn build_graph(
    headword: &LexicalUnit,
    contexonyms: &BTreeSet<LexicalUnit>,
    stats: &FrequencyTable,
    edge_min: usize,
) -> Result<ContexonymGraph> {
    if edge_min < 1 {
        return Err(Error::Config("edge_min must be at least 1".into()));
    }
    let mut nodes: Vec<(usize, LexicalUnit)> = contexonyms
        .iter()
        .filter(|u| *u != headword)
        .map(|u| (stats.pair_freq(headword, u), u.clone()))
        .collect();
    nodes.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    let nodes: Vec<LexicalUnit> = nodes.into_iter().map(|(_, u)| u).collect();

    let n = nodes.len();
    let ids: Vec<Option<u32>> = nodes.iter().map(|u| stats.id(u)).collect();
    let mut g = ContexonymGraph {
        headword: headword.clone(),
        adjacency: vec![NodeSet::empty(n); n],
        edge_contexts: BTreeMap::new(),
        head_contexts: nodes
            .iter()
            .map(|u| stats.pair_contexts(headword, u).to_vec())
            .collect(),
        nodes,
    };
    for i in 0..n {
        for j in i + 1..n {
            if let (Some(a), Some(b)) = (ids[i], ids[j]) {
                let ctxs = stats.pair_contexts_by_id(a, b);
                if ctxs.len() >= edge_min {
                    g.add_edge(i, j, ctxs.to_vec());
                }
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clique {
    pub clique_id: usize,
    /// Sorted; never includes the headword.
    pub members: Vec<LexicalUnit>,
    /// Sorted union of the contexts attesting member–member edges and
    /// member–headword pairs.
    pub support_ctx: Vec<u32>,
    /// Per member (aligned with `members`): distinct contexts attesting
    /// that member's edges inside the clique.
    pub member_support: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueCaps {
    pub max_cliques: usize,
    pub max_clique_size: usize,
}

impl Default for CliqueCaps {
    fn default() -> Self {
        CliqueCaps {
            max_cliques: 10_000,
            max_clique_size: 64,
        }
    }
}

/// Enumeration output. `partial` is set when a cap cut the enumeration
/// short (too many cliques, or cliques above the size cap left out).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CliqueSet {
    pub cliques: Vec<Clique>,
    pub partial: bool,
}

fn merge_sorted(into: &mut Vec<u32>, from: &[u32]) {
    into.extend_from_slice(from);
    into.sort_unstable();
    into.dedup();
}

fn make_clique(g: &ContexonymGraph, mut idx: Vec<usize>) -> Clique {
    idx.sort_by(|&a, &b| g.nodes[a].cmp(&g.nodes[b]));
    let mut support = Vec::new();
    let mut member_support = Vec::with_capacity(idx.len());
    for &i in &idx {
        merge_sorted(&mut support, g.head_contexts(i));
        let mut own = Vec::new();
        for &j in &idx {
            if i != j {
                merge_sorted(&mut own, g.edge_contexts(i, j));
            }
        }
        member_support.push(own.len());
        merge_sorted(&mut support, &own);
    }
    Clique {
        clique_id: 0,
        members: idx.into_iter().map(|i| g.nodes[i].clone()).collect(),
        support_ctx: support,
        member_support,
    }
}

fn clique_order(a: &Clique, b: &Clique) -> Ordering {
    b.members
        .len()
        .cmp(&a.members.len())
        .then_with(|| a.members.cmp(&b.members))
}

fn finish(g: &ContexonymGraph, found: Vec<Vec<usize>>) -> Vec<Clique> {
    let mut cliques: Vec<Clique> = found.into_iter().map(|c| make_clique(g, c)).collect();
    cliques.sort_by(clique_order);
    for (i, c) in cliques.iter_mut().enumerate() {
        c.clique_id = i;
    }
    cliques
}

/// Vertex order of repeated minimum-degree removal.
fn degeneracy_order(g: &ContexonymGraph) -> Vec<usize> {
    let n = g.len();
    let mut degree: Vec<usize> = (0..n).map(|i| g.degree(i)).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (degree[v], v))
            .unwrap();
        removed[v] = true;
        order.push(v);
        for u in g.adjacency[v].iter() {
            if !removed[u] {
                degree[u] -= 1;
            }
        }
    }
    order
}

struct Enumerator<'g> {
    g: &'g ContexonymGraph,
    caps: CliqueCaps,
    found: Vec<Vec<usize>>,
    partial: bool,
}

impl Enumerator<'_> {
    fn report(&mut self, r: &[usize]) {
        if r.len() < 2 {
            return;
        }
        if r.len() > self.caps.max_clique_size {
            self.partial = true;
            return;
        }
        if self.found.len() >= self.caps.max_cliques {
            self.partial = true;
            return;
        }
        self.found.push(r.to_vec());
    }

    fn stopped(&self) -> bool {
        self.partial && self.found.len() >= self.caps.max_cliques
    }

    /// Bron–Kerbosch with Tomita pivoting: the pivot maximises |P ∩ N(u)|.
    fn expand(&mut self, r: &mut Vec<usize>, mut p: NodeSet, mut x: NodeSet) {
        if self.stopped() {
            return;
        }
        if p.is_empty() {
            if x.is_empty() {
                self.report(r);
            }
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .max_by_key(|&u| (p.intersection_len(&self.g.adjacency[u]), std::cmp::Reverse(u)))
            .unwrap();
        let todo: Vec<usize> = p.difference(&self.g.adjacency[pivot]).iter().collect();
        for v in todo {
            let nv = &self.g.adjacency[v];
            r.push(v);
            self.expand(r, p.intersection(nv), x.intersection(nv));
            r.pop();
            p.remove(v);
            x.insert(v);
            if self.stopped() {
                return;
            }
        }
    }
}

/// All maximal cliques with at least two members.
///
/// The outer loop follows a degeneracy ordering: for each vertex, only its
/// later neighbours are candidates and its earlier neighbours are excluded,
/// which keeps each subproblem no wider than the graph's degeneracy. Output
/// is sorted by descending size, then by member list, and ids follow that
/// order.
pub fn maximal_cliques(g: &ContexonymGraph, caps: CliqueCaps) -> CliqueSet {
    let n = g.len();
    let mut e = Enumerator {
        g,
        caps,
        found: Vec::new(),
        partial: false,
    };
    let order = degeneracy_order(g);
    let mut rank = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    for &v in &order {
        let mut p = NodeSet::empty(n);
        let mut x = NodeSet::empty(n);
        for u in g.adjacency[v].iter() {
            if rank[u] > rank[v] {
                p.insert(u);
            } else {
                x.insert(u);
            }
        }
        e.expand(&mut vec![v], p, x);
        if e.stopped() {
            break;
        }
    }
    if e.partial {
        log::warn!(
            "clique enumeration for {} capped ({} cliques kept)",
            g.headword,
            e.found.len()
        );
    }
    CliqueSet {
        cliques: finish(g, e.found),
        partial: e.partial,
    }
}

/// Exhaustive subset enumeration, for graphs of at most 20 nodes. Used as
/// an independent check on [`maximal_cliques`].
pub fn brute_force_cliques(g: &ContexonymGraph) -> Result<Vec<Clique>> {
    let n = g.len();
    if n > 20 {
        return Err(Error::GraphTooLarge(n));
    }
    let neighbours: Vec<u32> = (0..n)
        .map(|i| (0..n).filter(|&j| g.is_adjacent(i, j)).fold(0, |m, j| m | (1 << j)))
        .collect();
    let mut found = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        // Nodes adjacent to every member; a clique needs each member to
        // see all the others, and is maximal when nobody else sees them all.
        let mut common = u32::MAX >> (32 - n);
        let mut complete = true;
        for i in (0..n).filter(|&i| mask & (1 << i) != 0) {
            if (mask & !(1 << i)) & !neighbours[i] != 0 {
                complete = false;
                break;
            }
            common &= neighbours[i];
        }
        if complete && common & !mask == 0 {
            found.push((0..n).filter(|&i| mask & (1 << i) != 0).collect());
        }
    }
    Ok(finish(g, found))
}
