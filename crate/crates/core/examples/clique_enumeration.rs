//! Maximal cliques of a small contexonym graph, checked against the
//! exhaustive enumeration.
//!
//! The graph holds two triangles sharing "corde" plus a pendant edge, so
//! the headword's neighbourhood splits into three cliques.

use semantic_atlas::cliques::{brute_force_cliques, maximal_cliques, CliqueCaps, ContexonymGraph};
use semantic_atlas::{LexicalUnit, PosTag};

fn main() -> semantic_atlas::Result<()> {
    let words = ["arc", "archet", "corde", "noeud", "violon", "flèche"];
    let nodes: Vec<LexicalUnit> = words.iter().map(|w| LexicalUnit::new(w, PosTag::Noun)).collect();
    let edges = [(1, 2), (1, 4), (2, 4), (2, 3), (0, 2), (0, 5), (2, 5)];
    let graph = ContexonymGraph::from_edges(LexicalUnit::new("targ", PosTag::Noun), nodes, &edges);
    println!("{} nodes, {} edges", graph.len(), graph.n_edges());

    let found = maximal_cliques(&graph, CliqueCaps::default());
    for c in &found.cliques {
        let members: Vec<&str> = c.members.iter().map(|u| u.key.as_ref()).collect();
        println!("clique {}: {}", c.clique_id, members.join(", "));
    }

    let mut fast: Vec<_> = found.cliques.iter().map(|c| c.members.clone()).collect();
    let mut slow: Vec<_> = brute_force_cliques(&graph)?.into_iter().map(|c| c.members).collect();
    fast.sort();
    slow.sort();
    println!("matches exhaustive enumeration: {}", fast == slow);
    Ok(())
}
