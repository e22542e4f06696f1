use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SemanticMap;
use crate::morpho::LexicalUnit;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub cluster_id: usize,
    pub clique_ids: Vec<usize>,
    /// Up to three contexonyms shared by most of the cluster's cliques.
    pub labels: Vec<LexicalUnit>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Single-linkage clustering of the cliques over all factor axes, cut at
/// `threshold` times the largest pairwise distance. Cliques without a
/// geometry row form their own clusters. Cluster ids follow the smallest
/// clique id of each cluster.
pub fn cluster_map(map: &SemanticMap, threshold: f64) -> Vec<Cluster> {
    let n = map.cliques.len();
    let coords: Vec<Option<&Vec<f64>>> = map
        .cliques
        .iter()
        .map(|c| map.row_of(c.clique_id).map(|r| &map.geometry.row_coords[r]))
        .collect();

    let mut pairs = Vec::new();
    let mut diameter = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            if let (Some(a), Some(b)) = (coords[i], coords[j]) {
                let d = distance(a, b);
                diameter = diameter.max(d);
                pairs.push((i, j, d));
            }
        }
    }
    let cut = threshold * diameter;
    let mut parent: Vec<usize> = (0..n).collect();
    for (i, j, d) in pairs {
        if d <= cut {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    let mut clusters: Vec<Vec<usize>> = groups.into_values().collect();
    clusters.sort_by_key(|members| members.iter().map(|&i| map.cliques[i].clique_id).min());

    clusters
        .into_iter()
        .enumerate()
        .map(|(cluster_id, members)| {
            let mut counts: BTreeMap<&LexicalUnit, usize> = BTreeMap::new();
            for &i in &members {
                for u in &map.cliques[i].members {
                    *counts.entry(u).or_default() += 1;
                }
            }
            let mut ranked: Vec<(&LexicalUnit, usize)> = counts.into_iter().collect();
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
            let mut clique_ids: Vec<usize> = members.iter().map(|&i| map.cliques[i].clique_id).collect();
            clique_ids.sort_unstable();
            Cluster {
                cluster_id,
                clique_ids,
                labels: ranked.into_iter().take(3).map(|(u, _)| u.clone()).collect(),
            }
        })
        .collect()
}
