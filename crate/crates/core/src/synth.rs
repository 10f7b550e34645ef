//! Seeded random graph generators for tests and desk-scale experiments.

use rand::Rng;
use rustc_hash::FxHashSet;

use crate::graph::{Graph, GraphBuilder, NodeId};
use crate::seed;

/// G(n, p): every pair independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = seed::rng(seed);
    let mut b = GraphBuilder::new(n);
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.random::<f64>() < p {
                b.add_edge(u, v);
            }
        }
    }
    b.build()
}

/// Holme–Kim growth: preferential attachment with `m` edges per new node,
/// where each edge after the first closes a triangle with probability
/// `triad_p`. Produces heavy-tailed degrees with tunable clustering.
pub fn holme_kim(n: usize, m: usize, triad_p: f64, seed: u64) -> Graph {
    assert!(m >= 1 && n > m, "holme_kim needs 1 <= m < n");
    let mut rng = seed::rng(seed);
    let mut adj: Vec<FxHashSet<u32>> = vec![FxHashSet::default(); n];
    let mut b = GraphBuilder::new(n);
    // node list with multiplicity = degree (initial nodes once each)
    let mut repeated: Vec<u32> = (0..m as u32).collect();
    let link = |adj: &mut Vec<FxHashSet<u32>>, b: &mut GraphBuilder, x: u32, y: u32| {
        adj[x as usize].insert(y);
        adj[y as usize].insert(x);
        b.add_edge(x, y);
    };
    for source in m as u32..n as u32 {
        // m distinct attachment candidates
        let mut targets: Vec<u32> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = repeated[rng.random_range(0..repeated.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        let mut target = targets.pop().unwrap();
        link(&mut adj, &mut b, source, target);
        repeated.push(target);
        let mut added = 1;
        while added < m {
            if rng.random::<f64>() < triad_p {
                let mut hood: Vec<u32> = adj[target as usize]
                    .iter()
                    .copied()
                    .filter(|&x| x != source && !adj[source as usize].contains(&x))
                    .collect();
                if !hood.is_empty() {
                    hood.sort_unstable();
                    let nbr = hood[rng.random_range(0..hood.len())];
                    link(&mut adj, &mut b, source, nbr);
                    repeated.push(nbr);
                    added += 1;
                    continue;
                }
            }
            let Some(t) = targets.pop() else { break };
            target = t;
            if adj[source as usize].contains(&target) {
                continue;
            }
            link(&mut adj, &mut b, source, target);
            repeated.push(target);
            added += 1;
        }
        repeated.extend(std::iter::repeat_n(source, m));
    }
    b.build()
}

/// Uniformly random relabeling permutation of `0..n`.
pub fn random_permutation(n: usize, seed: u64) -> Vec<u32> {
    let mut rng = seed::rng(seed);
    let mut perm: Vec<u32> = (0..n as u32).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    perm
}

/// Complete graph on `n` nodes.
pub fn complete(n: usize) -> Graph {
    let mut b = GraphBuilder::new(n);
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            b.add_edge(NodeId(u), NodeId(v));
        }
    }
    b.build()
}
