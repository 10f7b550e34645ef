//! Brute-force structural counts straight from the definitions, sharing no
//! code with the oracle: triangles are node triples, wedges are pairs of
//! incident edges, and every dependent pair is found by comparing edge sets.

#![allow(dead_code)]

use std::path::PathBuf;

use clustream_core::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteCounts {
    pub delta: u64,
    pub lambda: u64,
    pub phi: u64,
    pub psi: u64,
    pub omega_prime: u64,
}

type Pair = (u32, u32);

fn pair(a: u32, b: u32) -> Pair {
    (a.min(b), a.max(b))
}

fn adjacent(g: &Graph, a: u32, b: u32) -> bool {
    g.has_edge(NodeId(a), NodeId(b)).unwrap()
}

/// Every triangle as its three edges.
pub fn triangles(g: &Graph) -> Vec<[Pair; 3]> {
    let n = g.num_nodes() as u32;
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if !adjacent(g, a, b) {
                continue;
            }
            for c in b + 1..n {
                if adjacent(g, a, c) && adjacent(g, b, c) {
                    out.push([pair(a, b), pair(a, c), pair(b, c)]);
                }
            }
        }
    }
    out
}

/// Every wedge as its two edges.
pub fn wedges(g: &Graph) -> Vec<[Pair; 2]> {
    let n = g.num_nodes() as u32;
    let mut out = Vec::new();
    for center in 0..n {
        for a in 0..n {
            for b in a + 1..n {
                if a != center && b != center && adjacent(g, center, a) && adjacent(g, center, b) {
                    out.push([pair(center, a), pair(center, b)]);
                }
            }
        }
    }
    out
}

fn shared<const A: usize, const B: usize>(x: &[Pair; A], y: &[Pair; B]) -> usize {
    x.iter().filter(|e| y.contains(e)).count()
}

pub fn brute_counts(g: &Graph) -> BruteCounts {
    let tri = triangles(g);
    let wed = wedges(g);
    let mut phi = 0;
    for i in 0..tri.len() {
        for j in i + 1..tri.len() {
            if shared(&tri[i], &tri[j]) == 1 {
                phi += 1;
            }
        }
    }
    let mut psi = 0;
    for i in 0..wed.len() {
        for j in i + 1..wed.len() {
            if shared(&wed[i], &wed[j]) == 1 {
                psi += 1;
            }
        }
    }
    // a wedge sharing both edges with a triangle is one of its own wedges
    let mut omega_prime = 0;
    for w in &wed {
        for t in &tri {
            if shared(w, t) == 1 {
                omega_prime += 1;
            }
        }
    }
    BruteCounts {
        delta: 3 * tri.len() as u64,
        lambda: wed.len() as u64,
        phi,
        psi,
        omega_prime,
    }
}

/// Directory holding real edge lists, if configured.
pub fn data_dir() -> Option<PathBuf> {
    std::env::var_os("CLUSTREAM_DATA_DIR").map(PathBuf::from)
}

/// First existing file among `names` in the data directory.
pub fn dataset(names: &[&str]) -> Option<PathBuf> {
    let dir = data_dir()?;
    names.iter().map(|n| dir.join(n)).find(|p| p.is_file())
}
