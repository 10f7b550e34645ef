//! Simple undirected graphs with dense node ids.
//!
//! A [`Graph`] is immutable once built. Adjacency is stored in compressed
//! sparse row form with every neighbor list sorted, so neighborhood
//! intersection is a linear merge.

use std::fmt;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index in `0..N`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

/// Undirected edge in canonical order (`u < v`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    u: NodeId,
    v: NodeId,
}

impl Edge {
    /// Builds the canonical edge between `a` and `b`; fails on a self-loop.
    pub fn new(a: impl Into<NodeId>, b: impl Into<NodeId>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Edge { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(Edge { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(Error::SelfLoop(a)),
        }
    }

    #[inline]
    pub fn u(self) -> NodeId {
        self.u
    }

    #[inline]
    pub fn v(self) -> NodeId {
        self.v
    }

    #[inline]
    pub fn endpoints(self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }

    /// Packs the edge into one integer; unique per canonical edge.
    #[inline]
    pub(crate) fn key(self) -> u64 {
        (u64::from(self.u.0) << 32) | u64::from(self.v.0)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

/// Outcome of offering one edge to a [`GraphBuilder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Insert {
    Added,
    SelfLoop,
    Duplicate,
}

/// Accumulates edges, dropping self-loops and duplicates, then freezes
/// into a [`Graph`]. Edge insertion order is preserved.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    num_nodes: usize,
    edges: Vec<Edge>,
    seen: FxHashSet<u64>,
}

impl GraphBuilder {
    pub fn new(num_nodes: usize) -> Self {
        GraphBuilder {
            num_nodes,
            ..Default::default()
        }
    }

    /// Grows the node range so that `n` is a valid id.
    pub fn ensure_node(&mut self, n: NodeId) {
        self.num_nodes = self.num_nodes.max(n.index() + 1);
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(&mut self, a: impl Into<NodeId>, b: impl Into<NodeId>) -> Insert {
        let (a, b) = (a.into(), b.into());
        self.ensure_node(a);
        self.ensure_node(b);
        let Ok(e) = Edge::new(a, b) else {
            return Insert::SelfLoop;
        };
        if self.seen.insert(e.key()) {
            self.edges.push(e);
            Insert::Added
        } else {
            Insert::Duplicate
        }
    }

    pub fn build(self) -> Graph {
        Graph::from_canonical(self.num_nodes, self.edges)
    }
}

/// Immutable simple undirected graph.
#[derive(Clone, Debug)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph from arbitrary `(a, b)` pairs on nodes `0..num_nodes`,
    /// silently dropping self-loops and repeated edges.
    pub fn from_pairs<I, A>(num_nodes: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, A)>,
        A: Into<NodeId>,
    {
        let mut b = GraphBuilder::new(num_nodes);
        for (x, y) in pairs {
            let (x, y) = (x.into(), y.into());
            for n in [x, y] {
                if n.index() >= num_nodes {
                    return Err(Error::NodeOutOfRange { node: n, num_nodes });
                }
            }
            b.add_edge(x, y);
        }
        Ok(b.build())
    }

    fn from_canonical(num_nodes: usize, edges: Vec<Edge>) -> Self {
        let mut degree = vec![0usize; num_nodes];
        for e in &edges {
            degree[e.u.index()] += 1;
            degree[e.v.index()] += 1;
        }
        let mut offsets = Vec::with_capacity(num_nodes + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..num_nodes].to_vec();
        let mut neighbors = vec![NodeId(0); 2 * edges.len()];
        for e in &edges {
            neighbors[fill[e.u.index()]] = e.v;
            fill[e.u.index()] += 1;
            neighbors[fill[e.v.index()]] = e.u;
            fill[e.v.index()] += 1;
        }
        for w in offsets.windows(2) {
            neighbors[w[0]..w[1]].sort_unstable();
        }
        Graph {
            offsets,
            neighbors,
            edges,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges in insertion (first-occurrence) order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    fn check(&self, u: NodeId) -> Result<()> {
        if u.index() < self.num_nodes() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: u,
                num_nodes: self.num_nodes(),
            })
        }
    }

    pub fn degree(&self, u: NodeId) -> Result<usize> {
        self.check(u)?;
        Ok(self.degree_unchecked(u))
    }

    /// Sorted neighbor list of `u`.
    pub fn neighbors(&self, u: NodeId) -> Result<&[NodeId]> {
        self.check(u)?;
        Ok(self.adj(u))
    }

    pub fn common_neighbors(&self, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let mut out = Vec::new();
        merge_intersect(self.adj(u), self.adj(v), |x| out.push(x));
        Ok(out)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> Result<bool> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        // search the shorter list
        let (a, b) = if self.degree_unchecked(u) <= self.degree_unchecked(v) {
            (u, v)
        } else {
            (v, u)
        };
        Ok(self.adj(a).binary_search(&b).is_ok())
    }

    #[inline]
    pub(crate) fn adj(&self, u: NodeId) -> &[NodeId] {
        &self.neighbors[self.offsets[u.index()]..self.offsets[u.index() + 1]]
    }

    #[inline]
    pub(crate) fn degree_unchecked(&self, u: NodeId) -> usize {
        self.offsets[u.index() + 1] - self.offsets[u.index()]
    }

    /// Number of common neighbors of the endpoints of `e`, i.e. the number of
    /// triangles that contain `e`.
    #[inline]
    pub(crate) fn edge_support(&self, e: Edge) -> u64 {
        let mut n = 0u64;
        merge_intersect(self.adj(e.u), self.adj(e.v), |_| n += 1);
        n
    }

    /// Returns a copy of the graph with node ids permuted by `perm`
    /// (`new id = perm[old id]`). Edge order is preserved.
    pub fn relabeled(&self, perm: &[u32]) -> Result<Self> {
        if perm.len() != self.num_nodes() {
            return Err(Error::InvalidSpec(format!(
                "permutation has {} entries for {} nodes",
                perm.len(),
                self.num_nodes()
            )));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            let slot = seen.get_mut(p as usize).ok_or(Error::NodeOutOfRange {
                node: NodeId(p),
                num_nodes: perm.len(),
            })?;
            if std::mem::replace(slot, true) {
                return Err(Error::InvalidSpec(format!("{p} repeated in permutation")));
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(perm[e.u.index()], perm[e.v.index()]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Graph::from_canonical(self.num_nodes(), edges))
    }
}

#[inline]
pub(crate) fn merge_intersect(a: &[NodeId], b: &[NodeId], mut hit: impl FnMut(NodeId)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                hit(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    fn k3() -> Graph {
        Graph::from_pairs(3, [(0u32, 1u32), (1, 2), (2, 0)]).unwrap()
    }

    fn p3() -> Graph {
        Graph::from_pairs(3, [(0u32, 1u32), (1, 2)]).unwrap()
    }

    #[test]
    fn degrees() {
        let g = k3();
        for u in 0..3 {
            assert_eq!(g.degree(n(u)).unwrap(), 2);
        }
        assert_eq!(p3().degree(n(1)).unwrap(), 2);
        let empty = Graph::from_pairs::<_, u32>(2, []).unwrap();
        assert_eq!(empty.degree(n(1)).unwrap(), 0);
        assert!(matches!(
            g.degree(n(3)),
            Err(Error::NodeOutOfRange { num_nodes: 3, .. })
        ));
    }

    #[test]
    fn common_neighbors_small() {
        assert_eq!(k3().common_neighbors(n(0), n(1)).unwrap(), vec![n(2)]);
        assert_eq!(p3().common_neighbors(n(0), n(2)).unwrap(), vec![n(1)]);
        assert!(p3().common_neighbors(n(0), n(1)).unwrap().is_empty());
        assert!(p3().common_neighbors(n(0), n(7)).is_err());
        assert!(p3().common_neighbors(n(1), n(1)).is_err());
    }

    #[test]
    fn has_edge_small() {
        assert!(k3().has_edge(n(0), n(2)).unwrap());
        assert!(!p3().has_edge(n(0), n(2)).unwrap());
        assert!(matches!(k3().has_edge(n(1), n(1)), Err(Error::SelfLoop(_))));
        assert!(k3().has_edge(n(0), n(9)).is_err());
    }

    #[test]
    fn edge_is_canonical() {
        assert_eq!(
            Edge::new(5u32, 2u32).unwrap(),
            Edge::new(2u32, 5u32).unwrap()
        );
        assert_eq!(Edge::new(5u32, 2u32).unwrap().endpoints(), (n(2), n(5)));
        assert!(Edge::new(4u32, 4u32).is_err());
    }

    #[test]
    fn builder_drops_loops_and_duplicates() {
        let mut b = GraphBuilder::new(0);
        assert_eq!(b.add_edge(0u32, 1u32), Insert::Added);
        assert_eq!(b.add_edge(1u32, 0u32), Insert::Duplicate);
        assert_eq!(b.add_edge(2u32, 2u32), Insert::SelfLoop);
        let g = b.build();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.num_edges(), 1);
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..30).prop_flat_map(|nodes| {
            prop::collection::vec((0..nodes as u32, 0..nodes as u32), 0..120)
                .prop_map(move |pairs| Graph::from_pairs(nodes, pairs).unwrap())
        })
    }

    proptest! {
        #[test]
        fn handshake_and_symmetry(g in arb_graph()) {
            let total: usize = (0..g.num_nodes() as u32).map(|u| g.degree(n(u)).unwrap()).sum();
            prop_assert_eq!(total, 2 * g.num_edges());
            for u in 0..g.num_nodes() as u32 {
                for v in 0..g.num_nodes() as u32 {
                    if u == v { continue; }
                    let (a, b) = (n(u), n(v));
                    prop_assert_eq!(g.common_neighbors(a, b).unwrap(), g.common_neighbors(b, a).unwrap());
                    prop_assert_eq!(g.has_edge(a, b).unwrap(), g.neighbors(a).unwrap().contains(&b));
                    prop_assert_eq!(g.has_edge(a, b).unwrap(), g.has_edge(b, a).unwrap());
                }
            }
        }
    }
}
