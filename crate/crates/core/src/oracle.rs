//! Exact structural counts of a graph.
//!
//! Everything is derived from two per-edge quantities: `t_e`, the number of
//! triangles containing edge `e` (edge-iterator intersection of the endpoint
//! neighborhoods), and `w_e = deg(u) + deg(v) - 2`, the number of wedges
//! containing `e = (u, v)`.
//!
//! | quantity | meaning | formula |
//! |---|---|---|
//! | Λ | wedges | Σ_v C(deg v, 2) |
//! | Δ | closed wedges (3 per triangle) | Σ_e t_e |
//! | Φ | unordered triangle pairs sharing an edge | Σ_e C(t_e, 2) |
//! | Ψ | unordered wedge pairs sharing an edge | Σ_e C(w_e, 2) |
//! | Ω | ordered (wedge, closed wedge) incidences on a shared edge | Σ_e w_e · 2 t_e |
//! | Ω′ | unordered {wedge, triangle} pairs sharing exactly one edge | Σ_e t_e (w_e − 2) |
//!
//! Two distinct triangles share at most one edge and two distinct wedges
//! share at most one edge, so each pair is counted on exactly one edge.
//! For Ω′ the two wedges of a triangle that contain `e` are excluded from
//! `w_e`; with Ω as above this gives `Ω′ = (Ω − 4Δ) / 2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Oracle runs on graphs above this many edges need an explicit override.
pub const DEFAULT_ORACLE_EDGE_LIMIT: usize = 5_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactStats {
    pub n: usize,
    pub m: usize,
    /// Closed wedges (three per triangle).
    pub delta: u64,
    /// Wedges.
    pub lambda: u64,
    /// Global clustering coefficient Δ/Λ.
    pub c: f64,
    pub phi: u64,
    pub psi: u64,
    pub omega: u64,
    pub omega_prime: u64,
}

impl ExactStats {
    pub fn triangles(&self) -> u64 {
        self.delta / 3
    }

    pub const CSV_HEADER: [&'static str; 8] =
        ["N", "M", "C", "Delta", "Lambda", "Phi", "Psi", "OmegaPrime"];

    pub fn csv_record(&self) -> [String; 8] {
        [
            self.n.to_string(),
            self.m.to_string(),
            self.c.to_string(),
            self.delta.to_string(),
            self.lambda.to_string(),
            self.phi.to_string(),
            self.psi.to_string(),
            self.omega_prime.to_string(),
        ]
    }
}

fn choose2(x: u64) -> u128 {
    let x = u128::from(x);
    x * x.saturating_sub(1) / 2
}

fn narrow(x: u128, what: &'static str) -> Result<u64> {
    u64::try_from(x).map_err(|_| Error::Overflow(what))
}

/// Triangles through each edge, indexed like `g.edges()`.
pub fn edge_triangle_counts(g: &Graph) -> Vec<u64> {
    g.edges().par_iter().map(|&e| g.edge_support(e)).collect()
}

fn edge_wedges(g: &Graph, idx: usize) -> u64 {
    let (u, v) = g.edges()[idx].endpoints();
    (g.degree_unchecked(u) + g.degree_unchecked(v) - 2) as u64
}

pub fn count_wedges(g: &Graph) -> Result<u64> {
    let total: u128 = (0..g.num_nodes() as u32)
        .map(|u| choose2(g.degree_unchecked(NodeId(u)) as u64))
        .sum();
    narrow(total, "Lambda")
}

pub fn count_closed_wedges(g: &Graph) -> Result<u64> {
    let per_edge = edge_triangle_counts(g);
    closed_wedges_from(&per_edge)
}

fn closed_wedges_from(per_edge: &[u64]) -> Result<u64> {
    // each triangle is seen once from each of its three edges
    let sum: u128 = per_edge.iter().map(|&t| u128::from(t)).sum();
    debug_assert_eq!(sum % 3, 0);
    narrow(sum, "Delta")
}

pub fn clustering_coefficient(delta: u64, lambda: u64) -> Result<f64> {
    if lambda == 0 {
        return Err(Error::UndefinedClustering);
    }
    Ok(delta as f64 / lambda as f64)
}

pub fn count_phi(g: &Graph) -> Result<u64> {
    phi_from(&edge_triangle_counts(g))
}

fn phi_from(per_edge: &[u64]) -> Result<u64> {
    narrow(per_edge.par_iter().map(|&t| choose2(t)).sum(), "Phi")
}

pub fn count_psi(g: &Graph) -> Result<u64> {
    let total: u128 = (0..g.num_edges())
        .into_par_iter()
        .map(|i| choose2(edge_wedges(g, i)))
        .sum();
    narrow(total, "Psi")
}

/// Returns `(Ω, Ω′)`.
pub fn count_omega_prime(g: &Graph) -> Result<(u64, u64)> {
    omega_from(g, &edge_triangle_counts(g))
}

fn omega_from(g: &Graph, per_edge: &[u64]) -> Result<(u64, u64)> {
    let (omega, prime): (u128, u128) = per_edge
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            let w = u128::from(edge_wedges(g, i));
            let t = u128::from(t);
            // t > 0 implies both endpoints have degree >= 2, so w >= 2
            (2 * t * w, t * w.saturating_sub(2))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok((narrow(omega, "Omega")?, narrow(prime, "OmegaPrime")?))
}

/// All structural quantities in one pass over the per-edge triangle counts.
pub fn exact_stats(g: &Graph) -> Result<ExactStats> {
    let per_edge = edge_triangle_counts(g);
    let lambda = count_wedges(g)?;
    let delta = closed_wedges_from(&per_edge)?;
    let (omega, omega_prime) = omega_from(g, &per_edge)?;
    let stats = ExactStats {
        n: g.num_nodes(),
        m: g.num_edges(),
        delta,
        lambda,
        c: clustering_coefficient(delta, lambda)?,
        phi: phi_from(&per_edge)?,
        psi: count_psi(g)?,
        omega,
        omega_prime,
    };
    debug_assert_eq!(
        2 * u128::from(stats.omega_prime),
        u128::from(stats.omega) - 4 * u128::from(stats.delta)
    );
    Ok(stats)
}

/// [`exact_stats`] with a size guard for graphs where the oracle takes hours.
pub fn exact_stats_guarded(g: &Graph, allow_huge: bool) -> Result<ExactStats> {
    if !allow_huge && g.num_edges() > DEFAULT_ORACLE_EDGE_LIMIT {
        return Err(Error::OracleTooLarge {
            edges: g.num_edges(),
            limit: DEFAULT_ORACLE_EDGE_LIMIT,
        });
    }
    exact_stats(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, pairs: &[(u32, u32)]) -> Graph {
        Graph::from_pairs(n, pairs.iter().copied()).unwrap()
    }

    fn complete(n: u32) -> Graph {
        let pairs: Vec<_> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        graph(n as usize, &pairs)
    }

    #[test]
    fn triangle() {
        let s = exact_stats(&complete(3)).unwrap();
        assert_eq!(
            (s.delta, s.lambda, s.phi, s.psi, s.omega_prime),
            (3, 3, 0, 3, 0)
        );
        assert_eq!(s.c, 1.0);
        assert_eq!(s.triangles(), 1);
    }

    #[test]
    fn path() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(count_wedges(&g).unwrap(), 1);
        assert_eq!(count_closed_wedges(&g).unwrap(), 0);
        assert_eq!(count_psi(&g).unwrap(), 0);
        assert_eq!(count_phi(&g).unwrap(), 0);
        assert_eq!(count_omega_prime(&g).unwrap().1, 0);
        assert_eq!(exact_stats(&g).unwrap().c, 0.0);
    }

    #[test]
    fn k4() {
        // 4 triangles, every pair shares exactly one edge: Φ = C(4,2) = 6.
        // Each triangle edge has deg 3 endpoints, so 2 outside wedges:
        // Ω′ = 4 triangles × 3 edges × 2 = 24. Ψ = 6 edges × C(4,2) = 36.
        let s = exact_stats(&complete(4)).unwrap();
        assert_eq!(s.delta, 12);
        assert_eq!(s.lambda, 12);
        assert_eq!(s.phi, 6);
        assert_eq!(s.psi, 36);
        assert_eq!(s.omega_prime, 24);
        assert_eq!(s.omega, 6 * 4 * 2 * 2);
    }

    #[test]
    fn no_wedges_means_undefined_c() {
        let g = graph(4, &[(0, 1), (2, 3)]);
        assert!(matches!(exact_stats(&g), Err(Error::UndefinedClustering)));
        assert!(matches!(
            clustering_coefficient(0, 0),
            Err(Error::UndefinedClustering)
        ));
    }

    #[test]
    fn guard_refuses_large_graphs_only_without_override() {
        let g = complete(3);
        assert!(exact_stats_guarded(&g, false).is_ok());
    }

    #[test]
    fn csv_columns() {
        let s = exact_stats(&complete(3)).unwrap();
        assert_eq!(s.csv_record(), ["3", "3", "1", "3", "3", "0", "3", "0"]);
    }
}
