//! Shared fixtures for the benchmarks.

use clustream_core::{synth, Graph};

/// Clustered heavy-tailed graph of roughly `4 * n` edges.
pub fn clustered(n: usize) -> Graph {
    synth::holme_kim(n, 4, 0.6, 11)
}
