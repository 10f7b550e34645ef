//! Edge-list ingestion and stream construction.
//!
//! Input is plain text with one edge per line: two unsigned integers
//! separated by ASCII whitespace. Lines starting with `#` or `%` are
//! comments (SNAP and KONECT headers). Extra columns, such as KONECT
//! weights or timestamps, are ignored unless [`ParseOptions::strict_columns`]
//! is set. Self-loops are dropped, direction is ignored and repeated edges
//! keep their first occurrence.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use rand::Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, GraphBuilder, Insert, NodeId};
use crate::seed;

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Reject lines with more than two tokens.
    pub strict_columns: bool,
}

/// Line accounting for one parsed file.
///
/// `m = lines_read - comment_lines - self_loops_dropped - duplicates_dropped`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub lines_read: u64,
    pub comment_lines: u64,
    pub self_loops_dropped: u64,
    pub duplicates_dropped: u64,
    pub n: usize,
    pub m: usize,
}

/// A parsed graph together with the original node labels
/// (`labels[dense id] = id in the file`).
#[derive(Clone, Debug)]
pub struct Ingested {
    pub graph: Graph,
    pub labels: Vec<u64>,
    pub report: IngestReport,
}

pub fn parse_edge_list(path: impl AsRef<Path>, opts: &ParseOptions) -> Result<Ingested> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list_from(BufReader::new(file), path, opts)
}

/// Parses from any reader; `origin` is only used in error messages.
pub fn parse_edge_list_from<R: Read>(
    reader: R,
    origin: impl Into<PathBuf>,
    opts: &ParseOptions,
) -> Result<Ingested> {
    let origin = origin.into();
    let mut reader = BufReader::new(reader);
    let mut builder = GraphBuilder::new(0);
    let mut ids: FxHashMap<u64, u32> = FxHashMap::default();
    let mut labels: Vec<u64> = Vec::new();
    let mut report = IngestReport::default();
    let mut line = String::new();
    let mut lineno = 0usize;

    let mut dense = |label: u64, labels: &mut Vec<u64>| -> u32 {
        *ids.entry(label).or_insert_with(|| {
            labels.push(label);
            (labels.len() - 1) as u32
        })
    };

    loop {
        line.clear();
        let read = reader
            .read_line(&mut line)
            .map_err(|e| Error::io(&origin, e))?;
        if read == 0 {
            break;
        }
        lineno += 1;
        report.lines_read += 1;
        let trimmed = line.trim_ascii_start();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            report.comment_lines += 1;
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: origin.clone(),
            line: lineno,
            message,
        };
        let mut tokens = trimmed.split_ascii_whitespace();
        let mut endpoint = || -> Result<u64> {
            let tok = tokens
                .next()
                .ok_or_else(|| parse_err("expected two node ids".into()))?;
            tok.parse::<u64>()
                .map_err(|_| parse_err(format!("invalid node id {tok:?}")))
        };
        let a = endpoint()?;
        let b = endpoint()?;
        if opts.strict_columns && tokens.next().is_some() {
            return Err(parse_err("more than two columns".into()));
        }
        let (a, b) = (dense(a, &mut labels), dense(b, &mut labels));
        match builder.add_edge(a, b) {
            Insert::Added => {}
            Insert::SelfLoop => report.self_loops_dropped += 1,
            Insert::Duplicate => report.duplicates_dropped += 1,
        }
    }

    if builder.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let graph = builder.build();
    report.n = graph.num_nodes();
    report.m = graph.num_edges();
    Ok(Ingested {
        graph,
        labels,
        report,
    })
}

/// An ordering of a graph's edges. Position `i` (0-based) carries arrival
/// label `i + 1`. The stream is a permutation of edge indices over the
/// borrowed graph rather than a copy of the edges.
#[derive(Clone, Debug)]
pub struct EdgeStream<'g> {
    graph: &'g Graph,
    order: Vec<u32>,
    seed: Option<u64>,
}

impl<'g> EdgeStream<'g> {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Shuffle seed, or `None` for file order.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// `(arrival label, edge)` pairs in arrival order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (u64, Edge)> + '_ {
        let edges = self.graph.edges();
        self.order
            .iter()
            .enumerate()
            .map(move |(i, &idx)| (i as u64 + 1, edges[idx as usize]))
    }

    /// Reorders the stream in place with a fresh shuffle, reusing the buffer.
    pub fn reshuffle(&mut self, seed: u64) {
        for (i, slot) in self.order.iter_mut().enumerate() {
            *slot = i as u32;
        }
        fisher_yates(&mut self.order, seed);
        self.seed = Some(seed);
    }
}

fn check_nonempty(g: &Graph) -> Result<()> {
    if g.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.num_edges() > u32::MAX as usize {
        return Err(Error::InvalidSpec("more than 2^32 - 1 edges".into()));
    }
    Ok(())
}

/// Uniformly random edge order, a pure function of `(g, seed)`.
pub fn shuffle_stream(g: &Graph, seed: u64) -> Result<EdgeStream<'_>> {
    check_nonempty(g)?;
    let mut order: Vec<u32> = (0..g.num_edges() as u32).collect();
    fisher_yates(&mut order, seed);
    Ok(EdgeStream {
        graph: g,
        order,
        seed: Some(seed),
    })
}

/// Edges in first-occurrence order from the source file.
pub fn file_order_stream(g: &Graph) -> Result<EdgeStream<'_>> {
    check_nonempty(g)?;
    Ok(EdgeStream {
        graph: g,
        order: (0..g.num_edges() as u32).collect(),
        seed: None,
    })
}

/// Durstenfeld's Fisher–Yates, walking down from the last slot.
fn fisher_yates(order: &mut [u32], seed: u64) {
    let mut rng = seed::rng(seed);
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
}

impl NodeId {
    /// Original label of this node in an ingested file.
    pub fn label(self, labels: &[u64]) -> Option<u64> {
        labels.get(self.index()).copied()
    }
}
