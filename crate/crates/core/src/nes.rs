//! Single-pass naive edge sampling.
//!
//! Each arriving edge `e = (u, v)` is first counted against the sample `g`
//! and only then offered to `g` with probability `p`, so an edge never pairs
//! with itself:
//!
//! 1. every common neighbor `x` of `u` and `v` in `g` closes a triangle whose
//!    two resident edges `(u, x)`, `(x, v)` are in `g` (`Δ_g += 1` each);
//! 2. for each such triangle and each resident `a`, the wedges `(a, y)` with
//!    `y` arriving after `a` but before `e`, minus the triangle's own other
//!    resident, pair with the triangle (`Ω′_g`);
//! 3. each new triangle pairs with every earlier identified triangle on each
//!    of its three edges (`Φ_g`);
//! 4. every edge `f` of `g` adjacent to `e` forms a wedge (`Λ_g += 1`), which
//!    pairs with all earlier wedges through `f` (`Ψ_g`) and with every triangle
//!    in which `f` is resident (`Ω′_g`);
//! 5. residencies of the new triangles are recorded;
//! 6. one uniform draw decides whether `e` joins `g`.
//!
//! Steps 2–5 run only when auxiliary tracking is enabled.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId};
use crate::harness::{run_trials, OrderMode, MIN_RUNS};
use crate::ingest::EdgeStream;
use crate::moments;
use crate::oracle::ExactStats;
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NesConfig {
    pub p: f64,
    pub seed: u64,
    /// Maintain Φ_g, Ψ_g and Ω′_g in addition to Δ_g and Λ_g.
    pub track_aux: bool,
}

impl NesConfig {
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        validate_p(p)?;
        Ok(NesConfig {
            p,
            seed,
            track_aux: true,
        })
    }

    pub fn without_aux(mut self) -> Self {
        self.track_aux = false;
        self
    }
}

pub fn validate_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// The five identification counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NesCounters {
    pub delta_g: u64,
    pub lambda_g: u64,
    pub phi_g: u64,
    pub psi_g: u64,
    pub omega_prime_g: u64,
}

/// End-of-stream summary of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NesSummary {
    #[serde(flatten)]
    pub counters: NesCounters,
    pub sampled_edges: usize,
    pub edges_seen: u64,
    pub p: f64,
    pub seed: u64,
    pub track_aux: bool,
}

/// A sampled edge and its per-edge counters.
#[derive(Clone, Copy, Debug)]
struct Resident {
    edge: Edge,
    label: u64,
    /// later-arriving adjacent edges (c_f)
    partners: u64,
    /// identified triangles in which this edge was a sampled wedge edge (r_f)
    residency: u64,
    /// identified triangles containing this edge (t_e)
    triangles: u64,
}

/// Streaming state for one run. Reusable across runs through [`NesState::reset`].
#[derive(Clone, Debug)]
pub struct NesState {
    cfg: NesConfig,
    rng: ChaCha8Rng,
    counters: NesCounters,
    /// per node: (neighbor, resident slot) for edges in g
    adj: Vec<Vec<(NodeId, u32)>>,
    residents: Vec<Resident>,
    /// t_e for closing edges that were not sampled; such an edge cannot be
    /// part of any later triangle, so its count is final
    closer_only: Vec<(Edge, u64)>,
    mark: Vec<u32>,
    found: Vec<(u32, u32)>,
    last_label: u64,
    edges_seen: u64,
}

impl NesState {
    pub fn new(cfg: NesConfig, num_nodes: usize) -> Result<Self> {
        validate_p(cfg.p)?;
        Ok(NesState {
            cfg,
            rng: seed::rng(cfg.seed),
            counters: NesCounters::default(),
            adj: vec![Vec::new(); num_nodes],
            residents: Vec::new(),
            closer_only: Vec::new(),
            mark: vec![0; num_nodes],
            found: Vec::new(),
            last_label: 0,
            edges_seen: 0,
        })
    }

    /// Clears all state for a new run with `cfg`, keeping allocations.
    pub fn reset(&mut self, cfg: NesConfig) -> Result<()> {
        validate_p(cfg.p)?;
        self.cfg = cfg;
        self.rng = seed::rng(cfg.seed);
        self.counters = NesCounters::default();
        for r in &self.residents {
            let (u, v) = r.edge.endpoints();
            self.adj[u.index()].clear();
            self.adj[v.index()].clear();
        }
        self.residents.clear();
        self.closer_only.clear();
        self.last_label = 0;
        self.edges_seen = 0;
        Ok(())
    }

    pub fn config(&self) -> &NesConfig {
        &self.cfg
    }

    pub fn counters(&self) -> NesCounters {
        self.counters
    }

    pub fn sampled_edges(&self) -> usize {
        self.residents.len()
    }

    pub fn summary(&self) -> NesSummary {
        NesSummary {
            counters: self.counters,
            sampled_edges: self.residents.len(),
            edges_seen: self.edges_seen,
            p: self.cfg.p,
            seed: self.cfg.seed,
            track_aux: self.cfg.track_aux,
        }
    }

    /// Sampled edges with their arrival labels.
    pub fn sample(&self) -> impl Iterator<Item = (u64, Edge)> + '_ {
        self.residents.iter().map(|r| (r.label, r.edge))
    }

    /// `c_f` for every sampled edge.
    pub fn wedge_partner_counts(&self) -> impl Iterator<Item = (Edge, u64)> + '_ {
        self.residents.iter().map(|r| (r.edge, r.partners))
    }

    /// `r_f` for every sampled edge.
    pub fn residency_counts(&self) -> impl Iterator<Item = (Edge, u64)> + '_ {
        self.residents.iter().map(|r| (r.edge, r.residency))
    }

    /// `t_e` for every edge contained in at least one identified triangle.
    pub fn triangle_membership(&self) -> impl Iterator<Item = (Edge, u64)> + '_ {
        self.residents
            .iter()
            .filter(|r| r.triangles > 0)
            .map(|r| (r.edge, r.triangles))
            .chain(self.closer_only.iter().copied())
    }

    pub fn process_edge(&mut self, e: Edge, label: u64) -> Result<()> {
        if label <= self.last_label {
            return Err(Error::LabelOrder {
                previous: self.last_label,
                got: label,
            });
        }
        let (u, v) = e.endpoints();
        for x in [u, v] {
            if x.index() >= self.adj.len() {
                return Err(Error::NodeOutOfRange {
                    node: x,
                    num_nodes: self.adj.len(),
                });
            }
        }
        // mark the smaller sampled neighborhood, scan the other
        let (a, b) = if self.adj[u.index()].len() <= self.adj[v.index()].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.found.clear();
        let mut duplicate = false;
        for &(x, slot) in &self.adj[a.index()] {
            duplicate |= x == b;
            self.mark[x.index()] = slot + 1;
        }
        if !duplicate {
            for &(x, slot_b) in &self.adj[b.index()] {
                let m = self.mark[x.index()];
                if m != 0 {
                    self.found.push((m - 1, slot_b));
                }
            }
        }
        for &(x, _) in &self.adj[a.index()] {
            self.mark[x.index()] = 0;
        }
        if duplicate {
            return Err(Error::DuplicateArrival(u, v));
        }
        self.last_label = label;
        self.edges_seen += 1;

        // (1) closed wedges
        let closed = self.found.len() as u64;
        self.counters.delta_g += closed;

        if self.cfg.track_aux {
            for &(s1, s2) in &self.found {
                let (r1, r2) = (&self.residents[s1 as usize], &self.residents[s2 as usize]);
                // (2) the other resident is among c_a only if it arrived later
                let own1 = u64::from(r2.label > r1.label);
                let own2 = u64::from(r1.label > r2.label);
                self.counters.omega_prime_g += r1.partners - own1 + r2.partners - own2;
            }
            // (3) pairs of identified triangles sharing an edge; triangles
            // found together all share e, whose count starts at zero
            for &(s1, s2) in &self.found {
                for s in [s1, s2] {
                    let r = &mut self.residents[s as usize];
                    self.counters.phi_g += r.triangles;
                    r.triangles += 1;
                }
            }
            self.counters.phi_g += closed * closed.saturating_sub(1) / 2;
        }

        // (4) wedges through sampled edges adjacent to e
        let (du, dv) = (self.adj[u.index()].len(), self.adj[v.index()].len());
        self.counters.lambda_g += (du + dv) as u64;
        if self.cfg.track_aux {
            let adj = &self.adj;
            let residents = &mut self.residents;
            for &(_, slot) in adj[u.index()].iter().chain(&adj[v.index()]) {
                let f = &mut residents[slot as usize];
                self.counters.psi_g += f.partners;
                self.counters.omega_prime_g += f.residency;
                f.partners += 1;
            }
            // (5) residencies
            for &(s1, s2) in &self.found {
                residents[s1 as usize].residency += 1;
                residents[s2 as usize].residency += 1;
            }
        }

        // (6) sampling, one draw per arriving edge
        let keep = self.rng.random::<f64>() < self.cfg.p;
        if keep {
            let slot = self.residents.len() as u32;
            self.residents.push(Resident {
                edge: e,
                label,
                partners: 0,
                residency: 0,
                triangles: if self.cfg.track_aux { closed } else { 0 },
            });
            self.adj[u.index()].push((v, slot));
            self.adj[v.index()].push((u, slot));
        } else if self.cfg.track_aux && closed > 0 {
            self.closer_only.push((e, closed));
        }
        Ok(())
    }

    /// Feeds a whole stream into this state.
    pub fn consume(&mut self, stream: &EdgeStream<'_>) -> Result<()> {
        for (label, e) in stream.iter() {
            self.process_edge(e, label)?;
        }
        Ok(())
    }
}

/// Runs a fresh state over `stream`; deterministic in `(stream, cfg.seed)`.
pub fn run_stream(stream: &EdgeStream<'_>, cfg: NesConfig) -> Result<NesState> {
    let mut state = NesState::new(cfg, stream.graph().num_nodes())?;
    state.consume(stream)?;
    Ok(state)
}

/// Observed mean of one counter against its expectation under NES.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterCheck {
    pub counter: String,
    pub mean: f64,
    pub expected: f64,
    /// Monte-Carlo standard error of `mean`.
    pub std_error: f64,
    /// `(mean − expected) / std_error`; 0 when both the gap and the error
    /// vanish.
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxCheckReport {
    pub p: f64,
    pub runs: usize,
    pub base_seed: u64,
    pub checks: Vec<CounterCheck>,
}

impl AuxCheckReport {
    pub fn get(&self, counter: &str) -> Option<&CounterCheck> {
        self.checks.iter().find(|c| c.counter == counter)
    }
}

/// Means of all five counters over `runs` shuffled passes, seeded from
/// `cfg.seed`, against `E(Δ_g) = Δp²/3`, `E(Λ_g) = Λp`,
/// `E(Φ_g) = 8Φp³/15`, `E(Ψ_g) = Ψp/3` and `E(Ω′_g) = 5Ω′p²/12`.
///
/// The Φ expectation is leading order only: pairs whose four edges all get
/// sampled add a further `O(p)` relative share.
pub fn aux_expectations_check(
    g: &Graph,
    stats: &ExactStats,
    cfg: NesConfig,
    runs: usize,
) -> Result<AuxCheckReport> {
    if runs < MIN_RUNS {
        return Err(Error::InvalidSpec(format!(
            "runs = {runs} but a mean test needs at least {MIN_RUNS}"
        )));
    }
    let p = cfg.p;
    let trials = run_trials(g, p, runs, cfg.seed, OrderMode::Shuffled, true)?;
    let column = |f: fn(&NesCounters) -> u64| -> Vec<f64> {
        trials.iter().map(|t| f(&t.counters) as f64).collect()
    };
    let expected = [
        (
            "delta_g",
            stats.delta as f64 * p * p / 3.0,
            column(|c| c.delta_g),
        ),
        ("lambda_g", stats.lambda as f64 * p, column(|c| c.lambda_g)),
        (
            "phi_g",
            stats.phi as f64 * 8.0 / 15.0 * p.powi(3),
            column(|c| c.phi_g),
        ),
        ("psi_g", stats.psi as f64 * p / 3.0, column(|c| c.psi_g)),
        (
            "omega_prime_g",
            stats.omega_prime as f64 * 5.0 / 12.0 * p * p,
            column(|c| c.omega_prime_g),
        ),
    ];
    let checks = expected
        .into_iter()
        .map(|(counter, expected, xs)| {
            let mean = moments::mean(&xs);
            let std_error = moments::std_error(&xs);
            let gap = mean - expected;
            let z = if gap == 0.0 { 0.0 } else { gap / std_error };
            CounterCheck {
                counter: counter.to_string(),
                mean,
                expected,
                std_error,
                z,
            }
        })
        .collect();
    Ok(AuxCheckReport {
        p,
        runs,
        base_seed: cfg.seed,
        checks,
    })
}
