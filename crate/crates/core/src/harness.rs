//! Monte-Carlo experiments: `k` independent runs per sampling probability,
//! compared against the oracle.
//!
//! Run `i` uses the seeds from [`seed::run_seeds`]`(base_seed, i)`, so any
//! run can be replayed alone, and per-run results are reduced in run order,
//! so the report does not depend on how runs were scheduled.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimators::{self, EstimateReport};
use crate::graph::Graph;
use crate::ingest::{self, ParseOptions};
use crate::moments::{mean, sample_std};
use crate::nes::{validate_p, NesConfig, NesCounters, NesState};
use crate::oracle::{self, ExactStats};
use crate::seed::{self, RunSeeds};
use crate::synth;
use crate::theory;

/// Fewer runs than this cannot support a mean or spread estimate.
pub const MIN_RUNS: usize = 30;

/// Environment variable naming the oracle cache directory.
pub const CACHE_DIR_ENV: &str = "CLUSTREAM_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSource {
    File {
        path: PathBuf,
    },
    ErdosRenyi {
        n: usize,
        p: f64,
        seed: u64,
    },
    HolmeKim {
        n: usize,
        m: usize,
        triad_p: f64,
        seed: u64,
    },
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph> {
        match self {
            GraphSource::File { path } => {
                Ok(ingest::parse_edge_list(path, &ParseOptions::default())?.graph)
            }
            GraphSource::ErdosRenyi { n, p, seed } => Ok(synth::erdos_renyi(*n, *p, *seed)),
            GraphSource::HolmeKim {
                n,
                m,
                triad_p,
                seed,
            } => {
                if *m == 0 || *m >= *n {
                    return Err(Error::InvalidSpec(format!(
                        "holme_kim needs 1 <= m < n (m = {m}, n = {n})"
                    )));
                }
                Ok(synth::holme_kim(*n, *m, *triad_p, *seed))
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GraphSource::File { path } => path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            GraphSource::ErdosRenyi { n, p, seed } => format!("G({n},{p})#{seed}"),
            GraphSource::HolmeKim {
                n,
                m,
                triad_p,
                seed,
            } => format!("HK({n},{m},{triad_p})#{seed}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderMode {
    /// A fresh uniformly random edge order for every run.
    #[default]
    Shuffled,
    /// The file order for every run; only the sampling varies.
    FileOrder,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub graph: GraphSource,
    /// Explicit sampling probabilities.
    #[serde(default)]
    pub p_grid: Vec<f64>,
    /// Target RSEs; each is turned into a probability with
    /// [`solve_p_for_target_rse`].
    #[serde(default)]
    pub target_rse: Vec<f64>,
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub order_mode: OrderMode,
    #[serde(default = "default_true")]
    pub track_aux: bool,
    #[serde(default)]
    pub allow_huge_oracle: bool,
}

impl ExperimentSpec {
    /// Reads a `.toml` or `.json` config. Relative graph paths are resolved
    /// against the config file's directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec: ExperimentSpec = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text)?,
            _ => toml::from_str(&text)?,
        };
        if let GraphSource::File { path: g } = &mut spec.graph {
            if g.is_relative() {
                if let Some(dir) = path.parent() {
                    *g = dir.join(&*g);
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < MIN_RUNS {
            return Err(Error::InvalidSpec(format!(
                "runs = {} but at least {MIN_RUNS} are needed",
                self.runs
            )));
        }
        if self.p_grid.is_empty() && self.target_rse.is_empty() {
            return Err(Error::InvalidSpec(
                "give p_grid or target_rse (or both)".into(),
            ));
        }
        for &p in &self.p_grid {
            validate_p(p)?;
        }
        for &t in &self.target_rse {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidSpec(format!("target RSE {t} outside (0, 1)")));
            }
        }
        Ok(())
    }
}

/// Counters of one run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub run: u64,
    pub seeds: TrialSeeds,
    pub counters: NesCounters,
    pub sampled_edges: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSeeds {
    /// `None` in file-order mode.
    pub shuffle: Option<u64>,
    pub sampling: u64,
}

impl Trial {
    pub fn estimates(&self, p: f64, track_aux: bool) -> Result<EstimateReport> {
        estimators::estimate_report(&crate::nes::NesSummary {
            counters: self.counters,
            sampled_edges: self.sampled_edges,
            edges_seen: 0,
            p,
            seed: self.seeds.sampling,
            track_aux,
        })
    }
}

/// Runs `runs` independent passes at probability `p`. Results are in run
/// order regardless of the thread count.
pub fn run_trials(
    g: &Graph,
    p: f64,
    runs: usize,
    base_seed: u64,
    order: OrderMode,
    track_aux: bool,
) -> Result<Vec<Trial>> {
    validate_p(p)?;
    let base_stream = ingest::file_order_stream(g)?;
    (0..runs as u64)
        .into_par_iter()
        .map_init(
            || (base_stream.clone(), None::<NesState>),
            |(stream, state), run| {
                let RunSeeds { shuffle, sampling } = seed::run_seeds(base_seed, run);
                let shuffle = match order {
                    OrderMode::Shuffled => {
                        stream.reshuffle(shuffle);
                        Some(shuffle)
                    }
                    OrderMode::FileOrder => None,
                };
                let cfg = NesConfig {
                    p,
                    seed: sampling,
                    track_aux,
                };
                let st = match state {
                    Some(st) => {
                        st.reset(cfg)?;
                        st
                    }
                    None => state.insert(NesState::new(cfg, g.num_nodes())?),
                };
                st.consume(stream)?;
                Ok(Trial {
                    run,
                    seeds: TrialSeeds { shuffle, sampling },
                    counters: st.counters(),
                    sampled_edges: st.sampled_edges(),
                })
            },
        )
        .collect()
}

/// Smallest `p` in (0, 1] whose predicted RSE is at most `target`.
///
/// The predicted RSE is not monotone in general (a large Ω′ term can make
/// it rise again), so a log-spaced scan finds the first crossing before
/// bisection refines it to 1e-6 relative.
pub fn solve_p_for_target_rse(stats: &ExactStats, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "target RSE {target} outside (0, 1)"
        )));
    }
    let rse = |p: f64| theory::rse_theory(stats, p).map(|r| r.value);
    let at_one = rse(1.0)?;
    const STEPS: usize = 400;
    const LOW: f64 = 1e-12;
    let grid = |i: usize| LOW * (1.0 / LOW).powf(i as f64 / STEPS as f64);
    let mut lo = LOW;
    let mut hi = None;
    for i in 0..=STEPS {
        let p = grid(i).min(1.0);
        if rse(p)? <= target {
            hi = Some(p);
            break;
        }
        lo = p;
    }
    let Some(mut hi) = hi else {
        return Err(Error::UnreachableTarget { target, at_one });
    };
    if hi == LOW {
        return Ok(hi);
    }
    while (hi - lo) > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if rse(mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Aggregates at one sampling probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub p: f64,
    /// The RSE target this `p` was solved from, if any.
    pub target_rse: Option<f64>,
    pub rse_theory: f64,
    pub rb_theory: f64,
    pub k: usize,
    /// Runs with Λ_g > 0 (Ĉ defined); the rest are excluded.
    pub valid_runs: usize,
    pub excluded_runs: usize,
    /// `std(Ĉ) / C`.
    pub observed_rse: f64,
    /// `(mean(Ĉ) − C) / C`.
    pub observed_rb: f64,
    /// Monte-Carlo standard error of `observed_rb`.
    pub observed_rb_se: f64,
    /// `(mean(Ĉ⁺) − C) / C`.
    pub observed_rb_plus: f64,
    pub observed_rb_plus_se: f64,
    /// Mean of `Δ_g^{-1/2}` over runs with Δ_g > 0.
    pub mean_rse_simple: Option<f64>,
    pub mean_rse_full: Option<f64>,
    pub mean_rb_hat: Option<f64>,
    /// Runs where R̂B was defined.
    pub rb_hat_runs: usize,
    /// Runs whose full RSE bracket was negative.
    pub fallback_count: usize,
    /// Runs where Ĉ⁺ fell back to Ĉ.
    pub correction_skipped: usize,
    pub mean_c_hat: f64,
    pub mean_c_hat_plus: f64,
    pub mean_delta_hat: f64,
    pub mean_lambda_hat: f64,
    pub mean_sampled_edges: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub p: Option<f64>,
    pub target_rse: Option<f64>,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub graph: String,
    pub graph_hash: String,
    pub stats: ExactStats,
    pub k: usize,
    pub base_seed: u64,
    pub seed_rule: String,
    pub order_mode: OrderMode,
    pub track_aux: bool,
    pub points: Vec<PointReport>,
    pub failures: Vec<PointFailure>,
}

/// Aggregates trials against the exact clustering coefficient.
pub fn summarize(
    trials: &[Trial],
    p: f64,
    stats: &ExactStats,
    track_aux: bool,
    target_rse: Option<f64>,
) -> Result<PointReport> {
    let estimates: Vec<EstimateReport> = trials
        .iter()
        .filter_map(|t| t.estimates(p, track_aux).ok())
        .collect();
    if estimates.is_empty() {
        return Err(Error::SampleTooSmall("every run had Λ_g = 0"));
    }
    let c = stats.c;
    let n = estimates.len() as f64;
    let col = |f: &dyn Fn(&EstimateReport) -> f64| estimates.iter().map(f).collect::<Vec<_>>();
    let opt_col = |f: &dyn Fn(&EstimateReport) -> Option<f64>| {
        estimates.iter().filter_map(f).collect::<Vec<_>>()
    };
    let c_hat = col(&|e| e.c_hat);
    let c_plus = col(&|e| e.c_hat_plus);
    let rse_simple = opt_col(&|e| e.rse_simple);
    let rse_full = opt_col(&|e| e.rse_full);
    let rb_hat = opt_col(&|e| e.rb_hat);
    let nonempty_mean = |xs: &[f64]| (!xs.is_empty()).then(|| mean(xs));
    let theory = theory::rse_theory(stats, p)?;
    Ok(PointReport {
        p,
        target_rse,
        rse_theory: theory.value,
        rb_theory: theory::rb_theory(stats, p)?,
        k: trials.len(),
        valid_runs: estimates.len(),
        excluded_runs: trials.len() - estimates.len(),
        observed_rse: sample_std(&c_hat) / c,
        observed_rb: (mean(&c_hat) - c) / c,
        observed_rb_se: sample_std(&c_hat) / c / n.sqrt(),
        observed_rb_plus: (mean(&c_plus) - c) / c,
        observed_rb_plus_se: sample_std(&c_plus) / c / n.sqrt(),
        mean_rse_simple: nonempty_mean(&rse_simple),
        mean_rse_full: nonempty_mean(&rse_full),
        mean_rb_hat: nonempty_mean(&rb_hat),
        rb_hat_runs: rb_hat.len(),
        fallback_count: estimates.iter().filter(|e| e.flags.rse_fallback).count(),
        correction_skipped: estimates
            .iter()
            .filter(|e| e.flags.correction_skipped)
            .count(),
        mean_c_hat: mean(&c_hat),
        mean_c_hat_plus: mean(&c_plus),
        mean_delta_hat: mean(&col(&|e| e.delta_hat)),
        mean_lambda_hat: mean(&col(&|e| e.lambda_hat)),
        mean_sampled_edges: mean(&col(&|e| e.sampled_edges as f64)),
    })
}

/// Hex SHA-256 over the node count and the canonical edge list.
pub fn graph_hash(g: &Graph) -> String {
    let mut h = Sha256::new();
    h.update((g.num_nodes() as u64).to_le_bytes());
    for e in g.edges() {
        h.update(e.u().0.to_le_bytes());
        h.update(e.v().0.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Oracle statistics, read from or written to `cache_dir/<hash>.json`.
pub fn cached_exact_stats(
    g: &Graph,
    cache_dir: Option<&Path>,
    allow_huge: bool,
) -> Result<ExactStats> {
    let Some(dir) = cache_dir else {
        return oracle::exact_stats_guarded(g, allow_huge);
    };
    let file = dir.join(format!("{}.json", graph_hash(g)));
    if let Ok(text) = fs::read_to_string(&file) {
        if let Ok(stats) = serde_json::from_str::<ExactStats>(&text) {
            return Ok(stats);
        }
    }
    let stats = oracle::exact_stats_guarded(g, allow_huge)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tmp = file.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec_pretty(&stats)?).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, &file).map_err(|e| Error::io(&file, e))?;
    Ok(stats)
}

/// Runs every grid point of `spec`. Grid points that fail are recorded in
/// `failures`; the others are still reported.
pub fn run_experiment(spec: &ExperimentSpec, cache_dir: Option<&Path>) -> Result<ExperimentReport> {
    spec.validate()?;
    let g = spec.graph.load()?;
    let stats = cached_exact_stats(&g, cache_dir, spec.allow_huge_oracle)?;
    run_experiment_on(spec, &g, stats)
}

/// [`run_experiment`] on an already loaded graph with known statistics.
pub fn run_experiment_on(
    spec: &ExperimentSpec,
    g: &Graph,
    stats: ExactStats,
) -> Result<ExperimentReport> {
    spec.validate()?;
    let mut grid: Vec<(f64, Option<f64>)> = spec.p_grid.iter().map(|&p| (p, None)).collect();
    let mut failures = Vec::new();
    for &t in &spec.target_rse {
        match solve_p_for_target_rse(&stats, t) {
            Ok(p) => grid.push((p, Some(t))),
            Err(e) => failures.push(PointFailure {
                p: None,
                target_rse: Some(t),
                error: e.to_string(),
            }),
        }
    }
    let mut points = Vec::new();
    for (p, target) in grid {
        let outcome = run_trials(
            g,
            p,
            spec.runs,
            spec.base_seed,
            spec.order_mode,
            spec.track_aux,
        )
        .and_then(|trials| summarize(&trials, p, &stats, spec.track_aux, target));
        match outcome {
            Ok(point) => points.push(point),
            Err(e) => failures.push(PointFailure {
                p: Some(p),
                target_rse: target,
                error: e.to_string(),
            }),
        }
    }
    let graph = spec.graph.describe();
    Ok(ExperimentReport {
        name: spec.name.clone().unwrap_or_else(|| graph.clone()),
        graph,
        graph_hash: graph_hash(g),
        stats,
        k: spec.runs,
        base_seed: spec.base_seed,
        seed_rule: seed::GENERATOR.to_string(),
        order_mode: spec.order_mode,
        track_aux: spec.track_aux,
        points,
        failures,
    })
}

/// One CSV row per grid point, every [`PointReport`] field as a column.
pub fn points_csv(report: &ExperimentReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for pt in &report.points {
        w.serialize(pt)?;
    }
    if report.points.is_empty() {
        return Ok(String::new());
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io("<csv buffer>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    /// Observed RSE of Ĉ against the simple and full estimates.
    Fig2,
    /// Observed relative bias of Ĉ against R̂B.
    Fig3,
    /// Observed relative bias of Ĉ against that of Ĉ⁺.
    Fig4,
}

impl std::str::FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            other => Err(Error::InvalidSpec(format!("unknown figure {other:?}"))),
        }
    }
}

/// Long-format CSV (`graph,p,series,metric,value`) for plotting.
pub fn emit_fig_data(report: &ExperimentReport, fig: Figure) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["graph", "p", "series", "metric", "value"])?;
    for pt in &report.points {
        let rows: Vec<(&str, &str, Option<f64>)> = match fig {
            Figure::Fig2 => vec![
                ("observed", "rse", Some(pt.observed_rse)),
                ("estimated", "rse", pt.mean_rse_simple),
                ("estimated_full", "rse", pt.mean_rse_full),
            ],
            Figure::Fig3 => vec![
                ("observed", "rb", Some(pt.observed_rb)),
                ("estimated", "rb", pt.mean_rb_hat),
            ],
            Figure::Fig4 => vec![
                ("observed", "rb", Some(pt.observed_rb)),
                ("corrected", "rb", Some(pt.observed_rb_plus)),
            ],
        };
        for (series, metric, value) in rows {
            let Some(value) = value else { continue };
            w.write_record([
                report.graph.as_str(),
                &pt.p.to_string(),
                series,
                metric,
                &value.to_string(),
            ])?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io("<csv buffer>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
