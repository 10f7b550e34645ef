//! `clustream`: exact and streaming clustering-coefficient estimates for edge
//! lists, plus seeded Monte-Carlo experiments.
//!
//! ```bash
//! clustream exact graph.txt
//! clustream stream graph.txt --p 0.3 --seed 1
//! clustream experiment fig2.toml --out results/
//! clustream report results/report.json --figure fig2
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use clustream_core::harness::{self, ExperimentReport, ExperimentSpec, Figure, OrderMode};
use clustream_core::ingest::{self, IngestReport, ParseOptions};
use clustream_core::{estimators, nes, seed, EstimateReport, ExactStats, NesConfig};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "clustream", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact structural counts and clustering coefficient of an edge list
    Exact {
        input: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
        /// Run the oracle even above its default edge limit
        #[arg(long)]
        allow_huge_oracle: bool,
    },
    /// One sampled pass over an edge list
    Stream {
        input: PathBuf,
        /// Sampling probability in (0, 1]
        #[arg(long, value_parser = parse_p)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep the file's edge order instead of shuffling
        #[arg(long)]
        file_order: bool,
        /// Skip the auxiliary counters (no full RSE or bias estimate)
        #[arg(long)]
        no_aux: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Runs an experiment config (TOML or JSON)
    Experiment {
        config: PathBuf,
        /// Override the config's sampling probabilities
        #[arg(long, value_parser = parse_p)]
        p: Vec<f64>,
        /// Override the config's RSE targets
        #[arg(long, value_parser = parse_target)]
        target_rse: Vec<f64>,
        /// Override the number of runs per point
        #[arg(long, value_parser = parse_runs)]
        runs: Option<usize>,
        /// Override the base seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        file_order: bool,
        #[arg(long)]
        no_aux: bool,
        #[arg(long)]
        allow_huge_oracle: bool,
        /// Directory for report.json, points.csv and the figure CSVs
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summary table or figure data from a saved experiment report
    Report {
        report: PathBuf,
        #[arg(long, value_parser = ["fig2", "fig3", "fig4"])]
        figure: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
struct OutputArgs {
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_p(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    nes::validate_p(p).map_err(|e| e.to_string())?;
    Ok(p)
}

fn parse_target(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t > 0.0 && t < 1.0 {
        Ok(t)
    } else {
        Err(format!("target RSE {t} outside (0, 1)"))
    }
}

fn parse_runs(s: &str) -> Result<usize, String> {
    let k: usize = s.parse().map_err(|e| format!("{e}"))?;
    if k < harness::MIN_RUNS {
        return Err(format!("at least {} runs are needed", harness::MIN_RUNS));
    }
    Ok(k)
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(harness::CACHE_DIR_ENV).map(PathBuf::from)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn csv_rows<const N: usize>(header: [&str; N], record: [String; N]) -> String {
    format!("{}\n{}\n", header.join(","), record.join(","))
}

fn load(input: &Path) -> Result<ingest::Ingested> {
    Ok(ingest::parse_edge_list(input, &ParseOptions::default())?)
}

fn cmd_exact(input: &Path, output: &OutputArgs, allow_huge: bool) -> Result<()> {
    let ingested = load(input)?;
    let stats = harness::cached_exact_stats(&ingested.graph, cache_dir().as_deref(), allow_huge)?;
    let text = match output.format {
        Format::Json => exact_json(
            &stats,
            &ingested.report,
            &harness::graph_hash(&ingested.graph),
        )?,
        Format::Csv => csv_rows(ExactStats::CSV_HEADER, stats.csv_record()),
    };
    emit(&text, output.out.as_deref())
}

fn exact_json(stats: &ExactStats, ingest: &IngestReport, hash: &str) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&json!({
        "stats": stats,
        "ingest": ingest,
        "graph_hash": hash,
    }))?;
    s.push('\n');
    Ok(s)
}

struct StreamArgs<'a> {
    input: &'a Path,
    p: f64,
    seed: u64,
    file_order: bool,
    no_aux: bool,
    output: &'a OutputArgs,
}

fn cmd_stream(a: StreamArgs<'_>) -> Result<()> {
    let ingested = load(a.input)?;
    let g = &ingested.graph;
    // same seeds as run 0 of an experiment with this base seed
    let seeds = seed::run_seeds(a.seed, 0);
    let stream = if a.file_order {
        ingest::file_order_stream(g)?
    } else {
        ingest::shuffle_stream(g, seeds.shuffle)?
    };
    let mut cfg = NesConfig::new(a.p, seeds.sampling)?;
    if a.no_aux {
        cfg = cfg.without_aux();
    }
    let state = nes::run_stream(&stream, cfg)?;
    let report: EstimateReport = estimators::estimate_report(&state.summary())?;
    let text = match a.output.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({
                "estimates": report,
                "n": g.num_nodes(),
                "m": g.num_edges(),
                "order": if a.file_order { "file" } else { "shuffled" },
                "seed": a.seed,
                "shuffle_seed": (!a.file_order).then_some(seeds.shuffle),
                "sampling_seed": seeds.sampling,
                "seed_rule": seed::GENERATOR,
            }))?;
            s.push('\n');
            s
        }
        Format::Csv => csv_rows(EstimateReport::CSV_HEADER, report.csv_record()),
    };
    emit(&text, a.output.out.as_deref())
}

fn summary_table(r: &ExperimentReport) -> String {
    let mut s = format!(
        "{}  N={} M={} C={:.6}  k={}\n{:>10} {:>7} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>6}\n",
        r.name,
        r.stats.n,
        r.stats.m,
        r.stats.c,
        r.k,
        "p",
        "target",
        "rse_obs",
        "rse_est",
        "rse_th",
        "rb_obs",
        "rb_hat",
        "rb_plus",
        "excl"
    );
    let f = |x: Option<f64>| x.map(|v| format!("{v:.5}")).unwrap_or_else(|| "-".into());
    for pt in &r.points {
        s += &format!(
            "{:>10.6} {:>7} {:>9.5} {:>9} {:>9.5} {:>+9.5} {:>9} {:>+9.5} {:>6}\n",
            pt.p,
            pt.target_rse
                .map(|t| t.to_string())
                .unwrap_or_else(|| "-".into()),
            pt.observed_rse,
            f(pt.mean_rse_simple),
            pt.rse_theory,
            pt.observed_rb,
            f(pt.mean_rb_hat),
            pt.observed_rb_plus,
            pt.excluded_runs,
        );
    }
    for fail in &r.failures {
        s += &format!(
            "failed: p={} target={}: {}\n",
            f(fail.p),
            f(fail.target_rse),
            fail.error
        );
    }
    s
}

fn write_experiment(r: &ExperimentReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut json = serde_json::to_string_pretty(r)?;
    json.push('\n');
    emit(&json, Some(&dir.join("report.json")))?;
    emit(&harness::points_csv(r)?, Some(&dir.join("points.csv")))?;
    for (name, fig) in [
        ("fig2", Figure::Fig2),
        ("fig3", Figure::Fig3),
        ("fig4", Figure::Fig4),
    ] {
        emit(
            &harness::emit_fig_data(r, fig)?,
            Some(&dir.join(format!("{name}.csv"))),
        )?;
    }
    Ok(())
}

struct Overrides {
    p: Vec<f64>,
    target_rse: Vec<f64>,
    runs: Option<usize>,
    seed: Option<u64>,
    file_order: bool,
    no_aux: bool,
    allow_huge_oracle: bool,
}

/// Exit code 2 when any grid point failed; the other points are still
/// written.
fn cmd_experiment(config: &Path, o: Overrides, out: Option<&Path>) -> Result<ExitCode> {
    let mut spec = ExperimentSpec::from_path(config)?;
    if !o.p.is_empty() {
        spec.p_grid = o.p;
    }
    if !o.target_rse.is_empty() {
        spec.target_rse = o.target_rse;
    }
    if let Some(k) = o.runs {
        spec.runs = k;
    }
    if let Some(s) = o.seed {
        spec.base_seed = s;
    }
    if o.file_order {
        spec.order_mode = OrderMode::FileOrder;
    }
    spec.track_aux &= !o.no_aux;
    spec.allow_huge_oracle |= o.allow_huge_oracle;
    spec.validate()?;
    let report = harness::run_experiment(&spec, cache_dir().as_deref())?;
    match out {
        Some(dir) => {
            write_experiment(&report, dir)?;
            print!("{}", summary_table(&report));
        }
        None => {
            eprint!("{}", summary_table(&report));
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    if !report.failures.is_empty() {
        eprintln!("error: {} grid point(s) failed", report.failures.len());
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Exact {
            input,
            output,
            allow_huge_oracle,
        } => cmd_exact(&input, &output, allow_huge_oracle)?,
        Command::Stream {
            input,
            p,
            seed,
            file_order,
            no_aux,
            output,
        } => cmd_stream(StreamArgs {
            input: &input,
            p,
            seed,
            file_order,
            no_aux,
            output: &output,
        })?,
        Command::Experiment {
            config,
            p,
            target_rse,
            runs,
            seed,
            file_order,
            no_aux,
            allow_huge_oracle,
            out,
        } => {
            let overrides = Overrides {
                p,
                target_rse,
                runs,
                seed,
                file_order,
                no_aux,
                allow_huge_oracle,
            };
            return cmd_experiment(&config, overrides, out.as_deref());
        }
        Command::Report {
            report,
            figure,
            out,
        } => {
            let text = fs::read_to_string(&report)
                .with_context(|| format!("reading {}", report.display()))?;
            let r: ExperimentReport = serde_json::from_str(&text)
                .with_context(|| format!("{} is not an experiment report", report.display()))?;
            let body = match figure {
                Some(name) => harness::emit_fig_data(&r, name.parse::<Figure>()?)?,
                None => summary_table(&r),
            };
            if body.is_empty() {
                bail!("report has no grid points");
            }
            emit(&body, out.as_deref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
