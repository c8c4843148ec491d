use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use taxoclust::export::metrics_csv;
use taxoclust::pipeline::OutputPaths;
use taxoclust::{AlphaGrid, InputFormat, PipelineConfig, RecallDenominator};

/// Induce a hierarchy of subject clusters from a knowledge graph.
#[derive(Parser, Debug)]
#[command(name = "taxoclust", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the pipeline at one alpha and write the hierarchy artifacts.
    Induce {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        artifacts: ArtifactArgs,
        #[arg(long)]
        alpha: f64,
    },
    /// Run the pipeline at one alpha and report the F1 metrics.
    Evaluate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        artifacts: ArtifactArgs,
        #[command(flatten)]
        metrics: MetricArgs,
        #[arg(long)]
        alpha: f64,
    },
    /// Run the pipeline over a grid of alpha values.
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        metrics: MetricArgs,
        #[arg(long, default_value_t = 0.05)]
        alpha_start: f64,
        #[arg(long, default_value_t = 0.95)]
        alpha_end: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha_step: f64,
        /// Directory receiving hierarchy, cluster and DOT files per alpha.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Members shown per DOT node.
        #[arg(long, default_value_t = 4)]
        dot_members: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Triples,
    Pairs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Denominator {
    Vocabulary,
    Clusters,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Input TSV file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Triples)]
    format: Format,
    /// Keep only triples with this relation when flattening.
    #[arg(long)]
    relation: Option<String>,
    /// Label of the synthetic root tag added to every subject.
    #[arg(long, default_value = "root")]
    root_label: String,
    /// Do not add a synthetic root tag.
    #[arg(long)]
    no_root: bool,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Write `tag, n, generality` statistics here.
    #[arg(long)]
    stats_tsv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ArtifactArgs {
    /// Induced tag hierarchy as nested JSON.
    #[arg(long)]
    hierarchy_json: Option<PathBuf>,
    /// Pruned cluster hierarchy with members as nested JSON.
    #[arg(long)]
    clusters_json: Option<PathBuf>,
    /// Pruned cluster hierarchy as Graphviz DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Members shown per DOT node.
    #[arg(long, default_value_t = 4)]
    dot_members: usize,
}

#[derive(Args, Debug)]
struct MetricArgs {
    /// Gold `parent<TAB>child` hierarchy; enables Hie-F1.
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Metrics CSV output.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Recall denominator for Sub-F1.
    #[arg(long, value_enum, default_value_t = Denominator::Vocabulary)]
    sub_f1_denominator: Denominator,
}

fn base_config(input: InputArgs, alpha: AlphaGrid) -> PipelineConfig {
    let format = match input.format {
        Format::Triples => InputFormat::Triples,
        Format::Pairs => InputFormat::Pairs,
    };
    let mut config = PipelineConfig::new(input.input, format, alpha);
    config.relation = input.relation;
    config.root_label = (!input.no_root).then_some(input.root_label);
    config.workers = input.workers;
    config.outputs.stats_tsv = input.stats_tsv;
    config
}

fn apply_artifacts(config: &mut PipelineConfig, artifacts: ArtifactArgs) {
    config.outputs = OutputPaths {
        hierarchy_json: artifacts.hierarchy_json,
        clusters_json: artifacts.clusters_json,
        dot: artifacts.dot,
        ..std::mem::take(&mut config.outputs)
    };
    config.dot_members = artifacts.dot_members;
}

fn apply_metrics(config: &mut PipelineConfig, metrics: MetricArgs) {
    config.gold = metrics.gold;
    config.outputs.metrics_csv = metrics.metrics;
    config.denominator = match metrics.sub_f1_denominator {
        Denominator::Vocabulary => RecallDenominator::Vocabulary,
        Denominator::Clusters => RecallDenominator::Clusters,
    };
}

fn execute(cli: Cli) -> Result<()> {
    let (config, print_metrics) = match cli.command {
        Command::Induce { input, artifacts, alpha } => {
            let mut config = base_config(input, AlphaGrid::Single(alpha));
            apply_artifacts(&mut config, artifacts);
            (config, false)
        }
        Command::Evaluate { input, artifacts, metrics, alpha } => {
            let mut config = base_config(input, AlphaGrid::Single(alpha));
            apply_artifacts(&mut config, artifacts);
            apply_metrics(&mut config, metrics);
            (config, true)
        }
        Command::Sweep {
            input,
            metrics,
            alpha_start,
            alpha_end,
            alpha_step,
            out_dir,
            dot_members,
        } => {
            let grid = AlphaGrid::Range {
                start: alpha_start,
                end: alpha_end,
                step: alpha_step,
            };
            let mut config = base_config(input, grid);
            apply_metrics(&mut config, metrics);
            config.outputs.out_dir = out_dir;
            config.dot_members = dot_members;
            (config, true)
        }
    };
    let reports = taxoclust::run(&config)?;
    if print_metrics {
        print!("{}", metrics_csv(&reports));
    } else {
        for r in &reports {
            println!("alpha={} clusters={} pruned={}", r.alpha, r.cluster_count, r.pruned_count);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("taxoclust: {err:#}");
            ExitCode::FAILURE
        }
    }
}
