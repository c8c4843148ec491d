//! End-to-end runs: ingest, count, induce, assign, prune, evaluate, export.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::clustering::assign;
use crate::error::{Error, Result};
use crate::evaluation::{hie_f1, sub_f1, tag_f1, GoldHierarchy, MetricReport, RecallDenominator};
use crate::export;
use crate::hierarchy::{ClusterHierarchy, TagHierarchy};
use crate::induction::{induce, InductionConfig};
use crate::ingest::{flatten, inject_root, parse_pairs, parse_triples, InputFormat};
use crate::model::{SubjectTagGraph, Tag};
use crate::pruning::{prune, removed_count};
use crate::stats::{count, CooccurrenceStats};

/// Grid values are snapped to this many decimals so that `0.05 * 3` and a
/// literal `0.15` produce the same row.
const GRID_DECIMALS: f64 = 1e12;
const GRID_END_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum AlphaGrid {
    Single(f64),
    Range { start: f64, end: f64, step: f64 },
}

impl AlphaGrid {
    /// The alpha values to run, in increasing order. A range includes `end`
    /// when the last step lands within 1e-9 of it.
    pub fn values(&self) -> Result<Vec<f64>> {
        let values = match *self {
            AlphaGrid::Single(a) => vec![a],
            AlphaGrid::Range { start, end, step } => {
                if step.is_nan() || step <= 0.0 {
                    return Err(Error::Config(format!("alpha step must be positive, got {step}")));
                }
                if start.is_nan() || end.is_nan() || start > end {
                    return Err(Error::Config(format!("alpha start {start} exceeds end {end}")));
                }
                let mut out = Vec::new();
                let mut i = 0u32;
                loop {
                    let raw = start + f64::from(i) * step;
                    if raw > end + GRID_END_SLACK {
                        break;
                    }
                    out.push((raw * GRID_DECIMALS).round() / GRID_DECIMALS);
                    i += 1;
                }
                out
            }
        };
        for &a in &values {
            InductionConfig::new(a)?;
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, Default)]
pub struct OutputPaths {
    /// Induced tag hierarchy, before clustering (single alpha only).
    pub hierarchy_json: Option<PathBuf>,
    /// Pruned cluster hierarchy with members (single alpha only).
    pub clusters_json: Option<PathBuf>,
    /// Pruned cluster hierarchy as DOT (single alpha only).
    pub dot: Option<PathBuf>,
    pub metrics_csv: Option<PathBuf>,
    /// `tag, n, generality` dump of the input statistics.
    pub stats_tsv: Option<PathBuf>,
    /// Receives `hierarchy_<alpha>.json`, `clusters_<alpha>.json` and
    /// `clusters_<alpha>.dot` for every alpha.
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub relation: Option<String>,
    /// Label of the synthetic root tag; `None` disables injection.
    pub root_label: Option<String>,
    pub alpha: AlphaGrid,
    pub gold: Option<PathBuf>,
    pub outputs: OutputPaths,
    /// Size of the rayon pool; 0 uses the global pool.
    pub workers: usize,
    pub denominator: RecallDenominator,
    pub dot_members: usize,
}

impl PipelineConfig {
    pub fn new(input: impl Into<PathBuf>, format: InputFormat, alpha: AlphaGrid) -> Self {
        PipelineConfig {
            input: input.into(),
            format,
            relation: None,
            root_label: Some("root".into()),
            alpha,
            gold: None,
            outputs: OutputPaths::default(),
            workers: 0,
            denominator: RecallDenominator::default(),
            dot_members: 4,
        }
    }
}

/// Everything that does not depend on alpha, computed once per input.
#[derive(Debug)]
pub struct Prepared {
    pub graph: SubjectTagGraph,
    pub stats: CooccurrenceStats,
    pub gold: Option<GoldHierarchy>,
    pub skipped_subjects: usize,
}

impl Prepared {
    pub fn new(graph: SubjectTagGraph, gold: Option<GoldHierarchy>) -> Self {
        let stats = count(&graph);
        stats.generalities();
        Prepared {
            graph,
            stats,
            gold,
            skipped_subjects: 0,
        }
    }

    /// Maps a tag string to a vocabulary tag by label, falling back to
    /// [`Tag::named`].
    pub fn resolver(&self) -> impl Fn(&str) -> Tag + '_ {
        let by_label: BTreeMap<String, &Tag> = self.graph.tags().iter().map(|t| (t.label(), t)).collect();
        move |s| by_label.get(s).map_or_else(|| Tag::named(s), |t| (*t).clone())
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn prepare(config: &PipelineConfig) -> Result<Prepared> {
    let bytes = read(&config.input)?;
    let (graph, skipped) = match config.format {
        InputFormat::Triples => {
            let flat = flatten(&parse_triples(&bytes)?, config.relation.as_deref())?;
            (flat.graph, flat.skipped_subjects)
        }
        InputFormat::Pairs => {
            if config.relation.is_some() {
                return Err(Error::Config("a relation filter needs triples input".into()));
            }
            let graph = parse_pairs(&bytes)?;
            if graph.is_empty() {
                return Err(Error::EmptyResult("input contains no subject/tag pairs".into()));
            }
            (graph, 0)
        }
    };
    let graph = match &config.root_label {
        Some(label) => inject_root(&graph, label)?,
        None => graph,
    };
    let mut prepared = Prepared::new(graph, None);
    prepared.skipped_subjects = skipped;
    if let Some(path) = &config.gold {
        let gold = GoldHierarchy::parse(&read(path)?, prepared.resolver())?;
        prepared.gold = Some(gold);
    }
    Ok(prepared)
}

#[derive(Debug, Clone)]
pub struct AlphaRun {
    pub induced: TagHierarchy,
    /// Assignment before pruning.
    pub assigned: ClusterHierarchy,
    pub pruned: ClusterHierarchy,
    pub report: MetricReport,
}

pub fn run_alpha(prepared: &Prepared, alpha: f64, denominator: RecallDenominator) -> Result<AlphaRun> {
    let induced = induce(&prepared.stats, InductionConfig::new(alpha)?)?;
    let assigned = assign(&prepared.graph, &induced)?;
    let pruned = prune(&assigned);
    let hie = prepared.gold.as_ref().map(|g| hie_f1(&induced, g)).transpose()?;
    let report = MetricReport {
        alpha,
        hie_f1: hie,
        sub_f1: sub_f1(&pruned, &prepared.graph, denominator)?,
        tag_f1: tag_f1(&pruned, &prepared.graph)?,
        cluster_count: pruned.len(),
        pruned_count: removed_count(&assigned, &pruned),
    };
    Ok(AlphaRun {
        induced,
        assigned,
        pruned,
        report,
    })
}

struct Rendered {
    report: MetricReport,
    hierarchy_json: String,
    clusters_json: String,
    dot: String,
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Runs every alpha of the configured grid and writes the requested
/// artifacts. Nothing is written unless every run succeeds.
pub fn run(config: &PipelineConfig) -> Result<Vec<MetricReport>> {
    let alphas = config.alpha.values()?;
    let outputs = &config.outputs;
    let single_file = outputs.hierarchy_json.is_some() || outputs.clusters_json.is_some() || outputs.dot.is_some();
    if single_file && alphas.len() > 1 {
        return Err(Error::Config(
            "per-run output files need a single alpha; use an output directory for sweeps".into(),
        ));
    }

    let rendered = with_pool(config.workers, || -> Result<(Prepared, Vec<Rendered>)> {
        let prepared = prepare(config)?;
        let rendered = alphas
            .par_iter()
            .map(|&alpha| {
                let run = run_alpha(&prepared, alpha, config.denominator)?;
                Ok(Rendered {
                    hierarchy_json: export::tag_hierarchy_json(&run.induced),
                    clusters_json: export::clusters_json(&run.pruned),
                    dot: export::clusters_dot(&run.pruned, config.dot_members),
                    report: run.report,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((prepared, rendered))
    })??;
    let (prepared, rendered) = rendered;

    if let Some(path) = &outputs.stats_tsv {
        export::write_file(path, &prepared.stats.to_tsv())?;
    }
    if let Some(dir) = &outputs.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for r in &rendered {
            let a = r.report.alpha;
            export::write_file(&dir.join(format!("hierarchy_{a}.json")), &r.hierarchy_json)?;
            export::write_file(&dir.join(format!("clusters_{a}.json")), &r.clusters_json)?;
            export::write_file(&dir.join(format!("clusters_{a}.dot")), &r.dot)?;
        }
    }
    if let Some(r) = rendered.first().filter(|_| rendered.len() == 1) {
        if let Some(path) = &outputs.hierarchy_json {
            export::write_file(path, &r.hierarchy_json)?;
        }
        if let Some(path) = &outputs.clusters_json {
            export::write_file(path, &r.clusters_json)?;
        }
        if let Some(path) = &outputs.dot {
            export::write_file(path, &r.dot)?;
        }
    }
    let reports: Vec<MetricReport> = rendered.into_iter().map(|r| r.report).collect();
    if let Some(path) = &outputs.metrics_csv {
        export::write_file(path, &export::metrics_csv(&reports))?;
    }
    Ok(reports)
}
