//! Hierarchy, subject and tag F1 scores.
//!
//! * Hie-F1 compares the induced direct parent/child edges with a gold edge set.
//! * Sub-F1 treats every `(subject, cluster)` pair with the subject among the
//!   cluster's inherited members as a prediction, correct when the subject
//!   carries the cluster's tag.
//! * Tag-F1 scores each tag by its best matching cluster and averages over
//!   the vocabulary.
//!
//! Sub-F1 and Tag-F1 work on inherited membership: a cluster holds its own
//! subjects plus those of all its descendants.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hierarchy::{ClusterHierarchy, TagHierarchy};
use crate::model::{SubjectTagGraph, Tag};

/// Reference subsumption axioms, one `(parent, child)` edge each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldHierarchy {
    edges: BTreeSet<(Tag, Tag)>,
}

impl GoldHierarchy {
    /// Rejects self-loops, children with two parents, and cycles.
    pub fn new(edges: impl IntoIterator<Item = (Tag, Tag)>) -> Result<Self> {
        let edges: BTreeSet<(Tag, Tag)> = edges.into_iter().collect();
        let mut parent_of: BTreeMap<&Tag, &Tag> = BTreeMap::new();
        for (p, c) in &edges {
            if p == c {
                return Err(Error::InvalidHierarchy(format!("gold edge `{p}` -> `{c}` is a self-loop")));
            }
            if parent_of.insert(c, p).is_some() {
                return Err(Error::InvalidHierarchy(format!("gold tag `{c}` has two parents")));
            }
        }
        for start in parent_of.keys() {
            let mut cursor = *start;
            let mut steps = 0;
            while let Some(p) = parent_of.get(cursor) {
                cursor = p;
                steps += 1;
                if cursor == *start || steps > parent_of.len() {
                    return Err(Error::InvalidHierarchy(format!("gold edges contain a cycle through `{start}`")));
                }
            }
        }
        Ok(GoldHierarchy { edges })
    }

    /// Reads `parent<TAB>child` lines. `resolve` maps a tag string to a tag,
    /// typically by looking it up in the vocabulary and falling back to
    /// [`Tag::named`].
    pub fn parse(bytes: &[u8], resolve: impl Fn(&str) -> Tag) -> Result<Self> {
        let text = std::str::from_utf8(bytes)?;
        let mut edges = Vec::new();
        for (i, raw) in text.split('\n').enumerate() {
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "expected `parent<TAB>child`".into(),
                });
            }
            edges.push((resolve(fields[0]), resolve(fields[1])));
        }
        Self::new(edges)
    }

    pub fn edges(&self) -> &BTreeSet<(Tag, Tag)> {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct F1Score {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl F1Score {
    /// Scores from raw counts; every ratio with a zero denominator is 0.
    pub fn from_counts(true_positives: usize, predicted: usize, actual: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        F1Score {
            precision: ratio(true_positives, predicted),
            recall: ratio(true_positives, actual),
            f1: ratio(2 * true_positives, predicted + actual),
        }
    }
}

/// Which annotations count as recall targets for Sub-F1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecallDenominator {
    /// Every `(subject, tag)` annotation in the vocabulary.
    #[default]
    Vocabulary,
    /// Only annotations whose tag survives as a cluster after pruning.
    Clusters,
}

impl FromStr for RecallDenominator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vocabulary" => Ok(RecallDenominator::Vocabulary),
            "clusters" => Ok(RecallDenominator::Clusters),
            other => Err(Error::Config(format!("unknown Sub-F1 denominator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub alpha: f64,
    pub hie_f1: Option<f64>,
    pub sub_f1: f64,
    pub tag_f1: f64,
    pub cluster_count: usize,
    pub pruned_count: usize,
}

/// Inherited member sets: each cluster's direct members plus those of all
/// its descendants.
pub fn inherit(clusters: &ClusterHierarchy) -> BTreeMap<Tag, BTreeSet<String>> {
    let tree = clusters.tree();
    let mut out: BTreeMap<Tag, BTreeSet<String>> = BTreeMap::new();
    for node in tree.preorder().into_iter().rev() {
        let mut set = clusters.members(node).cloned().unwrap_or_default();
        for child in tree.children(node) {
            set.extend(out[child].iter().cloned());
        }
        out.insert(node.clone(), set);
    }
    out
}

pub fn hie_scores(induced: &TagHierarchy, gold: &GoldHierarchy) -> Result<F1Score> {
    if gold.is_empty() {
        return Err(Error::Usage("gold hierarchy has no edges".into()));
    }
    let predicted: BTreeSet<(&Tag, &Tag)> = induced.edges().collect();
    let hits = gold
        .edges()
        .iter()
        .filter(|(p, c)| predicted.contains(&(p, c)))
        .count();
    Ok(F1Score::from_counts(hits, predicted.len(), gold.len()))
}

pub fn hie_f1(induced: &TagHierarchy, gold: &GoldHierarchy) -> Result<f64> {
    hie_scores(induced, gold).map(|s| s.f1)
}

/// Pruned hierarchy in preorder, joined with the graph's subject and tag
/// indices.
struct EvalIndex {
    parent: Vec<Option<usize>>,
    /// Vocabulary index of each node's tag.
    vocab: Vec<Option<usize>>,
    /// Node holding each graph subject directly.
    home: Vec<Option<usize>>,
    inherited_size: Vec<usize>,
}

impl EvalIndex {
    fn new(clusters: &ClusterHierarchy, graph: &SubjectTagGraph) -> Result<Self> {
        let tree = clusters.tree();
        let nodes = tree.preorder();
        let slot: BTreeMap<&Tag, usize> = nodes.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let parent: Vec<Option<usize>> = nodes.iter().map(|t| tree.parent(t).map(|p| slot[p])).collect();
        let mut home = vec![None; graph.subject_count()];
        let mut inherited_size = vec![0usize; nodes.len()];
        for (k, node) in nodes.iter().enumerate() {
            for subject in clusters.members(node).into_iter().flatten() {
                let s = graph.subject_index(subject).ok_or_else(|| {
                    Error::Usage(format!("cluster member `{subject}` is not a subject of the graph"))
                })?;
                home[s] = Some(k);
                inherited_size[k] += 1;
            }
        }
        for k in (1..nodes.len()).rev() {
            let p = parent[k].expect("non-root node");
            inherited_size[p] += inherited_size[k];
        }
        Ok(EvalIndex {
            vocab: nodes.iter().map(|t| graph.tag_id(t).map(|id| id.index())).collect(),
            parent,
            home,
            inherited_size,
        })
    }

    /// `node` followed by all of its ancestors.
    fn chain(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(Some(node), move |&k| self.parent[k])
    }
}

pub fn sub_scores(
    clusters: &ClusterHierarchy,
    graph: &SubjectTagGraph,
    denominator: RecallDenominator,
) -> Result<F1Score> {
    let index = EvalIndex::new(clusters, graph)?;
    let mut predicted = 0usize;
    let mut hits = 0usize;
    for (s, home) in index.home.iter().enumerate() {
        let Some(home) = *home else { continue };
        let tags = graph.annotation_ids(s);
        for k in index.chain(home) {
            predicted += 1;
            if let Some(v) = index.vocab[k] {
                if tags.binary_search_by_key(&v, |id| id.index()).is_ok() {
                    hits += 1;
                }
            }
        }
    }
    let actual = match denominator {
        RecallDenominator::Vocabulary => graph.iter().map(|(_, ids)| ids.len()).sum(),
        RecallDenominator::Clusters => {
            let mut is_cluster = vec![false; graph.tag_count()];
            for v in index.vocab.iter().flatten() {
                is_cluster[*v] = true;
            }
            graph
                .iter()
                .map(|(_, ids)| ids.iter().filter(|id| is_cluster[id.index()]).count())
                .sum()
        }
    };
    Ok(F1Score::from_counts(hits, predicted, actual))
}

pub fn sub_f1(
    clusters: &ClusterHierarchy,
    graph: &SubjectTagGraph,
    denominator: RecallDenominator,
) -> Result<f64> {
    sub_scores(clusters, graph, denominator).map(|s| s.f1)
}

/// Best F1 of every vocabulary tag against any cluster, indexed like
/// [`SubjectTagGraph::tags`].
pub fn tag_scores(clusters: &ClusterHierarchy, graph: &SubjectTagGraph) -> Result<Vec<f64>> {
    let index = EvalIndex::new(clusters, graph)?;
    let mut extension: Vec<Vec<usize>> = vec![Vec::new(); graph.tag_count()];
    for s in 0..graph.subject_count() {
        for id in graph.annotation_ids(s) {
            extension[id.index()].push(s);
        }
    }
    let nodes = index.parent.len();
    Ok(extension
        .par_iter()
        .map_init(
            || (vec![0usize; nodes], Vec::new()),
            |(overlap, touched), subjects| {
                for &s in subjects {
                    let Some(home) = index.home[s] else { continue };
                    for k in index.chain(home) {
                        if overlap[k] == 0 {
                            touched.push(k);
                        }
                        overlap[k] += 1;
                    }
                }
                let mut best = 0.0f64;
                for &k in touched.iter() {
                    let f1 = F1Score::from_counts(overlap[k], index.inherited_size[k], subjects.len()).f1;
                    best = best.max(f1);
                    overlap[k] = 0;
                }
                touched.clear();
                best
            },
        )
        .collect())
}

pub fn tag_f1(clusters: &ClusterHierarchy, graph: &SubjectTagGraph) -> Result<f64> {
    let scores = tag_scores(clusters, graph)?;
    if scores.is_empty() {
        return Ok(0.0);
    }
    Ok(scores.iter().fold(0.0, |acc, s| acc + s) / scores.len() as f64)
}
