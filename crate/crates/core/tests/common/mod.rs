//! Brute-force reference implementations used by the integration tests.
//!
//! Everything here works directly on tag and subject sets, with no
//! indexing, sparse rows or incremental updates.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use taxoclust::{ClusterHierarchy, SubjectTagGraph, Tag, TagHierarchy};

pub fn t(name: &str) -> Tag {
    Tag::named(name)
}

/// Graph from bitmasks over `tag_count` tags named `t0..t9`, optionally
/// with a `root` tag on every subject.
pub fn graph_from_masks(tag_count: usize, masks: &[u16], with_root: bool) -> SubjectTagGraph {
    let mut facts = Vec::new();
    for (i, mask) in masks.iter().enumerate() {
        let subject = format!("s{i:02}");
        for k in 0..tag_count {
            if mask & (1 << k) != 0 {
                facts.push((subject.clone(), t(&format!("t{k}"))));
            }
        }
        if with_root {
            facts.push((subject.clone(), t("root")));
        }
    }
    SubjectTagGraph::from_annotations(facts)
}

/// Either independent random subsets, or subjects drawn along the root
/// paths of a random hidden tree (which yields deeper induced trees).
pub fn random_graph(rng: &mut impl Rng) -> SubjectTagGraph {
    let tag_count = rng.gen_range(1..=10usize);
    let subjects = rng.gen_range(1..=20usize);
    let with_root = rng.gen_bool(0.5);
    let masks: Vec<u16> = if rng.gen_bool(0.5) {
        (0..subjects)
            .map(|_| rng.gen_range(1..(1u16 << tag_count)))
            .collect()
    } else {
        let parent: Vec<Option<usize>> = (0..tag_count)
            .map(|k| if k == 0 { None } else { Some(rng.gen_range(0..k)) })
            .collect();
        (0..subjects)
            .map(|_| {
                let mut node = rng.gen_range(0..tag_count);
                let mut mask = 0u16;
                loop {
                    // Occasionally drop a tag on the path, or add noise.
                    if !rng.gen_bool(0.1) {
                        mask |= 1 << node;
                    }
                    match parent[node] {
                        Some(p) => node = p,
                        None => break,
                    }
                }
                if rng.gen_bool(0.15) {
                    mask |= 1 << rng.gen_range(0..tag_count);
                }
                if mask == 0 {
                    mask = 1;
                }
                mask
            })
            .collect()
    };
    graph_from_masks(tag_count, &masks, with_root)
}

pub fn annotation_sets(graph: &SubjectTagGraph) -> BTreeMap<String, BTreeSet<Tag>> {
    graph
        .subjects()
        .iter()
        .map(|s| (s.clone(), graph.annotations(s).unwrap()))
        .collect()
}

pub fn extension(graph: &SubjectTagGraph, tag: &Tag) -> BTreeSet<String> {
    annotation_sets(graph)
        .into_iter()
        .filter(|(_, a)| a.contains(tag))
        .map(|(s, _)| s)
        .collect()
}

pub fn naive_n(graph: &SubjectTagGraph, tag: &Tag) -> u32 {
    extension(graph, tag).len() as u32
}

pub fn naive_n_pair(graph: &SubjectTagGraph, a: &Tag, b: &Tag) -> u32 {
    if a == b {
        return 0;
    }
    extension(graph, a).intersection(&extension(graph, b)).count() as u32
}

/// Sum over every other tag in canonical order, zero terms included.
pub fn naive_generality(graph: &SubjectTagGraph) -> BTreeMap<Tag, f64> {
    let tags = graph.tags();
    tags.iter()
        .map(|a| {
            let mut g = 0.0;
            for b in tags {
                if a != b {
                    g += f64::from(naive_n_pair(graph, a, b)) / f64::from(naive_n(graph, b));
                }
            }
            (a.clone(), g)
        })
        .collect()
}

pub fn alpha_power(alpha: f64, k: usize) -> f64 {
    let mut p = 1.0;
    for _ in 0..k {
        p *= alpha;
    }
    p
}

fn path_via_parents(parent: &BTreeMap<Tag, Tag>, tag: &Tag) -> Vec<Tag> {
    let mut path = vec![tag.clone()];
    let mut cursor = tag;
    while let Some(p) = parent.get(cursor) {
        path.push(p.clone());
        cursor = p;
    }
    path.reverse();
    path
}

/// Direct path sum, root term first.
pub fn naive_similarity(
    graph: &SubjectTagGraph,
    parent: &BTreeMap<Tag, Tag>,
    placed: &Tag,
    incoming: &Tag,
    alpha: f64,
) -> f64 {
    let path = path_via_parents(parent, placed);
    let deepest = path.len() - 1;
    let n_b = f64::from(naive_n(graph, incoming));
    let mut s = 0.0;
    for (j, c) in path.iter().enumerate() {
        s += alpha_power(alpha, deepest - j) * (f64::from(naive_n_pair(graph, incoming, c)) / n_b);
    }
    s
}

/// Greedy placement re-run from scratch. Returns the root, the parent map
/// and the placement order.
pub fn naive_induce(graph: &SubjectTagGraph, alpha: f64) -> (Tag, BTreeMap<Tag, Tag>, Vec<Tag>) {
    let g = naive_generality(graph);
    let mut order: Vec<Tag> = graph.tags().to_vec();
    order.sort_by(|a, b| g[b].partial_cmp(&g[a]).unwrap().then(a.cmp(b)));
    let root = order[0].clone();
    let mut parent: BTreeMap<Tag, Tag> = BTreeMap::new();
    let mut placed = vec![root.clone()];
    for incoming in &order[1..] {
        let mut best: Option<(Tag, f64)> = None;
        for cand in &placed {
            let s = naive_similarity(graph, &parent, cand, incoming, alpha);
            let take = match &best {
                None => true,
                Some((b, bs)) => {
                    s > *bs || (s == *bs && (g[cand] > g[b] || (g[cand] == g[b] && cand < b)))
                }
            };
            if take {
                best = Some((cand.clone(), s));
            }
        }
        let (chosen, score) = best.unwrap();
        let chosen = if score > 0.0 { chosen } else { root.clone() };
        parent.insert(incoming.clone(), chosen);
        placed.push(incoming.clone());
    }
    (root, parent, placed)
}

/// Scores every (subject, cluster) pair exhaustively with exact fraction
/// comparisons.
pub fn naive_assign(graph: &SubjectTagGraph, tree: &TagHierarchy) -> BTreeMap<String, Tag> {
    let mut out = BTreeMap::new();
    for (subject, annotations) in annotation_sets(graph) {
        let mut best: Option<(Tag, usize, usize, usize)> = None;
        for cluster in tree.tags() {
            let path: BTreeSet<Tag> = tree.root_path(cluster).unwrap().into_iter().collect();
            let inter = annotations.intersection(&path).count();
            let union = annotations.union(&path).count();
            let level = tree.level(cluster).unwrap();
            let take = match &best {
                None => true,
                Some((bt, bi, bu, bl)) => {
                    let lhs = inter * bu;
                    let rhs = bi * union;
                    lhs > rhs || (lhs == rhs && (level > *bl || (level == *bl && cluster < bt)))
                }
            };
            if take {
                best = Some((cluster.clone(), inter, union, level));
            }
        }
        out.insert(subject, best.unwrap().0);
    }
    out
}

/// Nearest non-empty proper ancestor (or the root) for each surviving
/// cluster, resolved against the unpruned tree.
pub fn naive_prune(clusters: &ClusterHierarchy) -> BTreeMap<Tag, Tag> {
    let tree = clusters.tree();
    let root = tree.root();
    let non_empty = |c: &Tag| !clusters.members(c).unwrap().is_empty();
    let mut parent = BTreeMap::new();
    for c in tree.tags() {
        if c == root || !non_empty(c) {
            continue;
        }
        let path = tree.root_path(c).unwrap();
        let anchor = path[..path.len() - 1]
            .iter()
            .rev()
            .find(|a| *a == root || non_empty(a))
            .unwrap();
        parent.insert(c.clone(), anchor.clone());
    }
    parent
}

/// Inherited members by transitive closure over the descendant relation.
pub fn naive_inherit(clusters: &ClusterHierarchy) -> BTreeMap<Tag, BTreeSet<String>> {
    let tree = clusters.tree();
    tree.tags()
        .map(|c| {
            let set = tree
                .tags()
                .filter(|d| *d == c || tree.is_ancestor(c, d))
                .flat_map(|d| clusters.members(d).unwrap().iter().cloned())
                .collect();
            (c.clone(), set)
        })
        .collect()
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn naive_hie_f1(induced: &TagHierarchy, gold: &BTreeSet<(Tag, Tag)>) -> f64 {
    let predicted: BTreeSet<(Tag, Tag)> = induced.edges().map(|(p, c)| (p.clone(), c.clone())).collect();
    let hits = predicted.intersection(gold).count();
    f1(ratio(hits, predicted.len()), ratio(hits, gold.len()))
}

pub fn naive_sub_f1(clusters: &ClusterHierarchy, graph: &SubjectTagGraph, clusters_only: bool) -> f64 {
    let annotations = annotation_sets(graph);
    let inherited = naive_inherit(clusters);
    let predicted: BTreeSet<(String, Tag)> = inherited
        .iter()
        .flat_map(|(c, subjects)| subjects.iter().map(move |s| (s.clone(), c.clone())))
        .collect();
    let hits = predicted
        .iter()
        .filter(|(s, c)| annotations[s].contains(c))
        .count();
    let cluster_tags: BTreeSet<&Tag> = clusters.tree().tags().collect();
    let actual: BTreeSet<(String, Tag)> = annotations
        .iter()
        .flat_map(|(s, tags)| tags.iter().map(move |t| (s.clone(), t.clone())))
        .filter(|(_, t)| !clusters_only || cluster_tags.contains(t))
        .collect();
    f1(ratio(hits, predicted.len()), ratio(hits, actual.len()))
}

pub fn naive_tag_f1(clusters: &ClusterHierarchy, graph: &SubjectTagGraph) -> f64 {
    let inherited = naive_inherit(clusters);
    let mut total = 0.0;
    for tag in graph.tags() {
        let ext = extension(graph, tag);
        let best = inherited
            .values()
            .map(|members| {
                let hits = ext.intersection(members).count();
                f1(ratio(hits, members.len()), ratio(hits, ext.len()))
            })
            .fold(0.0, f64::max);
        total += best;
    }
    total / graph.tag_count() as f64
}

/// Gold hierarchy for random instances: the induced tree with some edges
/// rewired to another tag placed earlier, which keeps it acyclic.
pub fn perturbed_gold(tree: &TagHierarchy, rng: &mut impl Rng) -> BTreeSet<(Tag, Tag)> {
    let order = tree.placement_order();
    tree.edges()
        .map(|(p, c)| {
            let at = order.iter().position(|x| x == c).unwrap();
            if rng.gen_bool(0.3) {
                return (order[rng.gen_range(0..at)].clone(), c.clone());
            }
            (p.clone(), c.clone())
        })
        .collect()
}

/// Larger graph drawn from a hidden random tree over `tag_count` tags
/// named `c000..`. Each subject takes the root path of a random node,
/// loses some of it and picks up the odd unrelated tag.
pub fn synthetic_graph(subjects: usize, tag_count: usize, rng: &mut impl Rng) -> SubjectTagGraph {
    let name = |k: usize| Tag::new("type", format!("c{k:04}"));
    let parent: Vec<usize> = (0..tag_count)
        .map(|k| if k == 0 { 0 } else { rng.gen_range(k.saturating_sub(40)..k) })
        .collect();
    let mut facts = Vec::new();
    for i in 0..subjects {
        let subject = format!("e{i:06}");
        let mut node = rng.gen_range(0..tag_count);
        loop {
            if node == 0 || !rng.gen_bool(0.05) {
                facts.push((subject.clone(), name(node)));
            }
            if node == 0 {
                break;
            }
            node = parent[node];
        }
        if rng.gen_bool(0.1) {
            facts.push((subject.clone(), name(rng.gen_range(0..tag_count))));
        }
    }
    SubjectTagGraph::from_annotations(facts)
}
