//! Assigning subjects to clusters.
//!
//! Every node of the tag hierarchy is a cluster. A subject's belonging to a
//! cluster is the Jaccard coefficient between the subject's annotations and
//! the tags on the cluster's root path; each subject goes to the cluster it
//! belongs to most.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hierarchy::{ClusterHierarchy, TagHierarchy};
use crate::model::{SubjectTagGraph, Tag};

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub subject: String,
    pub cluster: Tag,
    pub belonging: f64,
}

/// `|annotations ∩ path| / |annotations ∪ path|`, or 0 when both are empty.
pub fn belonging(annotations: &BTreeSet<Tag>, cluster_path: &BTreeSet<Tag>) -> f64 {
    let inter = annotations.intersection(cluster_path).count();
    let union = annotations.len() + cluster_path.len() - inter;
    if inter == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Flattened preorder view of a tree, indexed against a graph vocabulary.
struct ClusterIndex<'a> {
    nodes: Vec<&'a Tag>,
    parent: Vec<Option<usize>>,
    level: Vec<usize>,
    /// Canonical rank of each node's tag, for tie-breaks.
    rank: Vec<usize>,
    /// Vocabulary index of each node's tag, if the graph uses it.
    vocab: Vec<Option<usize>>,
}

impl<'a> ClusterIndex<'a> {
    fn new(tree: &'a TagHierarchy, graph: &SubjectTagGraph) -> Result<Self> {
        if let Some(missing) = graph.tags().iter().find(|t| !tree.contains(t)) {
            return Err(Error::Usage(format!(
                "vocabulary tag `{missing}` is not a node of the hierarchy"
            )));
        }
        let nodes = tree.preorder();
        let slot: BTreeMap<&Tag, usize> = nodes.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let rank_of: BTreeMap<&Tag, usize> = slot.keys().enumerate().map(|(r, t)| (*t, r)).collect();
        Ok(ClusterIndex {
            parent: nodes.iter().map(|t| tree.parent(t).map(|p| slot[p])).collect(),
            level: nodes.iter().map(|t| tree.level(t).expect("node of tree")).collect(),
            rank: nodes.iter().map(|t| rank_of[t]).collect(),
            vocab: nodes.iter().map(|t| graph.tag_id(t).map(|id| id.index())).collect(),
            nodes,
        })
    }

    /// Best node for one subject. `member` is a scratch mask over the
    /// vocabulary with the subject's tags set.
    fn best(&self, member: &[bool], annotation_count: usize, inter: &mut Vec<usize>) -> (usize, usize, usize) {
        inter.clear();
        let mut best = (0usize, 0usize, 1usize);
        for k in 0..self.nodes.len() {
            let own = usize::from(self.vocab[k].is_some_and(|v| member[v]));
            let i = own + self.parent[k].map_or(0, |p| inter[p]);
            inter.push(i);
            let union = annotation_count + self.level[k] + 1 - i;
            if k == 0 || self.compare(k, i, union, best) == Ordering::Greater {
                best = (k, i, union);
            }
        }
        best
    }

    /// Orders candidate `k` (with score `i/u`) against the incumbent: higher
    /// belonging first, then the deeper cluster, then canonical tag order.
    fn compare(&self, k: usize, i: usize, u: usize, (bk, bi, bu): (usize, usize, usize)) -> Ordering {
        (i * bu)
            .cmp(&(bi * u))
            .then(self.level[k].cmp(&self.level[bk]))
            .then(self.rank[bk].cmp(&self.rank[k]))
    }
}

/// Best cluster and belonging for every subject, in canonical subject order.
///
/// Runs on the current rayon pool; the result does not depend on its size.
pub fn assignments(graph: &SubjectTagGraph, tree: &TagHierarchy) -> Result<Vec<Assignment>> {
    let index = ClusterIndex::new(tree, graph)?;
    let vocab = graph.tag_count();
    let picks: Vec<(usize, usize, usize)> = (0..graph.subject_count())
        .into_par_iter()
        .map_init(
            || (vec![false; vocab], Vec::with_capacity(index.nodes.len())),
            |(member, inter), s| {
                let ids = graph.annotation_ids(s);
                for id in ids {
                    member[id.index()] = true;
                }
                let pick = index.best(member, ids.len(), inter);
                for id in ids {
                    member[id.index()] = false;
                }
                pick
            },
        )
        .collect();
    Ok(graph
        .subjects()
        .iter()
        .zip(picks)
        .map(|(subject, (k, i, u))| Assignment {
            subject: subject.clone(),
            cluster: index.nodes[k].clone(),
            belonging: if i == 0 { 0.0 } else { i as f64 / u as f64 },
        })
        .collect())
}

/// Places every subject of `graph` into its best cluster on `tree`.
pub fn assign(graph: &SubjectTagGraph, tree: &TagHierarchy) -> Result<ClusterHierarchy> {
    let mut members: BTreeMap<Tag, BTreeSet<String>> = BTreeMap::new();
    for a in assignments(graph, tree)? {
        members.entry(a.cluster).or_default().insert(a.subject);
    }
    ClusterHierarchy::new(tree.clone(), members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixture_g0;

    fn t(name: &str) -> Tag {
        Tag::named(name)
    }

    fn set(names: &[&str]) -> BTreeSet<Tag> {
        names.iter().map(|n| t(n)).collect()
    }

    fn g0_tree() -> TagHierarchy {
        TagHierarchy::from_edges(
            t("root"),
            [
                (t("root"), t("A")),
                (t("root"), t("B")),
                (t("A"), t("A1")),
                (t("A"), t("A2")),
            ],
        )
        .unwrap()
    }

    #[test]
    fn belonging_examples() {
        assert_eq!(belonging(&set(&["root", "A", "A1"]), &set(&["root", "A", "A1"])), 1.0);
        assert_eq!(belonging(&set(&["root", "A", "A1"]), &set(&["root", "A", "A2"])), 0.5);
        assert_eq!(belonging(&set(&["root", "B"]), &set(&["root", "A", "A1"])), 0.25);
        assert_eq!(belonging(&set(&[]), &set(&["root"])), 0.0);
    }

    #[test]
    fn g0_assignment() {
        let clusters = assign(&fixture_g0(), &g0_tree()).unwrap();
        let names = |c: &str| -> Vec<String> { clusters.members(&t(c)).unwrap().iter().cloned().collect() };
        assert_eq!(names("A1"), ["s1", "s2"]);
        assert_eq!(names("A2"), ["s3"]);
        assert_eq!(names("B"), ["s4", "s5"]);
        assert!(names("root").is_empty());
        assert!(names("A").is_empty());
        clusters.check_partition(&fixture_g0()).unwrap();
    }

    #[test]
    fn root_only_subject_lands_on_root() {
        let mut facts: Vec<(String, Tag)> = fixture_g0().facts().map(|(s, t)| (s.to_owned(), t.clone())).collect();
        facts.push(("s6".into(), t("root")));
        let graph = SubjectTagGraph::from_annotations(facts);
        let a = assignments(&graph, &g0_tree()).unwrap();
        let s6 = a.iter().find(|a| a.subject == "s6").unwrap();
        assert_eq!(s6.cluster, t("root"));
        assert_eq!(s6.belonging, 1.0);
    }

    #[test]
    fn ties_prefer_deeper_cluster() {
        // {root, q} scores 1/2 on root and 2/4 on root/p/p2/q.
        let graph = SubjectTagGraph::from_annotations([
            ("s", t("root")),
            ("s", t("q")),
            ("u", t("root")),
            ("u", t("p")),
            ("v", t("root")),
            ("v", t("p2")),
        ]);
        let tree = TagHierarchy::from_edges(
            t("root"),
            [(t("root"), t("p")), (t("p"), t("p2")), (t("p2"), t("q"))],
        )
        .unwrap();
        let a = assignments(&graph, &tree).unwrap();
        assert_eq!(a[0].subject, "s");
        assert_eq!(a[0].cluster, t("q"));
        assert_eq!(a[0].belonging, 0.5);
    }

    #[test]
    fn ties_at_equal_depth_use_canonical_order() {
        // {root, A, B} scores 2/3 on both root/A and root/B.
        let mut facts: Vec<(String, Tag)> = fixture_g0().facts().map(|(s, t)| (s.to_owned(), t.clone())).collect();
        for tag in ["root", "A", "B"] {
            facts.push(("s7".into(), t(tag)));
        }
        let graph = SubjectTagGraph::from_annotations(facts);
        let a = assignments(&graph, &g0_tree()).unwrap();
        let s7 = a.iter().find(|a| a.subject == "s7").unwrap();
        assert_eq!(s7.cluster, t("A"));
    }

    #[test]
    fn vocabulary_tree_mismatch() {
        let tree = TagHierarchy::new(t("root"));
        assert!(matches!(assign(&fixture_g0(), &tree), Err(Error::Usage(_))));
    }
}
