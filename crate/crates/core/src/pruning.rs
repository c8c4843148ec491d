//! Removal of empty clusters.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::hierarchy::{ClusterHierarchy, TagHierarchy};
use crate::model::Tag;

/// Drops every empty cluster except the root. A surviving cluster is
/// re-parented to its nearest non-empty ancestor in the input tree, or to
/// the root when it has none. Direct members are untouched and levels are
/// recomputed from the new tree.
pub fn prune(clusters: &ClusterHierarchy) -> ClusterHierarchy {
    try_prune(clusters).expect("pruning a valid hierarchy yields a valid hierarchy")
}

fn try_prune(clusters: &ClusterHierarchy) -> Result<ClusterHierarchy> {
    let tree = clusters.tree();
    let root = tree.root();
    let keep = |t: &Tag| t == root || clusters.members(t).is_some_and(|m| !m.is_empty());

    let mut pruned = TagHierarchy::new(root.clone());
    // Preorder guarantees an ancestor is attached before its descendants.
    for node in tree.preorder().into_iter().skip(1) {
        if !keep(node) {
            continue;
        }
        let mut anchor = tree.parent(node).expect("non-root node has a parent");
        while !keep(anchor) {
            anchor = tree.parent(anchor).expect("walk stops at the root");
        }
        pruned.attach(anchor, node.clone())?;
    }

    let members: BTreeMap<_, _> = clusters
        .iter()
        .filter(|(t, _)| pruned.contains(t))
        .map(|(t, m)| (t.clone(), m.clone()))
        .collect();
    ClusterHierarchy::new(pruned, members)
}

/// Number of clusters that [`prune`] removes.
pub fn removed_count(before: &ClusterHierarchy, after: &ClusterHierarchy) -> usize {
    before.len() - after.len()
}
