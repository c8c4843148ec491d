//! Rooted tag trees and the cluster hierarchy laid over them.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{SubjectTagGraph, Tag};

/// A rooted tree of tags.
///
/// Children lists are kept in canonical tag order. The order in which nodes
/// were attached is recorded separately and exposed through
/// [`TagHierarchy::placement_order`].
#[derive(Debug, Clone)]
pub struct TagHierarchy {
    root: Tag,
    parent: BTreeMap<Tag, Tag>,
    children: BTreeMap<Tag, Vec<Tag>>,
    level: BTreeMap<Tag, usize>,
    placement: Vec<Tag>,
}

impl PartialEq for TagHierarchy {
    // Two trees are equal when they have the same shape; placement history
    // does not participate.
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.parent == other.parent
    }
}

impl Eq for TagHierarchy {}

impl TagHierarchy {
    pub fn new(root: Tag) -> Self {
        TagHierarchy {
            children: BTreeMap::from([(root.clone(), Vec::new())]),
            level: BTreeMap::from([(root.clone(), 0)]),
            placement: vec![root.clone()],
            parent: BTreeMap::new(),
            root,
        }
    }

    /// Builds a tree from `(parent, child)` edges. Every non-root node must
    /// be reachable from `root` and have exactly one parent.
    pub fn from_edges<I>(root: Tag, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Tag, Tag)>,
    {
        let mut pending: BTreeMap<Tag, Vec<Tag>> = BTreeMap::new();
        let mut seen_children = BTreeSet::new();
        let mut edge_count = 0usize;
        for (parent, child) in edges {
            if !seen_children.insert(child.clone()) {
                return Err(Error::InvalidHierarchy(format!("`{child}` has two parents")));
            }
            pending.entry(parent).or_default().push(child);
            edge_count += 1;
        }
        let mut tree = TagHierarchy::new(root);
        let mut frontier = vec![tree.root.clone()];
        while let Some(node) = frontier.pop() {
            if let Some(kids) = pending.remove(&node) {
                for kid in kids {
                    tree.attach(&node, kid.clone())?;
                    frontier.push(kid);
                }
            }
        }
        if tree.len() != edge_count + 1 {
            return Err(Error::InvalidHierarchy(
                "edges do not form a single tree under the given root".into(),
            ));
        }
        Ok(tree)
    }

    /// Adds `child` below `parent`.
    pub fn attach(&mut self, parent: &Tag, child: Tag) -> Result<()> {
        let parent_level = *self
            .level
            .get(parent)
            .ok_or_else(|| Error::Usage(format!("parent `{parent}` is not in the tree")))?;
        if self.level.contains_key(&child) {
            return Err(Error::Usage(format!("`{child}` is already in the tree")));
        }
        let siblings = self.children.get_mut(parent).expect("every node has a child list");
        let at = siblings.binary_search(&child).unwrap_err();
        siblings.insert(at, child.clone());
        self.children.insert(child.clone(), Vec::new());
        self.level.insert(child.clone(), parent_level + 1);
        self.parent.insert(child.clone(), parent.clone());
        self.placement.push(child);
        Ok(())
    }

    pub fn root(&self) -> &Tag {
        &self.root
    }

    pub fn len(&self) -> usize {
        self.level.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, tag: &Tag) -> bool {
        self.level.contains_key(tag)
    }

    pub fn parent(&self, tag: &Tag) -> Option<&Tag> {
        self.parent.get(tag)
    }

    /// Children of `tag` in canonical order; empty for unknown tags.
    pub fn children(&self, tag: &Tag) -> &[Tag] {
        self.children.get(tag).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn level(&self, tag: &Tag) -> Option<usize> {
        self.level.get(tag).copied()
    }

    /// All nodes in canonical tag order.
    pub fn tags(&self) -> impl Iterator<Item = &Tag> + '_ {
        self.level.keys()
    }

    /// Nodes in the order they were attached, root first.
    pub fn placement_order(&self) -> &[Tag] {
        &self.placement
    }

    /// Tags from the root down to `tag`, both ends included.
    pub fn root_path(&self, tag: &Tag) -> Option<Vec<Tag>> {
        if !self.contains(tag) {
            return None;
        }
        let mut path = vec![tag.clone()];
        let mut cursor = tag;
        while let Some(p) = self.parent.get(cursor) {
            path.push(p.clone());
            cursor = p;
        }
        path.reverse();
        Some(path)
    }

    /// Direct `(parent, child)` edges, ordered by child.
    pub fn edges(&self) -> impl Iterator<Item = (&Tag, &Tag)> + '_ {
        self.parent.iter().map(|(c, p)| (p, c))
    }

    /// Depth-first preorder, children visited in canonical order.
    pub fn preorder(&self) -> Vec<&Tag> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![&self.root];
        while let Some(node) = stack.pop() {
            out.push(node);
            stack.extend(self.children(node).iter().rev());
        }
        out
    }

    /// Is `ancestor` a strict ancestor of `tag`?
    pub fn is_ancestor(&self, ancestor: &Tag, tag: &Tag) -> bool {
        let mut cursor = tag;
        while let Some(p) = self.parent.get(cursor) {
            if p == ancestor {
                return true;
            }
            cursor = p;
        }
        false
    }
}

/// The tag tree with subjects placed on its nodes. Each node is a cluster
/// identified by its tag; `members` holds direct members only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterHierarchy {
    tree: TagHierarchy,
    members: BTreeMap<Tag, BTreeSet<String>>,
}

impl ClusterHierarchy {
    /// Every node of `tree` gets an entry; nodes absent from `members` are
    /// empty clusters.
    pub fn new(tree: TagHierarchy, mut members: BTreeMap<Tag, BTreeSet<String>>) -> Result<Self> {
        if let Some(stray) = members.keys().find(|t| !tree.contains(t)) {
            return Err(Error::InvalidHierarchy(format!(
                "cluster `{stray}` is not a node of the tree"
            )));
        }
        let mut seen = BTreeSet::new();
        for subject in members.values().flatten() {
            if !seen.insert(subject) {
                return Err(Error::InvalidHierarchy(format!(
                    "subject `{subject}` is a direct member of two clusters"
                )));
            }
        }
        for tag in tree.tags() {
            members.entry(tag.clone()).or_default();
        }
        Ok(ClusterHierarchy { tree, members })
    }

    pub fn tree(&self) -> &TagHierarchy {
        &self.tree
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Direct members of a cluster.
    pub fn members(&self, cluster: &Tag) -> Option<&BTreeSet<String>> {
        self.members.get(cluster)
    }

    /// `(cluster, direct members)` in canonical tag order.
    pub fn iter(&self) -> impl Iterator<Item = (&Tag, &BTreeSet<String>)> + '_ {
        self.members.iter()
    }

    pub fn subject_count(&self) -> usize {
        self.members.values().map(BTreeSet::len).sum()
    }

    /// The cluster holding `subject` directly.
    pub fn cluster_of(&self, subject: &str) -> Option<&Tag> {
        self.members
            .iter()
            .find(|(_, m)| m.contains(subject))
            .map(|(t, _)| t)
    }

    /// Checks that the direct member sets partition the graph's subjects.
    pub fn check_partition(&self, graph: &SubjectTagGraph) -> Result<()> {
        let covered: BTreeSet<&str> = self.members.values().flatten().map(String::as_str).collect();
        let expected: BTreeSet<&str> = graph.subjects().iter().map(String::as_str).collect();
        if covered != expected || self.subject_count() != expected.len() {
            return Err(Error::InvalidHierarchy(
                "cluster members do not partition the subject set".into(),
            ));
        }
        Ok(())
    }
}
