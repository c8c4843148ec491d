//! Writers for hierarchy JSON, Graphviz DOT and metrics CSV.
//!
//! All output is deterministic: nodes appear root first with children in
//! canonical tag order, and members are sorted.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluation::MetricReport;
use crate::hierarchy::{ClusterHierarchy, TagHierarchy};
use crate::model::Tag;

#[derive(Serialize)]
struct ClusterNode<'a> {
    tag: String,
    members: Vec<&'a str>,
    children: Vec<ClusterNode<'a>>,
}

#[derive(Serialize)]
struct TagNode {
    tag: String,
    children: Vec<TagNode>,
}

fn cluster_node<'a>(clusters: &'a ClusterHierarchy, tag: &Tag) -> ClusterNode<'a> {
    ClusterNode {
        tag: tag.label(),
        members: clusters
            .members(tag)
            .into_iter()
            .flatten()
            .map(String::as_str)
            .collect(),
        children: clusters
            .tree()
            .children(tag)
            .iter()
            .map(|c| cluster_node(clusters, c))
            .collect(),
    }
}

fn tag_node(tree: &TagHierarchy, tag: &Tag) -> TagNode {
    TagNode {
        tag: tag.label(),
        children: tree.children(tag).iter().map(|c| tag_node(tree, c)).collect(),
    }
}

/// Nested `{tag, members, children}` document for a cluster hierarchy.
pub fn clusters_json(clusters: &ClusterHierarchy) -> String {
    let root = cluster_node(clusters, clusters.tree().root());
    let mut out = serde_json::to_string_pretty(&root).expect("plain data serializes");
    out.push('\n');
    out
}

/// Nested `{tag, children}` document for a bare tag hierarchy.
pub fn tag_hierarchy_json(tree: &TagHierarchy) -> String {
    let mut out = serde_json::to_string_pretty(&tag_node(tree, tree.root())).expect("plain data serializes");
    out.push('\n');
    out
}

fn escape_record(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        if matches!(ch, '{' | '}' | '|' | '<' | '>' | '"' | '\\') {
            out.push('\\');
        }
        out.push(ch);
    }
    out
}

/// Graphviz digraph with one record node per cluster. The upper field holds
/// the tag, the lower one the first `max_members` direct members; with
/// `max_members == 0` the lower field is omitted.
pub fn clusters_dot(clusters: &ClusterHierarchy, max_members: usize) -> String {
    let tree = clusters.tree();
    let order = tree.preorder();
    let ids: BTreeMap<&Tag, usize> = order.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let mut out = String::from("digraph clusters {\n  node [shape=record];\n");
    for (i, tag) in order.iter().enumerate() {
        let tag_field = escape_record(&tag.label());
        let label = if max_members == 0 {
            format!("{{{tag_field}}}")
        } else {
            let shown: Vec<String> = clusters
                .members(tag)
                .into_iter()
                .flatten()
                .take(max_members)
                .map(|m| escape_record(m))
                .collect();
            format!("{{{tag_field}|{}}}", shown.join("\\n"))
        };
        let _ = writeln!(out, "  n{i} [label=\"{label}\"];");
    }
    for (i, tag) in order.iter().enumerate() {
        for child in tree.children(tag) {
            let _ = writeln!(out, "  n{i} -> n{};", ids[child]);
        }
    }
    out.push_str("}\n");
    out
}

pub const METRICS_HEADER: &str = "alpha,hie_f1,sub_f1,tag_f1,clusters,pruned";

pub fn metrics_row(report: &MetricReport) -> String {
    format!(
        "{},{},{},{},{},{}",
        report.alpha,
        report.hie_f1.map(|v| v.to_string()).unwrap_or_default(),
        report.sub_f1,
        report.tag_f1,
        report.cluster_count,
        report.pruned_count
    )
}

pub fn metrics_csv<'a>(reports: impl IntoIterator<Item = &'a MetricReport>) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&metrics_row(r));
        out.push('\n');
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn export_hierarchy_json(clusters: &ClusterHierarchy, path: &Path) -> Result<()> {
    write_file(path, &clusters_json(clusters))
}

pub fn export_tag_hierarchy_json(tree: &TagHierarchy, path: &Path) -> Result<()> {
    write_file(path, &tag_hierarchy_json(tree))
}

pub fn export_dot(clusters: &ClusterHierarchy, path: &Path, max_members: usize) -> Result<()> {
    write_file(path, &clusters_dot(clusters, max_members))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn t(name: &str) -> Tag {
        Tag::named(name)
    }

    fn pruned_g0() -> ClusterHierarchy {
        let tree = TagHierarchy::from_edges(
            t("root"),
            [(t("root"), t("A1")), (t("root"), t("A2")), (t("root"), t("B"))],
        )
        .unwrap();
        let members = [("A1", vec!["s1", "s2"]), ("A2", vec!["s3"]), ("B", vec!["s4", "s5"])]
            .into_iter()
            .map(|(c, ss)| (t(c), ss.into_iter().map(String::from).collect()))
            .collect();
        ClusterHierarchy::new(tree, members).unwrap()
    }

    #[test]
    fn json_shape() {
        let doc: serde_json::Value = serde_json::from_str(&clusters_json(&pruned_g0())).unwrap();
        assert_eq!(doc["tag"], "root");
        assert_eq!(doc["members"].as_array().unwrap().len(), 0);
        let children = doc["children"].as_array().unwrap();
        assert_eq!(children.len(), 3);
        let total: usize = children.iter().map(|c| c["members"].as_array().unwrap().len()).sum();
        assert_eq!(total, 5);
        assert_eq!(children[0]["members"], serde_json::json!(["s1", "s2"]));
        assert_eq!(clusters_json(&pruned_g0()), clusters_json(&pruned_g0()));
    }

    #[test]
    fn json_key_order() {
        let text = clusters_json(&pruned_g0());
        let tag = text.find("\"tag\"").unwrap();
        let members = text.find("\"members\"").unwrap();
        let children = text.find("\"children\"").unwrap();
        assert!(tag < members && members < children);
    }

    #[test]
    fn single_node_json() {
        let h = ClusterHierarchy::new(TagHierarchy::new(t("root")), BTreeMap::new()).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&clusters_json(&h)).unwrap();
        assert_eq!(doc["children"], serde_json::json!([]));
    }

    #[test]
    fn dot_nodes_and_edges() {
        let dot = clusters_dot(&pruned_g0(), 2);
        assert_eq!(dot.matches("[label=").count(), 4);
        assert_eq!(dot.matches(" -> ").count(), 3);
        assert!(dot.contains("n0 [label=\"{root|}\"];"));
        assert!(dot.contains("{A1|s1\\ns2}"));

        let tags_only = clusters_dot(&pruned_g0(), 0);
        assert!(tags_only.contains("n1 [label=\"{A1}\"];"));
        assert!(!tags_only.contains("s1"));
    }

    #[test]
    fn dot_escapes_record_syntax() {
        let h = ClusterHierarchy::new(
            TagHierarchy::new(t("a|b")),
            BTreeMap::from([(t("a|b"), BTreeSet::from(["x{y}".to_string()]))]),
        )
        .unwrap();
        assert!(clusters_dot(&h, 1).contains("{a\\|b|x\\{y\\}}"));
    }

    #[test]
    fn csv_empty_hie_column() {
        let r = MetricReport {
            alpha: 0.5,
            hie_f1: None,
            sub_f1: 1.0,
            tag_f1: 0.96,
            cluster_count: 4,
            pruned_count: 1,
        };
        assert_eq!(metrics_csv([&r]), "alpha,hie_f1,sub_f1,tag_f1,clusters,pruned\n0.5,,1,0.96,4,1\n");
    }
}
