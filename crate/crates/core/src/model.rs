//! Core domain types: triples, tags and the flattened subject/tag graph.
//!
//! Every collection here iterates in the canonical order of its elements
//! (subjects lexicographically, tags by relation then object), so any
//! tie-break taken downstream is reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_identifier(field: &str, value: &str) -> Result<()> {
    if value.is_empty() {
        return Err(Error::Usage(format!("{field} must not be empty")));
    }
    if value.contains(['\t', '\n', '\r']) {
        return Err(Error::Usage(format!(
            "{field} `{}` contains a tab or line break",
            value.escape_debug()
        )));
    }
    Ok(())
}

/// A single `<subject, relation, object>` fact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    subject: String,
    relation: String,
    object: String,
}

impl Triple {
    pub fn new(
        subject: impl Into<String>,
        relation: impl Into<String>,
        object: impl Into<String>,
    ) -> Result<Self> {
        let (subject, relation, object) = (subject.into(), relation.into(), object.into());
        check_identifier("subject", &subject)?;
        check_identifier("relation", &relation)?;
        check_identifier("object", &object)?;
        Ok(Triple {
            subject,
            relation,
            object,
        })
    }

    pub fn subject(&self) -> &str {
        &self.subject
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn object(&self) -> &str {
        &self.object
    }

    pub fn tag(&self) -> Tag {
        Tag {
            relation: self.relation.clone(),
            object: self.object.clone(),
        }
    }
}

/// A relation/object pair annotating a subject.
///
/// Field order matters: the derived `Ord` compares the relation first and
/// the object second, which is the canonical tag order used for every
/// tie-break in the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tag {
    relation: String,
    object: String,
}

impl Tag {
    pub fn new(relation: impl Into<String>, object: impl Into<String>) -> Self {
        Tag {
            relation: relation.into(),
            object: object.into(),
        }
    }

    /// Tag read from a flattened `subject<TAB>tag` file: the string is used
    /// as both relation and object.
    pub fn named(label: impl Into<String>) -> Self {
        let label = label.into();
        Tag {
            relation: label.clone(),
            object: label,
        }
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn object(&self) -> &str {
        &self.object
    }

    /// Human readable form: the bare name for tags built with [`Tag::named`],
    /// `relation:object` otherwise.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.relation == self.object {
            f.write_str(&self.object)
        } else {
            write!(f, "{}:{}", self.relation, self.object)
        }
    }
}

/// Position of a tag in a graph's canonical vocabulary.
///
/// Because the vocabulary is sorted, comparing two ids from the same graph
/// is the same as comparing the tags themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TagId(pub(crate) u32);

impl TagId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_index(index: usize) -> Self {
        TagId(u32::try_from(index).expect("vocabulary larger than u32::MAX"))
    }
}

/// Bipartite subject/tag annotation structure.
///
/// Subjects and tags are stored sorted and deduplicated. Every subject
/// carries at least one tag and every tag annotates at least one subject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubjectTagGraph {
    subjects: Vec<String>,
    tags: Vec<Tag>,
    annotations: Vec<Vec<TagId>>,
}

impl SubjectTagGraph {
    /// Builds a graph from `(subject, tag)` facts. Duplicates collapse.
    pub fn from_annotations<I, S>(facts: I) -> Self
    where
        I: IntoIterator<Item = (S, Tag)>,
        S: Into<String>,
    {
        let mut by_subject: BTreeMap<String, BTreeSet<Tag>> = BTreeMap::new();
        for (subject, tag) in facts {
            by_subject.entry(subject.into()).or_default().insert(tag);
        }
        Self::from_map(by_subject)
    }

    fn from_map(by_subject: BTreeMap<String, BTreeSet<Tag>>) -> Self {
        let tags: Vec<Tag> = by_subject
            .values()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut subjects = Vec::with_capacity(by_subject.len());
        let mut annotations = Vec::with_capacity(by_subject.len());
        for (subject, set) in by_subject {
            if set.is_empty() {
                continue;
            }
            let ids = set
                .iter()
                .map(|t| TagId::from_index(tags.binary_search(t).expect("tag collected above")))
                .collect();
            subjects.push(subject);
            annotations.push(ids);
        }
        SubjectTagGraph {
            subjects,
            tags,
            annotations,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.subjects.is_empty()
    }

    pub fn subject_count(&self) -> usize {
        self.subjects.len()
    }

    pub fn tag_count(&self) -> usize {
        self.tags.len()
    }

    /// Subjects in canonical order.
    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    /// The vocabulary in canonical order.
    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn tag(&self, id: TagId) -> &Tag {
        &self.tags[id.index()]
    }

    pub fn tag_id(&self, tag: &Tag) -> Option<TagId> {
        self.tags.binary_search(tag).ok().map(TagId::from_index)
    }

    pub fn subject_index(&self, subject: &str) -> Option<usize> {
        self.subjects
            .binary_search_by(|s| s.as_str().cmp(subject))
            .ok()
    }

    /// Annotation ids of the subject at `index`, sorted.
    pub fn annotation_ids(&self, index: usize) -> &[TagId] {
        &self.annotations[index]
    }

    /// The annotation set of a subject, or `None` for an unknown subject.
    pub fn annotations(&self, subject: &str) -> Option<BTreeSet<Tag>> {
        let index = self.subject_index(subject)?;
        Some(
            self.annotations[index]
                .iter()
                .map(|&id| self.tags[id.index()].clone())
                .collect(),
        )
    }

    /// `(subject, annotation ids)` in canonical subject order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[TagId])> + '_ {
        self.subjects
            .iter()
            .map(String::as_str)
            .zip(self.annotations.iter().map(Vec::as_slice))
    }

    /// All `(subject, tag)` facts.
    pub fn facts(&self) -> impl Iterator<Item = (&str, &Tag)> + '_ {
        self.iter()
            .flat_map(move |(s, ids)| ids.iter().map(move |&id| (s, &self.tags[id.index()])))
    }

    /// Returns a copy in which every subject is additionally annotated by `tag`.
    pub(crate) fn with_tag_on_every_subject(&self, tag: &Tag) -> Self {
        let mut by_subject: BTreeMap<String, BTreeSet<Tag>> = BTreeMap::new();
        for (subject, t) in self.facts() {
            by_subject
                .entry(subject.to_owned())
                .or_default()
                .insert(t.clone());
        }
        for set in by_subject.values_mut() {
            set.insert(tag.clone());
        }
        Self::from_map(by_subject)
    }
}

/// The five-subject reference graph used throughout the test suite.
///
/// ```text
/// s1, s2: {root, A, A1}
/// s3:     {root, A, A2}
/// s4, s5: {root, B}
/// ```
pub fn fixture_g0() -> SubjectTagGraph {
    let rows: [(&str, &[&str]); 5] = [
        ("s1", &["root", "A", "A1"]),
        ("s2", &["root", "A", "A1"]),
        ("s3", &["root", "A", "A2"]),
        ("s4", &["root", "B"]),
        ("s5", &["root", "B"]),
    ];
    SubjectTagGraph::from_annotations(
        rows.iter()
            .flat_map(|(s, tags)| tags.iter().map(move |t| (*s, Tag::named(*t)))),
    )
}
