//! Reading triple and pair TSV files and turning triples into subject/tag
//! annotations.
//!
//! Both formats are UTF-8, one record per line, tab separated, without any
//! quoting. Blank lines and lines starting with `#` are skipped.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{SubjectTagGraph, Tag, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// `subject<TAB>relation<TAB>object`
    Triples,
    /// `subject<TAB>tag`
    Pairs,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triples" => Ok(InputFormat::Triples),
            "pairs" => Ok(InputFormat::Pairs),
            other => Err(Error::Config(format!("unknown input format `{other}`"))),
        }
    }
}

/// Yields `(line_number, fields)` for every record line.
fn records(text: &str, columns: usize) -> impl Iterator<Item = Result<(usize, Vec<&str>)>> + '_ {
    text.split('\n').enumerate().filter_map(move |(i, raw)| {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() || line.starts_with('#') {
            return None;
        }
        let number = i + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != columns {
            return Some(Err(Error::Parse {
                line: number,
                message: format!("expected {columns} tab-separated columns, found {}", fields.len()),
            }));
        }
        if let Some(pos) = fields.iter().position(|f| f.is_empty()) {
            return Some(Err(Error::Parse {
                line: number,
                message: format!("column {} is empty", pos + 1),
            }));
        }
        Some(Ok((number, fields)))
    })
}

pub fn parse_triples(bytes: &[u8]) -> Result<BTreeSet<Triple>> {
    let text = std::str::from_utf8(bytes)?;
    let mut out = BTreeSet::new();
    for record in records(text, 3) {
        let (_, f) = record?;
        out.insert(Triple::new(f[0], f[1], f[2]).expect("fields validated by the reader"));
    }
    Ok(out)
}

/// Reads a flattened `subject<TAB>tag` file. Each tag string becomes a
/// [`Tag::named`] tag.
pub fn parse_pairs(bytes: &[u8]) -> Result<SubjectTagGraph> {
    let text = std::str::from_utf8(bytes)?;
    let mut facts = Vec::new();
    for record in records(text, 2) {
        let (_, f) = record?;
        facts.push((f[0].to_owned(), Tag::named(f[1])));
    }
    Ok(SubjectTagGraph::from_annotations(facts))
}

/// Writes triples in the format read by [`parse_triples`].
pub fn write_triples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let mut out = String::new();
    for t in triples {
        let _ = writeln!(out, "{}\t{}\t{}", t.subject(), t.relation(), t.object());
    }
    out
}

/// Writes a graph in the format read by [`parse_pairs`]. Only meaningful
/// for graphs whose tags were built with [`Tag::named`].
pub fn write_pairs(graph: &SubjectTagGraph) -> String {
    let mut out = String::new();
    for (s, t) in graph.facts() {
        let _ = writeln!(out, "{s}\t{}", t.object());
    }
    out
}

#[derive(Debug, Clone)]
pub struct Flattened {
    pub graph: SubjectTagGraph,
    /// Subjects that lost every annotation to the relation filter.
    pub skipped_subjects: usize,
}

/// Converts triples into subject/tag annotations, optionally keeping only
/// triples whose relation equals `relation_filter`.
pub fn flatten(triples: &BTreeSet<Triple>, relation_filter: Option<&str>) -> Result<Flattened> {
    if triples.is_empty() {
        return Err(Error::EmptyResult("no triples to flatten".into()));
    }
    let all_subjects: BTreeSet<&str> = triples.iter().map(Triple::subject).collect();
    let kept = triples
        .iter()
        .filter(|t| relation_filter.is_none_or(|r| t.relation() == r))
        .map(|t| (t.subject().to_owned(), t.tag()));
    let graph = SubjectTagGraph::from_annotations(kept);
    if graph.is_empty() {
        return Err(Error::EmptyResult(format!(
            "relation filter `{}` matched no triple",
            relation_filter.unwrap_or_default()
        )));
    }
    Ok(Flattened {
        skipped_subjects: all_subjects.len() - graph.subject_count(),
        graph,
    })
}

/// Annotates every subject with the synthetic tag `(root_label, root_label)`.
pub fn inject_root(graph: &SubjectTagGraph, root_label: &str) -> Result<SubjectTagGraph> {
    if root_label.is_empty() || root_label.contains(['\t', '\n', '\r']) {
        return Err(Error::Config(format!("invalid root label `{}`", root_label.escape_debug())));
    }
    let root = Tag::named(root_label);
    if graph.tag_id(&root).is_some() {
        return Err(Error::Conflict(format!(
            "tag `{root}` is already in the vocabulary"
        )));
    }
    Ok(graph.with_tag_on_every_subject(&root))
}
