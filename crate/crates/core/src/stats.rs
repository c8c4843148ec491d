//! Tag occurrence and co-occurrence counts, and the generality score
//! derived from them.
//!
//! The generality of a tag `a` is `sum over b != a of N(a,b) / N(b)`:
//! how much of every other tag's extension `a` covers.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{SubjectTagGraph, Tag, TagId};

#[derive(Debug)]
pub struct CooccurrenceStats {
    tags: Vec<Tag>,
    n: Vec<u32>,
    /// Symmetric sparse rows: `rows[a]` lists `(b, N(a,b))` for every
    /// `b != a` with a nonzero count, sorted by `b`.
    rows: Vec<Vec<(TagId, u32)>>,
    generality: OnceLock<Vec<f64>>,
}

type PairCounts = HashMap<(u32, u32), u32>;

fn merge(a: PairCounts, b: PairCounts) -> PairCounts {
    let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    for (k, v) in small {
        *big.entry(k).or_default() += v;
    }
    big
}

/// Counts `N(t)` and `N(a,b)` over the graph's subjects.
///
/// Each subject contributes every unordered pair of its own annotations, so
/// the cost is the sum of squared annotation set sizes. Subjects are
/// sharded across the current rayon pool; the merged counts are integers
/// and therefore identical for any worker count.
pub fn count(graph: &SubjectTagGraph) -> CooccurrenceStats {
    let v = graph.tag_count();
    let mut n = vec![0u32; v];
    for (_, ids) in graph.iter() {
        for id in ids {
            n[id.index()] += 1;
        }
    }
    let pairs: PairCounts = (0..graph.subject_count())
        .into_par_iter()
        .fold(PairCounts::new, |mut acc, i| {
            let ids = graph.annotation_ids(i);
            for (k, a) in ids.iter().enumerate() {
                for b in &ids[k + 1..] {
                    *acc.entry((a.0, b.0)).or_default() += 1;
                }
            }
            acc
        })
        .reduce(PairCounts::new, merge);

    let mut rows: Vec<Vec<(TagId, u32)>> = vec![Vec::new(); v];
    for ((a, b), c) in pairs {
        rows[a as usize].push((TagId(b), c));
        rows[b as usize].push((TagId(a), c));
    }
    for row in &mut rows {
        row.sort_unstable_by_key(|&(id, _)| id);
    }
    CooccurrenceStats {
        tags: graph.tags().to_vec(),
        n,
        rows,
        generality: OnceLock::new(),
    }
}

impl CooccurrenceStats {
    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn tag_count(&self) -> usize {
        self.tags.len()
    }

    pub fn tag(&self, id: TagId) -> &Tag {
        &self.tags[id.index()]
    }

    pub fn tag_id(&self, tag: &Tag) -> Option<TagId> {
        self.tags.binary_search(tag).ok().map(TagId::from_index)
    }

    fn require(&self, tag: &Tag) -> Result<TagId> {
        self.tag_id(tag).ok_or_else(|| Error::UnknownTag(tag.to_string()))
    }

    /// Number of subjects annotated by `tag`.
    pub fn n(&self, tag: &Tag) -> Option<u32> {
        self.tag_id(tag).map(|id| self.n[id.index()])
    }

    pub fn n_by_id(&self, id: TagId) -> u32 {
        self.n[id.index()]
    }

    /// Number of subjects annotated by both tags. Zero for `a == b` and for
    /// unknown tags.
    pub fn n_pair(&self, a: &Tag, b: &Tag) -> u32 {
        match (self.tag_id(a), self.tag_id(b)) {
            (Some(a), Some(b)) => self.n_pair_by_id(a, b),
            _ => 0,
        }
    }

    pub fn n_pair_by_id(&self, a: TagId, b: TagId) -> u32 {
        let row = &self.rows[a.index()];
        row.binary_search_by_key(&b, |&(id, _)| id)
            .map(|i| row[i].1)
            .unwrap_or(0)
    }

    /// Nonzero co-occurrences of `a`, sorted by the other tag.
    pub fn row(&self, a: TagId) -> &[(TagId, u32)] {
        &self.rows[a.index()]
    }

    /// Number of stored nonzero pairs (each unordered pair counted once).
    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Generality of every tag, indexed by [`TagId`]. Computed on first use.
    pub fn generalities(&self) -> &[f64] {
        self.generality.get_or_init(|| {
            (0..self.tags.len())
                .map(|a| {
                    // Terms are added in canonical order of the other tag so
                    // that the floating point result is reproducible.
                    self.rows[a]
                        .iter()
                        .map(|&(b, c)| f64::from(c) / f64::from(self.n[b.index()]))
                        .fold(0.0, |acc, x| acc + x)
                })
                .collect()
        })
    }

    pub fn generality(&self, tag: &Tag) -> Result<f64> {
        let id = self.require(tag)?;
        Ok(self.generalities()[id.index()])
    }

    /// Tag ids by decreasing generality, ties in canonical tag order.
    pub fn generality_order(&self) -> Vec<TagId> {
        let g = self.generalities();
        let mut order: Vec<TagId> = (0..self.tags.len()).map(TagId::from_index).collect();
        order.sort_by(|a, b| g[b.index()].total_cmp(&g[a.index()]).then(a.cmp(b)));
        order
    }

    /// `tag<TAB>n<TAB>generality`, most general first.
    pub fn to_tsv(&self) -> String {
        let g = self.generalities();
        let mut out = String::new();
        for id in self.generality_order() {
            let _ = writeln!(out, "{}\t{}\t{}", self.tag(id), self.n_by_id(id), g[id.index()]);
        }
        out
    }
}
