//! Greedy construction of the tag hierarchy.
//!
//! The most general tag becomes the root. The remaining tags are placed one
//! at a time in decreasing generality order, each under the already placed
//! tag with the highest decayed path similarity:
//!
//! ```text
//! S(a -> b) = sum over c on root_path(a) of alpha^(level(a) - level(c)) * N(b,c) / N(b)
//! ```
//!
//! where `a` is the candidate parent and `b` the incoming tag.

use crate::error::{Error, Result};
use crate::hierarchy::TagHierarchy;
use crate::model::{Tag, TagId};
use crate::stats::CooccurrenceStats;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InductionConfig {
    alpha: f64,
}

impl InductionConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(InductionConfig { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// `alpha^k` for k = 0, 1, ... built by repeated multiplication, so the
/// same exponent always yields the same bits.
struct DecayTable {
    alpha: f64,
    powers: Vec<f64>,
}

impl DecayTable {
    fn new(alpha: f64) -> Self {
        DecayTable {
            alpha,
            powers: vec![1.0],
        }
    }

    fn ensure(&mut self, k: usize) {
        while self.powers.len() <= k {
            let next = self.powers[self.powers.len() - 1] * self.alpha;
            self.powers.push(next);
        }
    }

    fn get(&self, k: usize) -> f64 {
        self.powers[k]
    }
}

/// Path sum over `ratios` given root first; the last entry is the candidate.
fn path_sum(ratios: impl ExactSizeIterator<Item = f64>, decay: &DecayTable) -> f64 {
    let deepest = ratios.len() - 1;
    let mut acc = 0.0;
    for (j, r) in ratios.enumerate() {
        acc += decay.get(deepest - j) * r;
    }
    acc
}

/// Decayed path similarity of `incoming` to the placed tag `placed`.
pub fn similarity(
    tree: &TagHierarchy,
    placed: &Tag,
    incoming: &Tag,
    stats: &CooccurrenceStats,
    alpha: f64,
) -> Result<f64> {
    let path = tree
        .root_path(placed)
        .ok_or_else(|| Error::Usage(format!("`{placed}` is not in the tree")))?;
    if tree.contains(incoming) {
        return Err(Error::Usage(format!("`{incoming}` is already placed")));
    }
    let b = stats
        .tag_id(incoming)
        .ok_or_else(|| Error::UnknownTag(incoming.to_string()))?;
    let ids = path
        .iter()
        .map(|t| stats.tag_id(t).ok_or_else(|| Error::UnknownTag(t.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let n_b = f64::from(stats.n_by_id(b));
    let mut decay = DecayTable::new(alpha);
    decay.ensure(ids.len());
    Ok(path_sum(
        ids.iter().map(|&c| f64::from(stats.n_pair_by_id(b, c)) / n_b),
        &decay,
    ))
}

/// Builds the tag hierarchy over the full vocabulary of `stats`.
pub fn induce(stats: &CooccurrenceStats, config: InductionConfig) -> Result<TagHierarchy> {
    if stats.tag_count() == 0 {
        return Err(Error::Usage("cannot induce a hierarchy over an empty vocabulary".into()));
    }
    let generality = stats.generalities();
    let order = stats.generality_order();
    let root = order[0];

    let mut decay = DecayTable::new(config.alpha);
    let mut tree = TagHierarchy::new(stats.tag(root).clone());
    // Placed tags in placement order with their root paths.
    let mut placed: Vec<(TagId, Vec<TagId>)> = vec![(root, vec![root])];
    let mut ratio = vec![0.0f64; stats.tag_count()];

    for &incoming in &order[1..] {
        let n_b = f64::from(stats.n_by_id(incoming));
        for &(c, count) in stats.row(incoming) {
            ratio[c.index()] = f64::from(count) / n_b;
        }

        let mut best: Option<(usize, f64)> = None;
        for (k, (cand, path)) in placed.iter().enumerate() {
            decay.ensure(path.len());
            let s = path_sum(path.iter().map(|c| ratio[c.index()]), &decay);
            let better = match best {
                None => true,
                Some((bk, bs)) => {
                    let incumbent = placed[bk].0;
                    s > bs
                        || (s == bs
                            && (generality[cand.index()] > generality[incumbent.index()]
                                || (generality[cand.index()] == generality[incumbent.index()]
                                    && *cand < incumbent)))
                }
            };
            if better {
                best = Some((k, s));
            }
        }
        let parent_slot = match best {
            Some((k, s)) if s > 0.0 => k,
            // Nothing on any path co-occurs with the incoming tag.
            _ => 0,
        };

        for &(c, _) in stats.row(incoming) {
            ratio[c.index()] = 0.0;
        }

        let (parent, parent_path) = &placed[parent_slot];
        let mut path = parent_path.clone();
        path.push(incoming);
        tree.attach(stats.tag(*parent), stats.tag(incoming).clone())?;
        placed.push((incoming, path));
    }
    Ok(tree)
}
