//! Hierarchical clustering of knowledge graph subjects.
//!
//! The pipeline flattens triples into subject/tag annotations, induces a
//! tag hierarchy from co-occurrence statistics, assigns each subject to the
//! node whose root path best matches its tags, prunes empty nodes, and
//! scores the result with three F1 measures.
//!
//! ```
//! use taxoclust::{assign, count, fixture_g0, induce, prune, InductionConfig};
//!
//! let graph = fixture_g0();
//! let stats = count(&graph);
//! let tree = induce(&stats, InductionConfig::new(0.5).unwrap()).unwrap();
//! let clusters = prune(&assign(&graph, &tree).unwrap());
//! assert_eq!(clusters.len(), 4);
//! ```

pub mod clustering;
pub mod error;
pub mod evaluation;
pub mod export;
pub mod hierarchy;
pub mod induction;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod pruning;
pub mod stats;

pub use clustering::{assign, assignments, belonging, Assignment};
pub use error::{Error, Result};
pub use evaluation::{
    hie_f1, inherit, sub_f1, tag_f1, F1Score, GoldHierarchy, MetricReport, RecallDenominator,
};
pub use hierarchy::{ClusterHierarchy, TagHierarchy};
pub use induction::{induce, similarity, InductionConfig};
pub use ingest::{flatten, inject_root, parse_pairs, parse_triples, InputFormat};
pub use model::{fixture_g0, SubjectTagGraph, Tag, TagId, Triple};
pub use pipeline::{run, run_alpha, AlphaGrid, PipelineConfig, Prepared};
pub use pruning::prune;
pub use stats::{count, CooccurrenceStats};
