//! Mining author-profile corrections from snapshot histories of a
//! bibliographic collection.
//!
//! Everything here works on in-memory values and needs only `alloc`; file
//! formats, the CLI and parallel drivers live in the `corrhist` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod annotation;
pub mod blocking;
pub mod casegraph;
pub mod chain;
pub mod date;
pub mod error;
pub mod extract;
pub mod generator;
pub mod model;
pub mod reference;
pub mod unionfind;

pub use annotation::{AnnotatedSignature, AnnotationSet, EmbeddedAnnotation, KindCounts, ValidationReport};
pub use blocking::{blocking_key, blocking_key_with, hit_rate, name_pairs, BlockingVariant, CaseMode, KeyOptions, KeyScheme};
pub use casegraph::{build_case_graphs, CaseGraph, Edge, EdgeType, Node, NodeLabel};
pub use chain::{extract_between, extract_corrections, CorrectionCase};
pub use date::Date;
pub use error::Error;
pub use extract::{detect_distributes, detect_merge_groups, detect_split_groups, CorrectionKind, RawGroup};
pub use generator::{generate, GeneratorConfig, GroundTruthLog, IntervalPlan};
pub use model::{DocKey, DocumentRecord, History, MentionKey, Profile, ProfileId, Role, Signature, Snapshot, SnapshotBuilder, VenueKey};
