//! File formats, collection builders and parallel drivers around
//! `corrhist-core`.

pub mod annotation_xml;
pub mod cli;
pub mod collection;
pub mod error;
pub mod graph_xml;
pub mod ingest;
pub mod tsv;
pub mod workers;
mod xml;

pub use error::{Error, Result};
pub use xml::decode;
