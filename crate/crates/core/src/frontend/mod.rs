//! Text format, built-in catalog, JSON report and command line.

pub mod catalog;
pub mod cli;
pub mod parser;
pub mod report_json;
pub mod serialize;

pub use catalog::{builtin, CatalogEntry};
pub use cli::cli_main;
pub use parser::{parse_document, parse_manifold, SpecDocument};
pub use serialize::serialize_manifold;
