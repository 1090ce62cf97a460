//! Interactive growing hierarchical self-organizing maps over geotagged
//! tourist records, with TF-IDF comment features, C4.5 knowledge extraction
//! and rule-based message filtering.

pub mod batch;
pub mod c45;
pub mod color;
pub mod data;
pub mod error;
mod exact;
pub mod filter;
pub mod hierarchy;
pub mod http;
pub mod interactive;
pub mod path;
pub mod session;
pub mod som;
pub mod text;

pub use error::{Error, Result};
