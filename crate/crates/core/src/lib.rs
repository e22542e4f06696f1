//! Semantic maps built from a domain corpus.
//!
//! The pipeline reads a corpus ([`ingest`]), normalizes tokens into lexical
//! units ([`morpho`]), extracts relations and selects each headword's
//! contexonyms ([`relations`]), enumerates the maximal cliques of the
//! contexonym graph ([`cliques`]) and places cliques and contexonyms in a
//! factor space by correspondence analysis ([`ca`]). The [`atlas`] module
//! runs the whole chain over a vocabulary, persists the resulting resource
//! with a sense → context index, and compares resources. [`serve`] holds the
//! command-line entry points and the read-only HTTP API.

pub mod atlas;
pub mod ca;
pub mod cliques;
pub mod config;
pub mod error;
pub mod ingest;
pub mod morpho;
pub mod relations;
pub mod serve;
pub mod synthetic;

pub use error::{Error, Result};
pub use morpho::{LexicalUnit, PosTag};
