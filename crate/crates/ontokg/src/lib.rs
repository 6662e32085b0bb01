//! File formats, providers and the experiment runner around `ontokg-core`.

pub use ontokg_core as core;

pub mod backend;
pub mod corpus;
pub mod csv_io;
pub mod experiment;
pub mod http;
pub mod index_cache;
pub mod mock;
pub mod trace;
