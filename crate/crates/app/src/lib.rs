//! Command line and HTTP service around `stv-core`.

pub mod cli;
pub mod config;
pub mod ingest;
pub mod server;
pub mod store;
