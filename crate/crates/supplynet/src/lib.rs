//! Std companion to `supplynet-core`: file formats, collection clients,
//! the resumable pipeline runner, the HTTP service and the CLI.

pub mod cli;
pub mod clock;
pub mod enrich;
pub mod extract;
pub mod fetch;
pub mod files;
pub mod manifest;
pub mod pipeline;
pub mod recognizer;
pub mod report;
pub mod search;
pub mod seed;
pub mod service;
pub mod store;
