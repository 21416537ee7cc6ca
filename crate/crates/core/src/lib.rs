//! Process mining toolkit.
//!
//! Objects ([`eventlog`], [`petrinet`]), algorithms ([`discovery`], [`conformance`],
//! [`evaluation`], [`analytics`]) and visualizations ([`render`]) are kept in separate modules.
//! Every algorithm has a single entry point taking the input objects plus parameters.

pub mod analytics;
pub mod cli;
pub mod conformance;
pub mod discovery;
pub mod evaluation;
pub mod eventlog;
pub mod ingest;
pub mod petrinet;
pub mod render;
