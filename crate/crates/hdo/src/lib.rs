//! Experiment runner, report generation and the decision-maker HTTP service
//! built on `hdo-core`.

pub mod report;
pub mod rmnk_file;
pub mod service;
pub mod suite;
