//! Interactive evolutionary multi-objective optimization that learns, from a
//! decision maker's rankings, which objectives actually matter and switches the
//! optimizer over to them while it runs.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure computation:
//!
//! * [`types`]: objective vectors, activity masks, lazily evaluated individuals
//!   and objective-evaluation accounting.
//! * [`problems`]: DTLZ1/2/7 with bounded domains and correlated multi-objective
//!   NK landscapes.
//! * [`moea`]: NSGA-II with a pluggable within-front criterion.
//! * [`mdm`]: the simulated decision maker (quadratic and Tchebychef utilities).
//! * [`learning`]: pairwise rank-SVM surrogate utility.
//! * [`detection`]: univariate F-test selection and recursive feature elimination.
//! * [`orchestrator`]: the interactive driver as a resumable state machine.
//!
//! File formats, the experiment runner and the HTTP session service live in the
//! `hdo` companion crate.

#![no_std]

extern crate alloc;

pub mod detection;
pub mod error;
pub mod learning;
mod linalg;
pub mod mdm;
pub mod moea;
pub mod orchestrator;
pub mod problems;
pub mod stats;
pub mod types;

pub use error::{Error, Result};
pub use types::{apply_mask, dominates, ActiveMask, Decision, EvalCounter, Individual, ObjectiveVector, RelevantSet};
