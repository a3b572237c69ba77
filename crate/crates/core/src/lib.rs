//! Multi-version models over typed graphs.
//!
//! A [`versioning::ModelVersioning`] is a DAG of typed-graph versions over one
//! [`graph::ElementStore`]. [`mvm::comb`] folds it into a single
//! [`mvm::MultiVersionModel`], on which [`analysis`] answers three questions
//! without materializing versions or merges:
//!
//! * which versions violate a well-formedness pattern ([`analysis::pcheck_mv`]),
//! * which version pairs have insert-delete conflicts under three-way merge
//!   ([`analysis::mcheck_mv`]),
//! * which merge results are ill-formed regardless of how conflicts are
//!   resolved ([`analysis::pcheck_m_mv`]).
//!
//! [`baseline`] computes the same answers version by version and merge by
//! merge; the two routes are compared by the `oracle` and `bench` commands.

pub mod analysis;
pub mod baseline;
pub mod bench;
pub mod cli;
pub mod error;
pub mod generator;
pub mod graph;
pub mod io;
pub mod merge;
pub mod mvm;
pub mod versioning;

pub use error::{GraphError, MergeError, MvmError, VersioningError};
