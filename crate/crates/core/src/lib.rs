//! Large subsets of `{1, ..., N}` with no three-term arithmetic progression.
//!
//! The main construction ([`elkin`]) pulls a thin annulus of the torus `T^d`
//! back along a random orbit `n -> theta n + alpha`, then deletes an element
//! from each surviving progression. [`behrend`] provides the classical
//! digit-sphere baseline, [`oracle`] computes `r3(N)` exactly for small `N`,
//! and [`apcore`] certifies every output with exact integer arithmetic.

pub mod apcore;
pub mod behrend;
pub mod bounds;
pub mod cli;
pub mod elkin;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod rng;

pub use apcore::{ApTriple, CandidateSet};
pub use error::{Error, Result, SetError};
pub use geometry::{AnnulusSpec, TorusPoint, VolumeEstimate};
