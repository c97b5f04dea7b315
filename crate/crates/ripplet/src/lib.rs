//! Construction toolkit for a family of nonstationary refinable ripplets.
//!
//! The pipeline runs from explicit scaling masks through cascade
//! evaluation of the refinable functions, minimally supported prewavelet
//! masks via an iterative Gramian algorithm, biorthogonal dual filters
//! via a Bezout-type linear system, and multilevel perfect-reconstruction
//! filter banks for discrete signals.
//!
//! Modules follow the pipeline order:
//!
//! * [`laurent`] — coefficient sequences and Laurent-symbol arithmetic;
//! * [`masks`] — the scaling masks, their symbols and transition matrices;
//! * [`refinable`] — cascade evaluation and numeric property checks;
//! * [`prewavelet`] — cross-scale Gramians and prewavelet masks;
//! * [`biorthogonal`] — dual masks and wavelet filter quartets;
//! * [`filterbank`] — multilevel analysis/synthesis and the spike
//!   compression comparison.

pub mod biorthogonal;
pub mod error;
pub mod filterbank;
pub mod laurent;
pub mod masks;
pub mod prewavelet;
pub mod reference;
pub mod refinable;

pub use error::{Error, Result};
