//! Workbench for finitely generated group actions and the growth of their
//! Schreier graphs.
//!
//! The crate builds concrete actions (the Grigorchuk group on tree levels,
//! lamplighter wreath products on coset spaces, Houghton groups on rayed
//! stars, cyclic groups on cycles), glues marked orbit graphs into chains
//! carrying graph-product actions, and measures ball growth on the result:
//! gluing growth bounds, faithfulness witnesses, controlled-diameter
//! displacement certificates, and the sparse-support quadratic lower-bound
//! probe.

pub mod error;
pub mod factor;
pub mod gluing;
pub mod graph;
pub mod grigorchuk;
pub mod growth;
pub mod houghton;
pub mod lamplighter;
pub mod word;

pub mod experiment;

pub use error::{Error, Result};
