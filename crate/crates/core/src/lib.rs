//! Hereditarily finite set kernel with hash-consing, tagged constructor
//! encodings, and rubric-driven generation engines.
//!
//! The crate is organized bottom-up:
//!
//! - [`hfset`]: the interning store and canonical set algebra;
//! - [`encodings`]: numerals, pairs, tuples, function graphs, and the tagged
//!   constructor layer;
//! - [`terms`]: signatures and well-founded terms over them;
//! - [`genengine`]: rubrics, broad rubrics, and the generation engines;
//! - [`broadnum`]: broad signatures and broad-number fragments with the
//!   structure-preserving translations between their presentations;
//! - [`spection`]: descendant-style generation relative to a class and a
//!   child assignment, with the built-in instances;
//! - [`ordinal`]: ordinal arithmetic in Cantor normal form below `w^w`,
//!   order types, Hartogs and Lindenbaum numbers, and cumulative stages;
//! - [`universes`]: Tarski-style universe construction;
//! - [`oracle`]: independent brute-force checkers used to validate the
//!   engines.

pub mod broadnum;
pub mod budget;
pub mod encodings;
pub mod genengine;
pub mod hfset;
pub mod oracle;
pub mod ordinal;
pub mod spection;
pub mod terms;
pub mod universes;

pub use hfset::{HfError, HfSet, Store};
