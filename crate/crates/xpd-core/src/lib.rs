//! Reasoning toolkit for downward XPath with data (in)equality tests.
//!
//! The crate is organised bottom-up:
//!
//! * [`ast`] — two-sorted syntax, parser, printer, length and downward depth;
//! * [`semantics`] — data trees and the denotational evaluator;
//! * [`axioms`] — axiom schemes, matching, the derivation checker and a
//!   soundness fuzzer;
//! * [`normal_form`] — the level-indexed normal forms and normalization;
//! * [`canonical`] — model construction for normal forms (build and verify);
//! * [`decision`] — satisfiability, validity and equivalence;
//! * [`oracle`] — brute-force enumeration of small trees used as an
//!   independent reference;
//! * [`generate`] — seeded random expressions and trees for fuzzing.

pub mod ast;
pub mod axioms;
pub mod canonical;
pub mod decision;
pub mod error;
pub mod generate;
pub mod normal_form;
pub mod oracle;
pub mod semantics;

pub use error::{Error, Result};
