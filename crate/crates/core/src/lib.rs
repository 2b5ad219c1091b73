//! Labelled sequent calculus for finitely bounded inquisitive first-order
//! logic: syntax, support semantics, proof search with countermodel
//! extraction, admissible-rule transformers and a scheme library.

pub mod calculus;
pub mod saturate;
pub mod schemes;
pub mod transform;
mod stack;
pub mod selftest;
pub mod semantics;
pub mod syntax;
