//! Verification toolkit for square-free words under positional letter constraints.
//!
//! The library is organised around one pipeline:
//!
//! * [`words`] — alphabets, words, partial words (with holes), square
//!   detection and compatibility testing;
//! * [`rauzy`] — Rauzy graphs of bounded-period square-free words and their
//!   suffix-compressed quotients, plus a text serialization;
//! * [`prune`] — the walk-count dynamic program and the greatest-fixed-point
//!   subgraph computation that certifies a branching guarantee;
//! * [`certificate`] — exact rational verification of the weight-system
//!   inequality that upgrades the branching guarantee to "infinitely many
//!   square-free words are compatible with every block word";
//! * [`search`] — exhaustive backtracking counts of square-free words
//!   compatible with a periodic partial word, and brute-force oracles used to
//!   cross-check the other modules.

pub mod certificate;
pub mod prune;
pub mod rauzy;
pub mod search;
pub mod words;
