//! Binary decision diagrams for the shifted addition `A + (B >> D)` and the
//! fooling-set machinery behind its exponential lower bound.
//!
//! - [`bdd`]: a plain reduced ordered BDD engine with size and width accounting.
//! - [`sadd`]: the barrel-shifter + ripple-carry construction and an integer reference.
//! - [`fooling`]: balanced partitions, split pairs, fooling-set construction and checks.
//! - [`harness`]: random-ordering experiments, lemma sweeps, bounds and CSV output.

pub mod bdd;
pub mod fooling;
pub mod harness;
pub mod sadd;
