//! Hat guessing games on graphs.
//!
//! Every vertex of a graph wears a hat colored from `{0, .., q-1}`, sees the
//! hats of its neighbours, and guesses its own color. A strategy profile wins
//! when every coloring has at least one correct guess. This crate holds the
//! game itself ([`game`]), an exact strategy search ([`solver`]), the
//! known-set primitive for cliques ([`clique`]) and the constructions and
//! adversaries built on top of them ([`planar`], [`book`], [`linear`],
//! [`randgraph`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod book;
pub mod clique;
pub mod coloring;
mod combin;
pub mod error;
pub mod field;
pub mod game;
pub mod graph;
pub mod linear;
pub mod planar;
pub mod randgraph;
pub mod solver;
pub mod spread;
pub mod strategy;

pub use coloring::Coloring;
pub use error::{HatError, Result};
pub use game::{evaluate, verify, VerifyMode, VerifyOutcome};
pub use graph::{Graph, Shape};
pub use strategy::{Guesser, StrategyProfile, StructuredGuesser, StructuredRule};

pub use num_bigint::BigUint;

/// A hat color, always a representative in `0..q`.
pub type Color = u32;

/// Default cap on the number of colorings an exhaustive sweep may visit.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;
