//! File formats, parallel verification, the random-graph experiment and the
//! command-line front end for `hatguess-core`.

pub mod cli;
pub mod experiment;
pub mod formats;
pub mod parallel;

pub use hatguess_core as core;
