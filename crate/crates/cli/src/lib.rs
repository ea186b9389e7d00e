//! Configuration, sweep evaluation and CSV output behind the `hetcov` binary.

pub mod config;
pub mod output;
pub mod run;
pub mod sweep;
