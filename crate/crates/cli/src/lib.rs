//! Experiment runners and command-line plumbing for `mrpi`.

pub mod args;
pub mod config;
pub mod experiments;
pub mod failure;
pub mod svg;
