//! Std companion to `cmrep-core`: TOML file formats, a bundled example
//! corpus, deterministic quadrature and sampling, complex Gamma, numerical
//! evaluators for the representations, and the `cmrep` command-line front
//! end.
//!
//! Everything numerical is bit-reproducible for a fixed seed regardless of
//! the worker thread count; see [`quad`] for the partitioning scheme.

#![forbid(unsafe_code)]

pub mod cli;
pub mod fixtures;
pub mod formats;
pub mod gamma;
pub mod numerics;
pub mod quad;
