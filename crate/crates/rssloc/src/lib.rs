//! Monte-Carlo harness, file formats and CLI for RSS-based localization.
//!
//! The algorithms live in [`rssloc_core`]; this crate adds what needs an
//! operating system: seeded trial batches with wall-clock timing
//! ([`harness`]), JSON/CSV readers and writers ([`formats`]), and the
//! `rssloc` command-line front end ([`cli`]).

pub mod cli;
pub mod error;
pub mod formats;
pub mod harness;

pub use error::AppError;
