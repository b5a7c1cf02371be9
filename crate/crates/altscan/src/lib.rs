//! Detects structured language alternation inside documents.
//!
//! The pipeline: split each document into single-script runs, train
//! character-level language identifiers on labeled runs, slide a fixed-width
//! word window over each document to get a per-window language probability
//! signal, take the signal's frequency spectrum, and cluster the spectra to
//! separate periodic alternators from monolingual and loosely mixed texts.
//!
//! See the `book/` directory for a guided tour; every code block there
//! compiles and runs as a doc-test of this crate.

pub mod clustering;
pub mod corpus;
pub mod error;
pub mod langid;
pub mod spectral;
pub mod windowing;

pub use error::{Error, Result};

/// Keeps the guide honest: each chapter's code blocks run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scripts-and-segments.md")]
    mod scripts_and_segments {}
    #[doc = include_str!("../../../book/src/language-id.md")]
    mod language_id {}
    #[doc = include_str!("../../../book/src/windows-and-signals.md")]
    mod windows_and_signals {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/clustering.md")]
    mod clustering {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
}
