//! Persistent homology with explicit cycle representatives over finite
//! fields, plus machinery for relating bars and cycles between two
//! filtered complexes: persistent extension and analogous bars.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats, and the
//! command-line front end live in the companion `barbridge` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod analogous;
pub mod complex;
pub mod decompositions;
pub mod dowker;
mod error;
pub mod extension;
pub mod field;
pub mod linalg;
pub mod persistence;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
