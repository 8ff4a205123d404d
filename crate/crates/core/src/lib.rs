//! Computational group theory toolkit: Stallings graphs and malnormality
//! certificates, a presentation pipeline that encodes a word problem into a
//! finite presentation, finite-quotient search in symmetric groups, and
//! combinatorial square complexes.

pub mod encoder;
pub mod error;
pub mod presentations;
pub mod quotients;
pub mod report;
pub mod squarecx;
pub mod stallings;
pub mod words;

pub use error::{Error, Result};
