//! Exact transfer of A∞-structures along chain contractions.
//!
//! Scalars are exact (ℚ or 𝔽_p), spaces are finite-dimensional and homologically
//! graded (∂ has degree −1), and every map is a sparse homogeneous multilinear map.

pub mod ainfty;
pub mod bar;
pub mod cli;
pub mod document;
pub mod error;
pub mod fixtures;
pub mod index;
pub mod linalg;
pub mod map;
pub mod minimal;
pub mod report;
pub mod scalar;
pub mod space;
pub mod transfer;
pub mod trees;

pub use error::{Error, Result};
