//! Combinatorics of extended affine Weyl groups with Frobenius: class
//! polynomials, parahoric volumes and invariants of affine Deligne–Lusztig
//! varieties, computed exactly on small root data.

pub mod adlv;
pub mod affineweyl;
pub mod cache;
pub mod classpoly;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod parahoric;
pub mod presets;
pub mod repcalc;
pub mod rootdata;
pub mod sigmaconj;

pub use error::{Error, Result};

/// Bumped whenever cached class polynomials could change.
pub const ENGINE_VERSION: &str = "adlvlab-engine-1";
