//! Partial Latin squares and the machinery around them: exact substructure
//! counts, quadrangle checks, group reconstruction, decomposition counts,
//! randomized dense-subset extraction, van Kampen distance search, metric
//! entropy on finite metric groups and rotation nets in SO(3).
//!
//! Hot loops run on rayon when the `parallel` feature is enabled (the
//! default); without it, or after [`par::force_sequential`], every kernel
//! runs on the calling thread with identical results.

pub mod corpus;
pub mod count;
pub mod cycle;
pub mod decomposition;
pub mod disc;
pub mod entropy;
pub mod error;
pub mod extraction;
pub mod num;
pub mod par;
pub mod pls;
pub mod quadrangle;
pub mod so3;
pub mod vankampen;

pub use error::{Error, Result};
pub use num::Count;
pub use pls::{GenSpec, PartialBinaryOp, PartialLatinSquare, Perm3, Triple};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
