//! Real radicals of polynomial ideals through moment optimization.
//!
//! A generic positive truncated functional is computed by semidefinite programming,
//! a graded basis of its annihilator is extracted by orthogonalization, and
//! components are certified real by a sign-change moment program.
#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod annihilator;
pub mod error;
pub mod geometry;
pub mod polycore;
pub mod radical;
pub mod realness;
pub mod moments;
pub mod sdp;

pub use error::{Error, Result};
