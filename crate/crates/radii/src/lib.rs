//! Validated continuation of steady states of a three-component
//! Mimura-type reaction-diffusion system.
//!
//! The crate computes branches of steady states by pseudo-arclength
//! continuation of a cosine Galerkin projection and proves, segment by
//! segment, that a unique smooth solution curve lives in an explicit tube
//! around the computed piecewise-linear skeleton.  The proofs use radii
//! polynomials whose coefficients are evaluated in outward-rounded interval
//! arithmetic.
//!
//! Layering, bottom to top: [`interval`], [`seqspace`], [`mimura`],
//! [`estimates`], [`contraction`], [`continuation`], [`certify`].

// `!(x < y)` is how NaN-safe comparisons are spelled throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod certify;
pub mod continuation;
pub mod contraction;
pub mod estimates;
pub mod interval;
pub mod linalg;
pub mod mimura;
pub mod scalar;
pub mod seqspace;

pub use interval::Interval;
pub use mimura::{Model, ModelParams};
pub use seqspace::{CosinePoint, CosineSeq, SpaceParams};
