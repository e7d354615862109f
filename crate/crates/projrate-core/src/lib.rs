//! Rate functions and sampling diagnostics for low-dimensional random
//! projections of ℓ_p^n balls and spheres.
//!
//! A uniform random point of the unit ℓ_p ball in ℝⁿ (volume-normalized to
//! radius n^{1/p}), projected onto a Haar-random k-dimensional subspace with
//! k = o(n), obeys a large deviation principle at speed n. The crate
//! computes the governing rate functions and verifies them empirically:
//!
//! - [`mgf`]: the p-generalized normal distribution, its joint log-MGF
//!   oracle Λ̄(t₁, t₂) = log E exp(t₁X + t₂|X|^p), and exponentially tilted
//!   samplers.
//! - [`geometry`]: Stiefel frames, Haar sampling, the n^{−1/2}-scaled
//!   projection, and the ordering map underlying the projection topology.
//! - [`weingarten`]: exact mixed moments of Haar frame columns via the
//!   orthogonal Weingarten calculus, with Gaussian comparison checks.
//! - [`rates`]: the variational rate functions (annealed norm rate, ball
//!   and sphere rates, max-coordinate rate) by concave maximization of the
//!   dual objective.
//! - [`montecarlo`]: quenched-frame tail estimation by naive and tilted
//!   importance sampling, LDP slope tables, and the Gaussian-approximation
//!   and tightness diagnostics.
//!
//! The crate is `no_std` (with `alloc`) when built without the default
//! `std` feature; all numerics route through [`libm`] in that mode.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod geometry;
pub mod mgf;
pub mod montecarlo;
mod num;
pub mod rates;
pub mod stream;
pub mod weingarten;

pub use error::{Error, Result};
