//! Exact and numerical experiments for the large sieve with power moduli over
//! the Gaussian integers.
//!
//! The crate is organized bottom-up:
//!
//! - [`gaussint`]: exact arithmetic in `Z[i]`.
//! - [`lattice`]: planar lattices, duals, disk enumeration, Poisson summation.
//! - [`weights`]: the analytic weights with closed-form transforms and a
//!   quadrature oracle.
//! - [`sieve`]: moduli families, coefficient sequences, the sieve sum `T`, and
//!   the comparison bounds.
//! - [`spacing`]: the point-clustering count `K` in three formulations.
//! - [`weylsum`]: the differenced exponential sums behind the power-moduli bound.
//! - [`duality`]: best constants of the two dual quadratic forms.
//! - [`harness`]: configuration, experiment drivers, and report emission.

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod duality;
pub mod gaussint;
pub mod harness;
pub mod lattice;
pub mod sieve;
pub mod spacing;
pub mod sum;
pub mod weights;
pub mod weylsum;

pub use gaussint::GaussInt;
