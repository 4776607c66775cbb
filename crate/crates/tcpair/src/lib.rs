//! Certified bounds and explicit motion planners for the relative
//! topological complexity of a pair of spaces: how many continuous rules a
//! motion planner needs to steer any configuration of `X` into a target
//! subspace `Y`.
//!
//! The crate has three layers:
//!
//! * exact algebra — [`lengths`] vets polygon length vectors, [`rings`]
//!   builds graded cohomology rings over a generic coefficient field, and
//!   [`cuplength`] searches zero-divisor cup products for lower bounds;
//! * bound calculus — [`bounds`] combines closed-form catalog values,
//!   dimension/connectivity bounds, and cup-length certificates into
//!   provenance-carrying reports;
//! * geometry — [`planners`] runs the explicit sphere, wedge, and
//!   projective-pair motion planners and verifies them statistically.

pub mod bounds;
pub mod cuplength;
pub mod lengths;
pub mod planners;
pub mod rings;
pub mod scalar;

pub mod cli;

/// Graded ring over the exact rationals.
pub type RationalRing = rings::GradedRing<scalar::Rationals>;
/// Graded ring over a prime field (`PrimeField::new(2)` for F2).
pub type PrimeRing = rings::GradedRing<scalar::PrimeField>;
/// Element of a rational-coefficient ring.
pub type RationalElement = rings::RingElement<scalar::Rationals>;
/// Element of a prime-field ring.
pub type PrimeElement = rings::RingElement<scalar::PrimeField>;
