//! Numerical workbench for pilot-wave and phase-coherence models.
//!
//! * [`field`]: ring-mode carrier fields, far-field `sin(k r)/r` and
//!   wave/Klein–Gordon residuals.
//! * [`pilot`]: split-step wave propagation and de Broglie–Bohm trajectory
//!   ensembles.
//! * [`sync`]: Kuramoto networks with distance-dependent coupling and the
//!   triangle/tetrahedron geometry experiments.
//! * [`bell`]: light-cone audit of Bell-test geometries and CHSH Monte Carlo
//!   for local models.
//!
//! Units are natural (`c = ħ = m = 1`) except in [`bell`], which works in SI.

// `!(x > 0.0)` is used deliberately so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference values keep every digit of the high-precision oracle.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod bell;
pub mod field;
pub mod pilot;
pub mod rng;
pub mod stats;
pub mod sync;
