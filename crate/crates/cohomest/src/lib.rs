//! Validated numerics for the cohomological equation `u(θ) − u(θ+ω) = v(θ)`
//! on the one- and two-dimensional torus.
//!
//! The crate computes analytic sup-norms of Fourier series with rigorous
//! discrete-Fourier error bounds, solves the small-divisor equation
//! coefficient-wise, evaluates classic and computer-assisted Rüssmann
//! constants, and measures how much those estimates overshoot the true
//! solution norm.

pub mod error;
pub mod precision;
pub mod diophantine;
pub mod torusfn;
pub mod testfam;
pub mod cohomology;
pub mod russmann;
pub mod experiments;

pub use error::{Error, Result};
pub use precision::{PrecisionContext, XComplex, XInterval, XReal};
