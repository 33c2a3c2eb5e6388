//! Traveling-wave solutions of the asymmetric double sine-Gordon equation
//!
//! ```text
//! θ_tt − θ_xx + sin(θ + φ) + 2η sin 2θ = 0
//! ```
//!
//! Solutions are sought as `θ = 2 arctan f(s)`, `s = x − t`, with `f` a Möbius
//! image of `sinh(rs)`. The asymptote `f₃` and the action `S` come from the
//! closed-form roots of a quartic; the turning points and Möbius coefficients
//! follow from Vieta's relations. A Newton solver for the coefficient system,
//! classical `φ = 0` fixtures and energy quadrature are provided to
//! cross-check every stage.

pub mod classical;
pub mod energy;
pub mod errata;
mod error;
pub mod exec;
pub mod mobius;
pub mod polyroots;
pub mod potential;
pub mod quad;
pub mod system57;
pub mod verify;

pub use error::{DsgeError, Result};
pub use potential::{Branch, DsgeParams};

/// Complex scalar used for quartic roots and turning points.
pub type C64 = num_complex::Complex64;
