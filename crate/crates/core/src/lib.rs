//! Melnikov analysis of periodically forced symmetric codimension-two
//! (double-zero) bifurcations, with a numerical harness for the
//! feedback-controlled pendulum.

pub mod bifurcation;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod io;
pub mod melnikov;
pub mod normalform;
pub mod ode;
pub mod orbits;
pub mod pendulum;
pub mod quad;

pub use error::{Error, Result};
