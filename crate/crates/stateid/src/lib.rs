//! Bounded-error quantum state identification.
//!
//! Computes the state identification value `D_eps` (the maximal answer
//! probability of a measurement whose outcome is an `(a, eps)`-predictor)
//! via semidefinite programming, builds and verifies dual certificates for
//! the direct product theorem, solves the classical (diagonal) case
//! exactly, and simulates the associated simultaneous-message-passing
//! protocols.

pub mod classical;
pub mod ident;
pub mod linmat;
pub mod sdp;
pub mod smp;
