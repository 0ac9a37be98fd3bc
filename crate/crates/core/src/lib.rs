//! Exactly solvable position-dependent-mass Schrödinger models whose bound
//! states are X_m-Laguerre exceptional orthogonal polynomials.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`] and [`orthopoly`] build classical and exceptional Laguerre
//!   polynomials, exactly when the parameter is rational.
//! * [`models`] evaluates the two mass families analytically: mass profile,
//!   change of variable, effective potential, spectrum and eigenfunctions.
//! * [`susy`] adds superpotentials, ladder operators and partner potentials.
//! * [`solver`] is an independent finite-difference eigensolver used to
//!   cross-check everything above.

pub mod models;
pub mod orthopoly;
pub mod poly;
pub mod quad;
pub mod solver;
pub mod susy;

pub use models::{BoundState, Case1Params, Case2Params, ModelError, ModelKind};
pub use orthopoly::{Convention, OrthoError, XmFamily};
pub use poly::{Polynomial, Scalar};
