//! Classical r-matrix machinery for finite-dimensional matrix Lie algebras.
//!
//! The crate is organised bottom-up:
//!
//! * [`liealg`] builds matrix Lie algebras, brackets, pairings and
//!   Lie-Poisson brackets of polynomial observables.
//! * [`dialgebra`] handles endomorphism r-matrices `R`, the bracket
//!   `[X,Y]_R`, (modified) Yang-Baxter residuals and the double `g ⊕ g`.
//! * [`bialgebra`] handles tensor r-matrices `r ∈ g⊗g`, coboundary cocycles,
//!   Schouten and `<r,r>` brackets and the double `g ⊕ g*`.
//! * [`factorization`] solves the group factorisation problem for the two
//!   splits of `sl(n)` used by the Toda chains and propagates Lax flows.
//! * [`lax`] integrates Lax equations with RK4 and monitors invariants.
//! * [`toda`] instantiates the open, Cartan-split and periodic Toda chains.

pub mod bialgebra;
pub mod dialgebra;
mod error;
pub mod factorization;
pub mod lax;
pub mod liealg;
mod tolerance;
pub mod toda;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
