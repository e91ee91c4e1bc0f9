//! Numerics for a pseudo-Hermitian spin–oscillator model.
//!
//! The model Hamiltonian
//!
//! ```text
//! H = (ε/2) σ_z + ħω a†a + ρ (σ₊ a − σ₋ a†)
//! ```
//!
//! is non-Hermitian but pseudo-Hermitian, and it leaves every two-state
//! subspace `span{|n, ½⟩, |n+1, −½⟩}` invariant. On each such block the
//! crate builds the closed-form eigensystem, the positive-definite metric
//! operator η, and uses the η-inner product to make two nearly identical
//! entangled states orthogonal. A second route discriminates the same
//! states through non-unitary time evolution and locates the exceptional
//! point where that evolution breaks down.
//!
//! Units: ħ = 1, every energy in one common unit, time in inverse energy.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod blocks;
pub mod error;
pub mod evolution;
pub mod fockspace;
pub mod linalg;
pub mod metric;
mod roots;
pub mod states;

pub use error::{Error, Result};
pub use fockspace::ModelParams;
pub use linalg::{CMatrix, C64};
