//! Pseudodifferential calculus on noncommutative tori.
//!
//! The algebra `C^∞(T^n_θ)` is modelled by finitely supported Fourier series
//! in the unitaries `U^k`; symbols, toroidal symbols, oscillating integrals and
//! the operators they define are built on top of it.

pub mod algebra;
pub mod error;
pub mod fit;
pub mod gns;
pub mod lattice;
pub mod oscint;
pub mod psido;
pub mod quadrature;
pub mod smooth;
pub mod symbols;
pub mod toroidal;
pub mod verify;

pub use algebra::AlgebraElement;
pub use error::{Error, Result};
pub use lattice::{MultiIndex, ThetaMatrix};
