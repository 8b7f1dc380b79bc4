//! Numerical core for a sulphation reaction-diffusion system on the half-line
//! driven by a stochastic Dirichlet boundary condition.
//!
//! The solution `s` (SO2 pore concentration) and `c` (calcite density) obey
//! a coupled PDE-ODE system whose boundary datum at `x = 0` is a sample path
//! of a mean-reverting Jacobi diffusion. The solver splits `s = u + v`,
//! where `u` absorbs the rough boundary signal through the half-line heat
//! equation and `v` solves a zero-boundary problem by Picard iteration on
//! its Duhamel (mild) formulation.

pub mod error;
pub mod fd;
pub mod grid;
pub mod heat;
pub mod io;
pub mod kernel;
pub mod norms;
pub mod scenario;
pub mod solver;
pub mod validation;
pub mod quad;
pub mod jacobi;

pub use error::{Result, SulphError};
