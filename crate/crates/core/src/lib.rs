//! Learning dynamics for two-player quantum common-interest games.
//!
//! Two players hold density matrices `rho` (dimension `n`) and `sigma`
//! (dimension `m`) and share the bilinear utility `Tr(R (rho (x) sigma))`
//! defined by a Hermitian game operator `R`. This crate provides:
//!
//! - [`hermitian`]: the dense complex-Hermitian kernel (Kronecker products,
//!   partial trace/transpose, Hilbert-Schmidt inner product, projection to
//!   the density manifold);
//! - [`eigh`]: a bit-reproducible Jacobi eigensolver and PSD matrix functions;
//! - [`game`]: the game operator, its superoperator `Phi` and adjoint, best
//!   responses, exploitability, and Nash/KKT diagnostics;
//! - [`dynamics`]: the continuous-time `lin-QREP_q` gradient flow under the
//!   quantum q-Shahshahani metric, the discrete `lin-MMWU` update, an
//!   `exp-MMWU` baseline, and a convergence-detecting run loop;
//! - [`bss`]: a seesaw oracle for the Best Separable State value with a PPT
//!   rank-1 optimality certificate.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats, and the
//! experiment CLI live in the companion `qpg` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bloch;
pub mod bss;
pub mod dynamics;
pub mod eigh;
pub mod error;
pub mod game;
pub mod hermitian;
pub mod rand_util;

pub use error::{CoreError, Result};
pub use hermitian::{C64, DensityMatrix, HermitianMatrix};
