//! Ergotropy and ergotropy-based correlation quantifiers for bipartite,
//! finite-dimensional quantum states.
//!
//! The crate is organised bottom-up:
//!
//! - [`matcore`]: dense complex matrices, Kronecker products and a Jacobi
//!   Hermitian eigensolver.
//! - [`qstate`]: bipartite states and Hamiltonians, partial traces,
//!   product-basis dephasing, Schmidt decomposition and seeded sampling.
//! - [`optim`]: Nelder–Mead and the local-basis parametrisation used by the
//!   entropy minimisations.
//! - [`entropy`]: von Neumann and relative entropy, mutual information,
//!   relative entropy of discord and measurement-induced disturbance.
//! - [`ergotropy`]: passive states, ergotropy, thermal references and the
//!   same-energy ergotropy identity.
//! - [`closest`]: the energy-constrained closest classical state, the
//!   marginal-basis dephasing and the Horodecki closest separable state.
//! - [`contrib`]: the correlation contributions to ergotropy, their bounds
//!   and the full per-state report.

pub mod closest;
pub mod contrib;
pub mod entropy;
pub mod ergotropy;
pub mod error;
pub mod matcore;
pub mod optim;
pub mod qstate;

pub use error::{Error, Result};
pub use matcore::{c64, hermitian_eig, kron, ComplexMatrix, HermitianEig, C64};
pub use qstate::{
    BipartiteHamiltonian, BipartiteState, ClassicalState, HamiltonianKind, LocalBasisPair,
    Subsystem,
};
