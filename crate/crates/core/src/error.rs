use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("matrix has a negative eigenvalue {value:e}")]
    NegativeEigenvalue { value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not pure (largest eigenvalue {max_eigenvalue})")]
    NotPure { max_eigenvalue: f64 },

    #[error("local dimensions {d_a}x{d_b} exceed the optimizer limit of {limit} per party")]
    DimensionTooLarge { d_a: usize, d_b: usize, limit: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("states have different energies ({first} vs {second})")]
    EnergyMismatch { first: f64, second: f64 },

    #[error("no product-basis dephasing meets the energy constraint (best residual {residual:e})")]
    InfeasibleConstraint { residual: f64 },

    #[error("operation requires a non-interacting Hamiltonian H_A + H_B")]
    InteractingHamiltonian,

    #[error("state is outside the family with a known closest separable state")]
    OutOfScopeFamily,
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::InfeasibleConstraint { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
