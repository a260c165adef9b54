//! Error type shared by all modules of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building flows, propagators or
/// effective Hamiltonians.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A cyclic-list flow was evaluated at a point that is not on its orbit.
    #[error("flow undefined at ({theta1}, {theta2}): point not on the cyclic list")]
    UndefinedFlowPoint { theta1: f64, theta2: f64 },

    /// The requested operation needs a differentiable flow.
    #[error("unsupported flow kind: {0}")]
    UnsupportedFlow(&'static str),

    /// No return within `epsilon` of the seed was found in `n_max` steps.
    #[error(
        "no recurrence within {n_max} steps (closest approach {min_distance:.3e}); \
         increase epsilon or the step limit"
    )]
    NoRecurrence { n_max: usize, min_distance: f64 },

    /// A matrix that must be Hermitian is not.
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    /// A matrix that must be unitary is not.
    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    /// A vector that must be normalized is not.
    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    /// The Jacobi eigensolver failed to reach its off-diagonal threshold.
    #[error("eigensolver did not converge (off-diagonal residual {residual:.3e})")]
    EigenConvergence { residual: f64 },

    /// Argument of the Baker-Campbell-Hausdorff kernel too close to a pole.
    #[error("BCH kernel evaluated within {distance:.3e} of the pole 2πi·{pole_index}")]
    KernelPole { pole_index: i64, distance: f64 },

    /// A quasienergy / eigenvalue pair sits on a resonance of the BCH kernel.
    #[error(
        "resonance between levels {i} and {j}: phase {phase:.6} is within \
         tolerance of a nonzero multiple of 2π"
    )]
    Resonance { i: usize, j: usize, phase: f64 },

    /// Quasienergy families cannot be separated.
    #[error("degenerate quasienergy structure: {0}")]
    Degeneracy(String),

    /// Dense Koopman assembly would exceed the configured size limit.
    #[error(
        "dense Koopman matrix of order {size} exceeds the limit {limit}; \
         use the first-recurrence route instead"
    )]
    Capacity { size: usize, limit: usize },

    /// The operation needs quasienergy states stored along the whole orbit.
    #[error("effective Hamiltonian carries no orbit states (index {index} requested)")]
    MissingOrbitStates { index: usize },

    /// Mismatched matrix/vector dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Invalid experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
