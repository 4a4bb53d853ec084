use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    /// Operand shapes do not agree.
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        /// Operation that failed.
        context: &'static str,
        /// Expected size.
        expected: usize,
        /// Size that was supplied.
        found: usize,
    },
    /// A state vector is not normalized.
    #[error("state is not normalized (norm {norm})")]
    NotNormalized {
        /// Euclidean norm of the supplied vector.
        norm: f64,
    },
    /// A matrix that must be unitary is not.
    #[error("{what} is not unitary (deviation {deviation:.3e})")]
    NotUnitary {
        /// Which operand.
        what: &'static str,
        /// ‖M†M − 1‖_F.
        deviation: f64,
    },
    /// Kraus operators do not sum to the identity.
    #[error("Kraus completeness violated (deviation {deviation:.3e})")]
    Completeness {
        /// ‖Σ K†K − 1‖_F.
        deviation: f64,
    },
    /// A density matrix failed validation.
    #[error("invalid density matrix: {0}")]
    InvalidDensity(&'static str),
    /// A parameter lies outside its domain.
    #[error("{what} out of range: {value}")]
    OutOfRange {
        /// Which parameter.
        what: &'static str,
        /// Offending value.
        value: f64,
    },
    /// The Kraus pair admits no consistent second factor.
    #[error("inconsistent Kraus pair (residual {residual:.3e})")]
    InconsistentKraus {
        /// Reconstruction residual.
        residual: f64,
    },
    /// Element cannot be placed on the requested platform.
    #[error("element {element} is not legal on platform {platform}")]
    IllegalElement {
        /// Element mnemonic.
        element: &'static str,
        /// Platform mnemonic.
        platform: &'static str,
    },
    /// An OAM-local unitary has no known optical realization for this ℓ.
    #[error("{factor} is not optically implementable on OAM with l={ell}")]
    NotImplementable {
        /// Name of the offending factor.
        factor: &'static str,
        /// OAM value of the qubit.
        ell: i32,
    },
    /// Repeated filtering annihilated the state.
    #[error("state filtered to zero")]
    FilteredToZero,
    /// A closed-form expression was evaluated outside its validity condition.
    #[error("proviso violated: {0}")]
    Proviso(&'static str),
    /// An OAM value has no entry in the efficiency table.
    #[error("OAM value {0} not covered by the efficiency table")]
    EfficiencyMissing(u64),
    /// Fidelity fell outside [0, 1] beyond rounding.
    #[error("fidelity {0} outside [0, 1]")]
    FidelityRange(f64),
}

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
