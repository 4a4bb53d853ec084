//! Coherent feedback control of optical qubits.
//!
//! The crate covers the whole pipeline from a pair of Kraus operators to a
//! verified optical netlist and an iterated-control simulation:
//!
//! * [`linalg`], [`state`], [`channel`]: dense complex matrices, states and
//!   channels, plus the fix-point and span checks that certify a Kraus pair.
//! * [`csd`]: cosine-sine factorization of a block unitary, and the inverse
//!   problem of building a coupling unitary from a Kraus pair.
//! * [`optics`]: Jones matrices of wave plates, Dove prisms and friends, and
//!   compilation of CS factors into circuits for two optical platforms.
//! * [`schemes`]: the basic, weak-swap and target-dependent feedback schemes.
//! * [`reset`]: controller-reset engines (filtering, time-bin and OAM
//!   ancillas) together with closed-form fidelity and gain formulas.
//!
//! Tensor products are ordered controller ⊗ system throughout. The crate is
//! `no_std` and needs only `alloc`.
#![no_std]
#![forbid(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod channel;
pub mod csd;
mod error;
pub mod gates;
pub mod linalg;
pub mod optics;
pub mod random;
pub mod reset;
pub mod schemes;
pub mod state;

pub use channel::{
    apply_channel, fidelity, fixpoint_check, iterate_channel, kraus_from_unitary, span_check, FixpointOutcome,
    IterationRecord, IterationTrace, KrausSet,
};
pub use csd::{
    control_unitary_from_kraus, cs_decompose, kraus_svd, reconstruct, split_cs_matrix, CSFactors, CSMatrixSplit,
};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use state::{DensityMatrix, PureState};

/// Tolerance used when validating inputs (unitarity, normalization, completeness).
pub const NORM_TOL: f64 = 1e-9;

/// Tolerance used for round-trip assertions.
pub const ROUNDTRIP_TOL: f64 = 1e-10;
