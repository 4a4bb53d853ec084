//! Standard single- and two-qubit operators.

use crate::linalg::{c, cis, ComplexMatrix};

/// 2×2 identity.
pub fn id2() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

/// Pauli X.
pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::r2(0.0, 1.0, 1.0, 0.0)
}

/// Pauli Y.
pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::m2(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

/// Pauli Z.
pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::r2(1.0, 0.0, 0.0, -1.0)
}

/// Hadamard `[[1, 1], [1, −1]]/√2`.
pub fn hadamard() -> ComplexMatrix {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::r2(h, h, h, -h)
}

/// Phase shift `P_φ = diag(e^{iφ}, e^{−iφ}) = e^{iφσ_z}`.
pub fn phase(phi: f64) -> ComplexMatrix {
    ComplexMatrix::diag(&[cis(phi), cis(-phi)])
}

/// Rotation `e^{−iθσ_y}`.
pub fn rot_y(theta: f64) -> ComplexMatrix {
    let (s, co) = (libm::sin(theta), libm::cos(theta));
    ComplexMatrix::r2(co, -s, s, co)
}

/// Qubit swap on two qubits.
pub fn swap() -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        s[(r, col)] = c(1.0, 0.0);
    }
    s
}

/// Controlled unitary `1 ⊕ u` (controller is the first factor).
pub fn controlled(u: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::identity(u.rows()).direct_sum(u)
}
