//! Pure states and density matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{c, eigh, outer, vdot, vnorm, ComplexMatrix, C64};
use crate::NORM_TOL;

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
}

impl PureState {
    /// Validates that `amps` has unit norm within [`NORM_TOL`].
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch { context: "PureState::new", expected: 1, found: 0 });
        }
        let norm = vnorm(&amps);
        if (norm - 1.0).abs() > NORM_TOL || norm.is_nan() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    /// Normalizes `amps`; errors on the zero vector.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm = vnorm(&amps);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        for z in amps.iter_mut() {
            *z /= norm;
        }
        Ok(Self { amps })
    }

    /// Computational basis state `|k⟩` of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = vec![c(0.0, 0.0); dim];
        amps[k] = c(1.0, 0.0);
        Self { amps }
    }

    /// Single-qubit state `a|0⟩ + b|1⟩`, normalized.
    pub fn qubit(a: C64, b: C64) -> Result<Self> {
        Self::normalized(vec![a, b])
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Amplitudes.
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &[C64]) -> C64 {
        vdot(&self.amps, other)
    }

    /// Canonical orthogonal qubit state: for `(a, b)` returns `(−b̄, ā)`.
    pub fn perp(&self) -> Result<Self> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch { context: "PureState::perp", expected: 2, found: self.dim() });
        }
        Ok(Self { amps: vec![-self.amps[1].conj(), self.amps[0].conj()] })
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        outer(&self.amps, &self.amps)
    }

    /// `|ψ⟩⟨ψ|` as a density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { m: self.projector() }
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &Self) -> Self {
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        Self { amps }
    }
}

/// A density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity within [`NORM_TOL`].
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                context: "DensityMatrix::new",
                expected: m.rows(),
                found: m.cols(),
            });
        }
        if m.hermiticity_error() > NORM_TOL {
            return Err(Error::InvalidDensity("not Hermitian"));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidDensity("trace differs from one"));
        }
        let eig = eigh(&m)?;
        if eig.values.first().copied().unwrap_or(0.0) < -NORM_TOL {
            return Err(Error::InvalidDensity("negative eigenvalue"));
        }
        Ok(Self { m: m.hermitian_part() })
    }

    /// Maximally mixed state `1/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { m: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64) }
    }

    /// Wraps a matrix known to be a valid density matrix; used where the
    /// construction guarantees the invariants up to rounding.
    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self { m }
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    /// Trace (real part).
    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Purity `tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perp_is_orthogonal() {
        let t = PureState::qubit(c(0.6, 0.1), c(0.2, -0.7)).unwrap();
        let p = t.perp().unwrap();
        assert!(t.overlap(p.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_density() {
        let m = ComplexMatrix::r2(1.5, 0.0, 0.0, -0.5);
        assert_eq!(DensityMatrix::new(m), Err(Error::InvalidDensity("negative eigenvalue")));
        assert!(PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    }
}
