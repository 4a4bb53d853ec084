//! Kraus channels and the conditions that make them steer toward a target.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{svd, vnorm, ComplexMatrix, C64};
use crate::state::{DensityMatrix, PureState};
use crate::NORM_TOL;

/// An ordered set of Kraus operators of equal square dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    ops: Vec<ComplexMatrix>,
}

impl KrausSet {
    /// Validates shapes and completeness `Σ K†K = 1` within [`NORM_TOL`].
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let set = Self::unchecked(ops)?;
        let deviation = set.completeness_error();
        if deviation > NORM_TOL || deviation.is_nan() {
            return Err(Error::Completeness { deviation });
        }
        Ok(set)
    }

    /// Checks shapes only; for trace-decreasing maps such as filters.
    pub fn unchecked(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let d = match ops.first() {
            Some(k) => k.rows(),
            None => return Err(Error::DimensionMismatch { context: "KrausSet", expected: 1, found: 0 }),
        };
        for k in &ops {
            if k.rows() != d || k.cols() != d {
                return Err(Error::DimensionMismatch { context: "KrausSet", expected: d, found: k.cols() });
            }
        }
        Ok(Self { ops })
    }

    /// Operators in order.
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    /// Number of operators.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    /// Always false for a constructed set.
    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// System dimension.
    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    /// `‖Σ K†K − 1‖_F`.
    pub fn completeness_error(&self) -> f64 {
        let d = self.dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for k in &self.ops {
            acc = &acc + &(&k.dagger() * k);
        }
        acc.dist(&ComplexMatrix::identity(d))
    }
}

fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { context, expected, found });
    }
    Ok(())
}

/// `ρ ↦ Σ K ρ K†`, symmetrized so the output is exactly Hermitian.
pub fn apply_channel(kraus: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_dim("apply_channel", kraus.dim(), rho.dim())?;
    let deviation = kraus.completeness_error();
    if deviation > NORM_TOL {
        return Err(Error::Completeness { deviation });
    }
    Ok(DensityMatrix::from_matrix_unchecked(apply_map(kraus, rho.matrix())))
}

pub(crate) fn apply_map(kraus: &KrausSet, rho: &ComplexMatrix) -> ComplexMatrix {
    let d = rho.rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for k in kraus.operators() {
        out = &out + &(&(k * rho) * &k.dagger());
    }
    out.hermitian_part()
}

/// Outcome of [`fixpoint_check`].
#[derive(Clone, Debug, PartialEq)]
pub enum FixpointOutcome {
    /// Every `K_i|T⟩ = z_i|T⟩` within tolerance.
    Fixed(Vec<C64>),
    /// At least one operator moves the target.
    Violated {
        /// `z_i = ⟨T|K_i|T⟩` for every operator.
        z: Vec<C64>,
        /// `‖K_i|T⟩ − z_i|T⟩‖` for every operator.
        residuals: Vec<f64>,
        /// Indices whose residual exceeds the tolerance.
        offending: Vec<usize>,
    },
}

impl FixpointOutcome {
    /// True when the fix-point condition holds.
    pub fn holds(&self) -> bool {
        matches!(self, Self::Fixed(_))
    }

    /// The eigenvalue estimates `z_i`.
    pub fn z(&self) -> &[C64] {
        match self {
            Self::Fixed(z) | Self::Violated { z, .. } => z,
        }
    }
}

/// Tests `K_i|T⟩ ∝ |T⟩` with `z_i = ⟨T|K_i|T⟩`.
pub fn fixpoint_check(kraus: &KrausSet, target: &PureState, tol: f64) -> Result<FixpointOutcome> {
    check_dim("fixpoint_check", kraus.dim(), target.dim())?;
    let t = target.amplitudes();
    let mut z = Vec::with_capacity(kraus.len());
    let mut residuals = Vec::with_capacity(kraus.len());
    let mut offending = Vec::new();
    for (i, k) in kraus.operators().iter().enumerate() {
        let kt = k.apply(t);
        let zi = target.overlap(&kt);
        let r: Vec<C64> = kt.iter().zip(t).map(|(a, b)| a - zi * b).collect();
        let res = vnorm(&r);
        if res > tol {
            offending.push(i);
        }
        z.push(zi);
        residuals.push(res);
    }
    if offending.is_empty() {
        Ok(FixpointOutcome::Fixed(z))
    } else {
        Ok(FixpointOutcome::Violated { z, residuals, offending })
    }
}

/// True iff `{K_i†|T⟩}` spans the system space (singular values above `tol`).
pub fn span_check(kraus: &KrausSet, target: &PureState, tol: f64) -> Result<bool> {
    let d = kraus.dim();
    check_dim("span_check", d, target.dim())?;
    let n = kraus.len().max(d);
    let mut m = ComplexMatrix::zeros(n, n);
    for (j, k) in kraus.operators().iter().enumerate() {
        let v = k.dagger().apply(target.amplitudes());
        for (r, z) in v.into_iter().enumerate() {
            m[(r, j)] = z;
        }
    }
    let rank = svd(&m)?.sigma.iter().filter(|&&s| s > tol).count();
    Ok(rank == d)
}

/// Kraus operators `K_i = ⟨i|_c U |init⟩_c` of a coupling unitary
/// (controller ⊗ system ordering).
pub fn kraus_from_unitary(u: &ComplexMatrix, dim_c: usize, dim_s: usize, init: usize) -> Result<KrausSet> {
    u.require_unitary(Some(dim_c * dim_s), "coupling unitary", NORM_TOL)?;
    if init >= dim_c {
        return Err(Error::OutOfRange { what: "controller initial index", value: init as f64 });
    }
    let ops = (0..dim_c).map(|i| u.block(i * dim_s, init * dim_s, dim_s, dim_s)).collect::<Result<Vec<_>>>()?;
    KrausSet::new(ops)
}

/// `⟨T|ρ|T⟩`, clamped into `[0, 1]` after a range check.
pub fn fidelity(rho: &DensityMatrix, target: &PureState) -> Result<f64> {
    check_dim("fidelity", rho.dim(), target.dim())?;
    let f = target.overlap(&rho.matrix().apply(target.amplitudes())).re;
    if !(-1e-12..=1.0 + 1e-12).contains(&f) {
        return Err(Error::FidelityRange(f));
    }
    Ok(f.clamp(0.0, 1.0))
}

/// One row of an [`IterationTrace`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    /// Iteration index, starting at 0.
    pub n: usize,
    /// Fidelity with the target.
    pub fidelity: f64,
    /// Trace (or squared norm) of the state.
    pub norm: f64,
}

/// Fidelity history of an iterated channel.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace {
    /// One record per iteration, `n = 0..=N`.
    pub records: Vec<IterationRecord>,
    /// Whether the fix-point condition held (advisory).
    pub fixpoint: bool,
    /// Whether the span condition held (advisory).
    pub span: bool,
    /// State after the last iteration.
    pub final_state: DensityMatrix,
}

impl IterationTrace {
    /// Fidelities `F_0..F_N`.
    pub fn fidelities(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.fidelity).collect()
    }
}

/// Applies the channel `n` times, recording the fidelity after each pass.
pub fn iterate_channel(kraus: &KrausSet, rho0: &DensityMatrix, target: &PureState, n: usize) -> Result<IterationTrace> {
    check_dim("iterate_channel", kraus.dim(), rho0.dim())?;
    check_dim("iterate_channel", kraus.dim(), target.dim())?;
    let fixpoint = fixpoint_check(kraus, target, NORM_TOL)?.holds();
    let span = span_check(kraus, target, NORM_TOL)?;
    let mut rho = rho0.clone();
    let mut records = Vec::with_capacity(n + 1);
    records.push(IterationRecord { n: 0, fidelity: fidelity(&rho, target)?, norm: rho.trace() });
    for i in 1..=n {
        rho = apply_channel(kraus, &rho)?;
        records.push(IterationRecord { n: i, fidelity: fidelity(&rho, target)?, norm: rho.trace() });
    }
    Ok(IterationTrace { records, fixpoint, span, final_state: rho })
}
