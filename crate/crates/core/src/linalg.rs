//! Dense complex matrices and the few factorizations the library needs.
//!
//! Everything here is sized for qubit-scale problems (at most a few dozen
//! rows), so the algorithms favour accuracy and simplicity: one-sided Jacobi
//! for the SVD and cyclic Jacobi for Hermitian eigenproblems.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar.
pub type C64 = Complex64;

/// Shorthand constructor for a complex number.
#[inline]
pub const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{iφ}`.
#[inline]
pub fn cis(phi: f64) -> C64 {
    C64::new(libm::cos(phi), libm::sin(phi))
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, " ")?;
            for col in 0..self.cols {
                let z = self[(r, col)];
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    /// Identity of size `n`.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, col| if r == col { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    /// Builds a matrix from a generator function.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for col in 0..cols {
                data.push(f(r, col));
            }
        }
        Self { rows, cols, data }
    }

    /// Wraps row-major data, checking the length.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::from_vec",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// 2×2 matrix from its entries, row-major.
    pub fn m2(a: C64, b: C64, cc: C64, d: C64) -> Self {
        Self { rows: 2, cols: 2, data: vec![a, b, cc, d] }
    }

    /// Real 2×2 matrix.
    pub fn r2(a: f64, b: f64, cc: f64, d: f64) -> Self {
        Self::m2(c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0))
    }

    /// Diagonal matrix.
    pub fn diag(d: &[C64]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |r, col| if r == col { d[r] } else { c(0.0, 0.0) })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Result<Self> {
        let rows = cols.first().map_or(0, Vec::len);
        for v in cols {
            if v.len() != rows {
                return Err(Error::DimensionMismatch {
                    context: "ComplexMatrix::from_columns",
                    expected: rows,
                    found: v.len(),
                });
            }
        }
        Ok(Self::from_fn(rows, cols.len(), |r, j| cols[j][r]))
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `(rows, cols)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// True when square.
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, j)]).collect()
    }

    /// Overwrites column `j`.
    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        for (r, z) in v.iter().enumerate().take(self.rows) {
            self[(r, j)] = *z;
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, col| self[(col, r)].conj())
    }

    /// Transpose.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, col| self[(col, r)])
    }

    /// Entrywise conjugate.
    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    /// Multiplies every entry by `s`.
    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// Multiplies every entry by the real `s`.
    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    fn check_same(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }

    /// Checked sum.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "add")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// Checked difference.
    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "sub")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Checked product `self · other`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { context: "matmul", expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for col in 0..other.cols {
                    out.data[r * other.cols + col] += a * other.data[k * other.cols + col];
                }
            }
        }
        Ok(out)
    }

    /// Checked matrix-vector product.
    pub fn try_apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch { context: "matvec", expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows).map(|r| (0..self.cols).map(|k| self[(r, k)] * v[k]).sum()).collect())
    }

    /// Matrix-vector product; panics on a shape mismatch.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.try_apply(v).expect("matvec shape mismatch")
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = other.shape();
        Self::from_fn(self.rows * r2, self.cols * c2, |r, col| self[(r / r2, col / c2)] * other[(r % r2, col % c2)])
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    /// Assembles a 2×2 block matrix `[[a, b], [cc, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, cc: &Self, d: &Self) -> Result<Self> {
        if a.rows != b.rows || cc.rows != d.rows || a.cols != cc.cols || b.cols != d.cols {
            return Err(Error::DimensionMismatch { context: "from_blocks", expected: a.rows, found: b.rows });
        }
        let mut out = Self::zeros(a.rows + cc.rows, a.cols + b.cols);
        out.set_block(0, 0, a);
        out.set_block(0, a.cols, b);
        out.set_block(a.rows, 0, cc);
        out.set_block(a.rows, a.cols, d);
        Ok(out)
    }

    /// Copy of the `rows × cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Result<Self> {
        if r0 + rows > self.rows || c0 + cols > self.cols {
            return Err(Error::DimensionMismatch { context: "block", expected: self.rows, found: r0 + rows });
        }
        Ok(Self::from_fn(rows, cols, |r, col| self[(r0 + r, c0 + col)]))
    }

    /// Writes `b` into the block starting at `(r0, c0)`; panics if it does not fit.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of bounds");
        for r in 0..b.rows {
            for col in 0..b.cols {
                self[(r0 + r, c0 + col)] = b[(r, col)];
            }
        }
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance `‖self − other‖_F`; infinite on shape mismatch.
    pub fn dist(&self, other: &Self) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        libm::sqrt(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum())
    }

    /// Hilbert-Schmidt inner product `tr(self† other)`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// `‖M†M − 1‖_F`, or infinity for a non-square matrix.
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.dagger() * self).dist(&Self::identity(self.rows))
    }

    /// Unitary within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Errors unless the matrix is a unitary of size `n` (any size when `n` is `None`).
    pub fn require_unitary(&self, n: Option<usize>, what: &'static str, tol: f64) -> Result<()> {
        if let Some(n) = n {
            if self.rows != n || self.cols != n {
                return Err(Error::DimensionMismatch { context: what, expected: n, found: self.rows });
            }
        }
        let deviation = self.unitarity_error();
        if deviation > tol || deviation.is_nan() {
            return Err(Error::NotUnitary { what, deviation });
        }
        Ok(())
    }

    /// `‖M − M†‖_F`.
    pub fn hermiticity_error(&self) -> f64 {
        self.dist(&self.dagger())
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        self.try_add(&self.dagger()).expect("square").scale_re(0.5)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = c(1.0, 0.0);
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm())).unwrap_or(k);
            if a[(p, k)].norm() == 0.0 {
                return c(0.0, 0.0);
            }
            if p != k {
                for col in 0..n {
                    let t = a[(k, col)];
                    a[(k, col)] = a[(p, col)];
                    a[(p, col)] = t;
                }
                det = -det;
            }
            let piv = a[(k, k)];
            det *= piv;
            for i in k + 1..n {
                let f = a[(i, k)] / piv;
                for col in k..n {
                    let t = a[(k, col)];
                    a[(i, col)] -= f * t;
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, col): (usize, usize)) -> &C64 {
        assert!(r < self.rows && col < self.cols, "index out of bounds");
        &self.data[r * self.cols + col]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut C64 {
        assert!(r < self.rows && col < self.cols, "index out of bounds");
        &mut self.data[r * self.cols + col]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on a shape mismatch; use [`ComplexMatrix::try_mul`] for a checked product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matmul shape mismatch")
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self * &rhs
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("add shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("sub shape mismatch")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_re(-1.0)
    }
}

/// Product of a list of matrices, leftmost first: `ms[0]·ms[1]·…`.
pub fn product(ms: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut it = ms.iter();
    let first = (*it.next().expect("empty product")).clone();
    it.fold(first, |acc, m| &acc * *m)
}

/// Result of comparing two matrices modulo a global phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseDistance {
    /// `min_φ ‖e^{iφ}A − B‖_F`.
    pub distance: f64,
    /// Minimizing φ in (−π, π].
    pub phase: f64,
}

/// Distance between `a` and `b` modulo a global phase on `a`.
///
/// The optimal phase is `arg tr(A†B)`; the distance is then evaluated
/// directly, which is more accurate than the expanded closed form when the
/// two matrices nearly coincide.
pub fn phase_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> PhaseDistance {
    if a.shape() != b.shape() {
        return PhaseDistance { distance: f64::INFINITY, phase: 0.0 };
    }
    let ip = a.inner(b);
    let phase = if ip.norm() > 0.0 { ip.arg() } else { 0.0 };
    PhaseDistance { distance: a.scale(cis(phase)).dist(b), phase }
}

/// `Σ conj(a_i) b_i`.
pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm.
pub fn vnorm(a: &[C64]) -> f64 {
    libm::sqrt(a.iter().map(|z| z.norm_sqr()).sum())
}

/// Outer product `|a⟩⟨b|`.
pub fn outer(a: &[C64], b: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.len(), b.len(), |r, col| a[r] * b[col].conj())
}

/// Rephases `v` so that its first entry with modulus above `tol` is real
/// positive. Returns the factor that was applied.
pub fn fix_phase(v: &mut [C64], tol: f64) -> C64 {
    let f = match v.iter().find(|z| z.norm() > tol) {
        Some(z) => z.conj() / z.norm(),
        None => return c(1.0, 0.0),
    };
    for z in v.iter_mut() {
        *z *= f;
    }
    f
}

/// Orthogonalizes `v` against `basis` (twice, for stability) and returns the
/// remaining norm; `v` is normalized when that norm exceeds `tol`.
pub fn orthonormalize_against(v: &mut [C64], basis: &[Vec<C64>], tol: f64) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let p = vdot(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= p * y;
            }
        }
    }
    let n = vnorm(v);
    if n > tol {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

/// Extends an orthonormal set to a full basis of dimension `dim`, trying
/// candidate basis vectors `e_0, e_1, …` in order. Each new vector is
/// rephased so its first nonzero entry is real positive.
pub fn complete_basis(basis: &mut Vec<Vec<C64>>, dim: usize) {
    let mut k = 0;
    while basis.len() < dim && k < dim {
        let mut v = vec![c(0.0, 0.0); dim];
        v[k] = c(1.0, 0.0);
        if orthonormalize_against(&mut v, basis, 1e-6) > 1e-6 {
            fix_phase(&mut v, 1e-10);
            basis.push(v);
        }
        k += 1;
    }
}

/// Singular value decomposition `A = U·diag(σ)·V†` of a square matrix.
#[derive(Clone, Debug)]
pub struct Svd {
    /// Left singular vectors (unitary).
    pub u: ComplexMatrix,
    /// Singular values, non-increasing.
    pub sigma: Vec<f64>,
    /// Right singular vectors (unitary).
    pub v: ComplexMatrix,
}

/// One-sided Jacobi SVD of a square complex matrix.
///
/// Left vectors belonging to (numerically) vanishing singular values are
/// re-orthogonalized against the dominant ones and completed to a unitary.
pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { context: "svd", expected: a.rows, found: a.cols });
    }
    let n = a.rows;
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> =
        (0..n).map(|j| (0..n).map(|i| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()).collect();

    let all: Vec<usize> = (0..n).collect();
    jacobi_orthogonalize(&mut w, &all, &mut [&mut v]);

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w.iter().map(|x| vnorm(x)).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let scale = sigma.first().copied().unwrap_or(0.0);

    let mut ucols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for &j in &order {
        let mut col = w[j].clone();
        if norms[j] > 1e-13 * scale.max(1e-300) && orthonormalize_against(&mut col, &ucols, 1e-300) > 0.5 * norms[j] {
            ucols.push(col);
        } else {
            break;
        }
    }
    complete_basis(&mut ucols, n);
    let vcols: Vec<Vec<C64>> = order.iter().map(|&j| v[j].clone()).collect();
    Ok(Svd { u: ComplexMatrix::from_columns(&ucols)?, sigma, v: ComplexMatrix::from_columns(&vcols)? })
}

/// One-sided Jacobi: rotates the columns `cols[idx]` until they are mutually
/// orthogonal (relative to their norms), applying the same rotations to the
/// matching columns of every companion set.
pub(crate) fn jacobi_orthogonalize(cols: &mut [Vec<C64>], idx: &[usize], companions: &mut [&mut Vec<Vec<C64>>]) {
    for _sweep in 0..60 {
        let mut rotated = false;
        for (a, &p) in idx.iter().enumerate() {
            for &q in &idx[a + 1..] {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = vdot(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let e = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let cs = 1.0 / libm::sqrt(1.0 + t * t);
                let sn = cs * t;
                rotate_pair(cols, p, q, cs, sn, e);
                for comp in companions.iter_mut() {
                    rotate_pair(comp, p, q, cs, sn, e);
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

// Applies the column rotation
// [w_p, w_q] ← [w_p, w_q]·[[c, s], [−s·ē, c·ē]].
fn rotate_pair(cols: &mut [Vec<C64>], p: usize, q: usize, cs: f64, sn: f64, e: C64) {
    let ec = e.conj();
    for i in 0..cols[p].len() {
        let a = cols[p][i];
        let b = cols[q][i];
        cols[p][i] = a * cs - b * ec * sn;
        cols[q][i] = a * sn + b * ec * cs;
    }
}

/// Eigendecomposition `A = V·diag(λ)·V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary whose columns are the eigenvectors.
    pub vectors: ComplexMatrix,
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
pub fn eigh(a: &ComplexMatrix) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { context: "eigh", expected: a.rows, found: a.cols });
    }
    let n = a.rows;
    let mut m = a.hermitian_part();
    let mut vecs = ComplexMatrix::identity(n);
    let scale = m.norm_fro().max(1e-300);
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if libm::sqrt(off) <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let gamma = m[(p, q)];
                let g = gamma.norm();
                if g <= 1e-300 {
                    continue;
                }
                let e = gamma / g;
                let zeta = (m[(q, q)].re - m[(p, p)].re) / (2.0 * g);
                let t = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let cs = 1.0 / libm::sqrt(1.0 + t * t);
                let sn = cs * t;
                // J acts on columns p, q: J = [[c, s], [−s·ē, c·ē]].
                let j00 = c(cs, 0.0);
                let j01 = c(sn, 0.0);
                let j10 = -e.conj() * sn;
                let j11 = e.conj() * cs;
                for r in 0..n {
                    let a0 = m[(r, p)];
                    let a1 = m[(r, q)];
                    m[(r, p)] = a0 * j00 + a1 * j10;
                    m[(r, q)] = a0 * j01 + a1 * j11;
                }
                for col in 0..n {
                    let a0 = m[(p, col)];
                    let a1 = m[(q, col)];
                    m[(p, col)] = j00.conj() * a0 + j10.conj() * a1;
                    m[(q, col)] = j01.conj() * a0 + j11.conj() * a1;
                }
                for r in 0..n {
                    let a0 = vecs[(r, p)];
                    let a1 = vecs[(r, q)];
                    vecs[(r, p)] = a0 * j00 + a1 * j10;
                    vecs[(r, q)] = a0 * j01 + a1 * j11;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let cols: Vec<Vec<C64>> = order.iter().map(|&i| vecs.column(i)).collect();
    Ok(HermitianEigen { values, vectors: ComplexMatrix::from_columns(&cols)? })
}

/// `exp(−i·t·H)` for Hermitian `H`, via its eigendecomposition.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = eigh(h)?;
    let d: Vec<C64> = eig.values.iter().map(|&x| cis(-t * x)).collect();
    Ok(&(&eig.vectors * &ComplexMatrix::diag(&d)) * &eig.vectors.dagger())
}

/// Eigendecomposition `U = W·diag(e^{iφ_k})·W†` of a unitary.
///
/// The Hermitian and anti-Hermitian parts of a normal matrix commute, so a
/// generic real combination of them shares the eigenvectors of `U`.
pub fn diagonalize_unitary(u: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<C64>)> {
    u.require_unitary(None, "diagonalize_unitary", crate::NORM_TOL)?;
    let herm = u.hermitian_part();
    let anti = u.try_sub(&u.dagger())?.scale(c(0.0, -0.5));
    let mix = herm.try_add(&anti.scale_re(0.618_033_988_749_894_9))?;
    let w = eigh(&mix)?.vectors;
    let d = &(&w.dagger() * u) * &w;
    let phases = (0..u.rows).map(|i| d[(i, i)] / d[(i, i)].norm()).collect();
    Ok((w, phases))
}

/// Wraps an angle into `[0, period)`.
pub fn wrap(x: f64, period: f64) -> f64 {
    let r = x - period * libm::floor(x / period);
    if r >= period || r < 0.0 {
        0.0
    } else {
        r
    }
}
