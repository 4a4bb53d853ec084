//! Cosine-sine factorization of block unitaries.
//!
//! A 2n×2n unitary split into n×n blocks is written as
//!
//! ```text
//! U = (L ⊕ L′) · [[C, S], [−S, C]] · (R† ⊕ R′†)
//! ```
//!
//! with `C = diag(cos θ)`, `S = diag(sin θ)` and `θ_i ∈ [0, π/2]`. The factor
//! `L′` is stored as `Lpp = i·L′`, the form in which it appears next to a
//! Kraus pair: `K0 = L·C·R†`, `K1 = i·Lpp·S·R†`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::gates;
use crate::linalg::{
    c, cis, complete_basis, fix_phase, jacobi_orthogonalize, orthonormalize_against, vnorm, ComplexMatrix, C64,
};
use crate::NORM_TOL;

const I: C64 = c(0.0, 1.0);
const NEG_I: C64 = c(0.0, -1.0);

/// Factor bundle of a cosine-sine decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct CSFactors {
    /// Upper-left corner factor.
    pub l: ComplexMatrix,
    /// `i·L′`, the lower-left corner factor in Kraus form.
    pub lpp: ComplexMatrix,
    /// Angles θ_i, sorted so that cos θ_i is non-increasing.
    pub thetas: Vec<f64>,
    /// Right factor of the first block column.
    pub r: ComplexMatrix,
    /// Right factor of the second block column; `None` means the gauge `R′ = −i·R`.
    pub rp: Option<ComplexMatrix>,
}

impl CSFactors {
    /// Block size n.
    pub fn n(&self) -> usize {
        self.thetas.len()
    }

    /// Identity factors of block size `n`, with `L′ = R′ = 1`.
    pub fn identity(n: usize) -> Self {
        let id = ComplexMatrix::identity(n);
        Self { l: id.clone(), lpp: id.scale(I), thetas: vec![0.0; n], r: id.clone(), rp: Some(id) }
    }

    /// Builds factors from unconstrained angles and canonicalizes them: each
    /// angle is folded into `[0, π/2]` by moving signs of cos θ and sin θ into
    /// the columns of `R`, `R′` and `L′`, then columns are sorted by angle.
    pub fn from_raw(
        l: ComplexMatrix,
        lpp: ComplexMatrix,
        raw_thetas: &[f64],
        r: ComplexMatrix,
        rp: Option<ComplexMatrix>,
    ) -> Result<Self> {
        let n = raw_thetas.len();
        for (m, what) in [(&l, "L"), (&lpp, "Lpp"), (&r, "R")] {
            m.require_unitary(Some(n), what, NORM_TOL)?;
        }
        let mut rp = rp.unwrap_or_else(|| r.scale(NEG_I));
        rp.require_unitary(Some(n), "R'", NORM_TOL)?;
        let (mut l, mut lpp, mut r) = (l, lpp, r);
        let mut thetas = Vec::with_capacity(n);
        for (j, &t) in raw_thetas.iter().enumerate() {
            let (s, co) = (libm::sin(t), libm::cos(t));
            let d = if co < 0.0 { -1.0 } else { 1.0 };
            let e = if s < 0.0 { -1.0 } else { 1.0 };
            scale_col(&mut r, j, d);
            scale_col(&mut rp, j, e);
            scale_col(&mut lpp, j, d * e);
            thetas.push(libm::atan2(libm::fabs(s), libm::fabs(co)));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| thetas[a].total_cmp(&thetas[b]));
        l = permute_cols(&l, &order);
        lpp = permute_cols(&lpp, &order);
        r = permute_cols(&r, &order);
        rp = permute_cols(&rp, &order);
        let thetas = order.iter().map(|&j| thetas[j]).collect();
        Ok(Self { l, lpp, thetas, r, rp: Some(rp) })
    }

    /// `diag(cos θ)`.
    pub fn cos_diag(&self) -> ComplexMatrix {
        ComplexMatrix::diag(&self.thetas.iter().map(|&t| c(libm::cos(t), 0.0)).collect::<Vec<_>>())
    }

    /// `diag(sin θ)`.
    pub fn sin_diag(&self) -> ComplexMatrix {
        ComplexMatrix::diag(&self.thetas.iter().map(|&t| c(libm::sin(t), 0.0)).collect::<Vec<_>>())
    }

    /// `Θ = C + iS = diag(e^{iθ})`.
    pub fn theta_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::diag(&self.thetas.iter().map(|&t| cis(t)).collect::<Vec<_>>())
    }

    /// `L′ = −i·Lpp`.
    pub fn l_prime(&self) -> ComplexMatrix {
        self.lpp.scale(NEG_I)
    }

    /// `R′`, materializing the gauge `R′ = −i·R` when unset.
    pub fn r_prime(&self) -> ComplexMatrix {
        self.rp.clone().unwrap_or_else(|| self.r.scale(NEG_I))
    }

    /// Checks unitarity of the corner factors and the angle ordering.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::DimensionMismatch { context: "CSFactors", expected: 1, found: 0 });
        }
        self.l.require_unitary(Some(n), "L", NORM_TOL)?;
        self.lpp.require_unitary(Some(n), "Lpp", NORM_TOL)?;
        self.r.require_unitary(Some(n), "R", NORM_TOL)?;
        if let Some(rp) = &self.rp {
            rp.require_unitary(Some(n), "R'", NORM_TOL)?;
        }
        for &t in &self.thetas {
            if !(-1e-12..=FRAC_PI_2 + 1e-12).contains(&t) {
                return Err(Error::OutOfRange { what: "CS angle", value: t });
            }
        }
        for w in self.thetas.windows(2) {
            if libm::cos(w[1]) > libm::cos(w[0]) + 1e-12 {
                return Err(Error::OutOfRange { what: "CS angle ordering", value: w[1] });
            }
        }
        Ok(())
    }
}

fn scale_col(m: &mut ComplexMatrix, j: usize, f: f64) {
    if f != 1.0 {
        let col: Vec<C64> = m.column(j).iter().map(|z| z * f).collect();
        m.set_column(j, &col);
    }
}

fn permute_cols(m: &ComplexMatrix, order: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), m.cols(), |r, j| m[(r, order[j])])
}

/// Assembles `(L ⊕ L′)·[[C, S], [−S, C]]·(R† ⊕ R′†)`.
pub fn reconstruct(f: &CSFactors) -> Result<ComplexMatrix> {
    f.validate()?;
    let (cm, sm) = (f.cos_diag(), f.sin_diag());
    let lp = f.l_prime();
    let rpd = f.r_prime().dagger();
    let rd = f.r.dagger();
    let u00 = &(&f.l * &cm) * &rd;
    let u01 = &(&f.l * &sm) * &rpd;
    let u10 = -&(&(&lp * &sm) * &rd);
    let u11 = &(&lp * &cm) * &rpd;
    ComplexMatrix::from_blocks(&u00, &u01, &u10, &u11)
}

/// The CS matrix together with its factorization
/// `(P†_{π/4}H ⊗ 1)(Θ ⊕ Θ†)(H P_{π/4} ⊗ 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CSMatrixSplit {
    /// Angles.
    pub thetas: Vec<f64>,
    /// `P†_{π/4}H ⊗ 1`.
    pub left: ComplexMatrix,
    /// `Θ ⊕ Θ†`.
    pub middle: ComplexMatrix,
    /// `H P_{π/4} ⊗ 1`.
    pub right: ComplexMatrix,
}

impl CSMatrixSplit {
    /// Product of the three factors.
    pub fn product(&self) -> ComplexMatrix {
        &(&self.left * &self.middle) * &self.right
    }

    /// `[[C, S], [−S, C]]` assembled directly.
    pub fn cs_matrix(&self) -> ComplexMatrix {
        let cm = ComplexMatrix::diag(&self.thetas.iter().map(|&t| c(libm::cos(t), 0.0)).collect::<Vec<_>>());
        let sm = ComplexMatrix::diag(&self.thetas.iter().map(|&t| c(libm::sin(t), 0.0)).collect::<Vec<_>>());
        ComplexMatrix::from_blocks(&cm, &sm, &-&sm, &cm).expect("square blocks")
    }
}

/// Splits the CS matrix into Hadamard-conjugated diagonal phases.
pub fn split_cs_matrix(thetas: &[f64]) -> Result<CSMatrixSplit> {
    for &t in thetas {
        if !(0.0..=FRAC_PI_2).contains(&t) {
            return Err(Error::OutOfRange { what: "CS angle", value: t });
        }
    }
    let id = ComplexMatrix::identity(thetas.len());
    let h = gates::hadamard();
    let p = gates::phase(FRAC_PI_4);
    let theta = ComplexMatrix::diag(&thetas.iter().map(|&t| cis(t)).collect::<Vec<_>>());
    Ok(CSMatrixSplit {
        thetas: thetas.to_vec(),
        left: (&p.dagger() * &h).kron(&id),
        middle: theta.direct_sum(&theta.dagger()),
        right: (&h * &p).kron(&id),
    })
}

/// Shared core of [`cs_decompose`] and [`kraus_svd`]: factors the first block
/// column `[[A], [B]]` (an isometry) as `A = L·C·R†`, `B = −L′·S·R†`.
struct ColumnFactors {
    l: ComplexMatrix,
    l_prime: ComplexMatrix,
    thetas: Vec<f64>,
    r: ComplexMatrix,
}

fn factor_block_column(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ColumnFactors> {
    let n = a.rows();
    let mut r: Vec<Vec<C64>> =
        (0..n).map(|j| (0..n).map(|i| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()).collect();
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let all: Vec<usize> = (0..n).collect();
    jacobi_orthogonalize(&mut w, &all, &mut [&mut r]);

    // Columns of −B·R. Where the cosine dominates, their mutual
    // orthogonality is only accurate in absolute terms, so re-orthogonalize
    // that group and carry R (and A·R) along.
    let neg_b = -b;
    let mut z: Vec<Vec<C64>> = r.iter().map(|rc| neg_b.apply(rc)).collect();
    let cos_dominant: Vec<usize> = (0..n).filter(|&j| vnorm(&w[j]) >= vnorm(&z[j])).collect();
    jacobi_orthogonalize(&mut z, &cos_dominant, &mut [&mut r, &mut w]);

    for j in 0..n {
        let f = fix_phase(&mut r[j], 1e-10);
        for x in w[j].iter_mut().chain(z[j].iter_mut()) {
            *x *= f;
        }
    }

    let cs: Vec<f64> = w.iter().map(|x| vnorm(x)).collect();
    let ss: Vec<f64> = z.iter().map(|x| vnorm(x)).collect();
    let raw: Vec<f64> = (0..n).map(|j| libm::atan2(ss[j], cs[j])).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));

    let l = unit_columns(&order, &w, &cs)?;
    let l_prime = unit_columns(&order, &z, &ss)?;
    let r_sorted: Vec<Vec<C64>> = order.iter().map(|&j| r[j].clone()).collect();
    Ok(ColumnFactors {
        l,
        l_prime,
        thetas: order.iter().map(|&j| raw[j]).collect(),
        r: ComplexMatrix::from_columns(&r_sorted)?,
    })
}

// Normalized columns `vecs[order[k]] / norms[order[k]]`, processed in order of
// decreasing norm with Gram-Schmidt; negligible columns are replaced by an
// orthonormal completion following the first-nonzero-real-positive rule.
fn unit_columns(order: &[usize], vecs: &[Vec<C64>], norms: &[f64]) -> Result<ComplexMatrix> {
    let n = order.len();
    let mut by_norm: Vec<usize> = (0..n).collect();
    by_norm.sort_by(|&a, &b| norms[order[b]].total_cmp(&norms[order[a]]));
    let mut out: Vec<Option<Vec<C64>>> = vec![None; n];
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for &k in &by_norm {
        let j = order[k];
        if norms[j] <= 1e-200 {
            continue;
        }
        let mut v: Vec<C64> = vecs[j].iter().map(|x| x / norms[j]).collect();
        if orthonormalize_against(&mut v, &basis, 0.5) > 0.5 {
            basis.push(v.clone());
            out[k] = Some(v);
        }
    }
    let missing: Vec<usize> = (0..n).filter(|&k| out[k].is_none()).collect();
    let base_len = basis.len();
    complete_basis(&mut basis, n);
    for (i, &k) in missing.iter().enumerate() {
        out[k] = Some(basis[base_len + i].clone());
    }
    let cols: Vec<Vec<C64>> = out.into_iter().map(|v| v.expect("completed")).collect();
    ComplexMatrix::from_columns(&cols)
}

// One Newton-Schulz step toward the nearest unitary.
fn polish_unitary(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let g = &m.dagger() * m;
    let corr = ComplexMatrix::identity(n).scale_re(3.0).try_sub(&g).expect("square").scale_re(0.5);
    m * &corr
}

/// CS decomposition of a 2n×2n unitary.
///
/// The upper-left block is factored by a Jacobi SVD; `L′` follows from the
/// lower-left block and `R′` from the right block column via
/// `R′† = S·L†·U01 + C·L′†·U11`. Column phases are fixed so the first
/// nonzero entry of each column of `R` is real positive.
pub fn cs_decompose(u: &ComplexMatrix, n: usize) -> Result<CSFactors> {
    if n == 0 {
        return Err(Error::DimensionMismatch { context: "cs_decompose", expected: 1, found: 0 });
    }
    u.require_unitary(Some(2 * n), "cs_decompose input", NORM_TOL)?;
    let u00 = u.block(0, 0, n, n)?;
    let u01 = u.block(0, n, n, n)?;
    let u10 = u.block(n, 0, n, n)?;
    let u11 = u.block(n, n, n, n)?;
    let cf = factor_block_column(&u00, &u10)?;
    let f0 = CSFactors { l: cf.l, lpp: cf.l_prime.scale(I), thetas: cf.thetas, r: cf.r, rp: None };
    let (cm, sm) = (f0.cos_diag(), f0.sin_diag());
    let rp_dag = (&(&sm * &f0.l.dagger()) * &u01).try_add(&(&(&cm * &cf.l_prime.dagger()) * &u11))?;
    let rp = polish_unitary(&rp_dag.dagger());
    Ok(CSFactors { rp: Some(rp), ..f0 })
}

/// Factors a Kraus pair as `K0 = L·C·R†`, `K1 = i·Lpp·S·R†`.
///
/// `Lpp` is fixed on the support of `S`; on its kernel the columns are an
/// orthonormal completion with the first-nonzero-real-positive convention
/// applied to `L′ = −i·Lpp`. The returned factors use the gauge `R′ = −i·R`.
pub fn kraus_svd(k0: &ComplexMatrix, k1: &ComplexMatrix) -> Result<CSFactors> {
    let n = k0.rows();
    if !k0.is_square() || k1.shape() != k0.shape() {
        return Err(Error::DimensionMismatch { context: "kraus_svd", expected: n, found: k1.rows() });
    }
    let comp = (&k0.dagger() * k0).try_add(&(&k1.dagger() * k1))?;
    let deviation = comp.dist(&ComplexMatrix::identity(n));
    if deviation > NORM_TOL {
        return Err(Error::Completeness { deviation });
    }
    let cf = factor_block_column(k0, k1)?;
    let f = CSFactors { l: cf.l, lpp: cf.l_prime.scale(I), thetas: cf.thetas, r: cf.r, rp: None };
    let (cm, sm) = (f.cos_diag(), f.sin_diag());
    let rd = f.r.dagger();
    let e0 = (&(&f.l * &cm) * &rd).dist(k0);
    let e1 = (&(&f.lpp * &sm) * &rd).scale(I).dist(k1);
    if e0 + e1 > NORM_TOL {
        return Err(Error::InconsistentKraus { residual: e0 + e1 });
    }
    Ok(f)
}

/// Coupling unitary `[[K0, ·], [K1, ·]]` completed through the CS form with
/// the gauge `R′ = −i·R`, together with its factors.
pub fn control_unitary_from_kraus(k0: &ComplexMatrix, k1: &ComplexMatrix) -> Result<(ComplexMatrix, CSFactors)> {
    let f = kraus_svd(k0, k1)?;
    let u = reconstruct(&f)?;
    Ok((u, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_canonical_factors() {
        let f = cs_decompose(&ComplexMatrix::identity(4), 2).unwrap();
        let id = ComplexMatrix::identity(2);
        assert_eq!(f.thetas, vec![0.0, 0.0]);
        assert!(f.l.dist(&id) < 1e-15 && f.r.dist(&id) < 1e-15);
        assert!(f.l_prime().dist(&id) < 1e-15 && f.r_prime().dist(&id) < 1e-15);
    }

    #[test]
    fn swap_angles() {
        let f = cs_decompose(&gates::swap(), 2).unwrap();
        assert!(f.thetas[0].abs() < 1e-15 && (f.thetas[1] - FRAC_PI_2).abs() < 1e-15);
        assert!(reconstruct(&f).unwrap().dist(&gates::swap()) < 1e-14);
    }

    #[test]
    fn from_raw_folds_negative_angles() {
        let id = ComplexMatrix::identity(2);
        let f = CSFactors::from_raw(id.clone(), id.scale(I), &[-0.3, 2.0], id.clone(), None).unwrap();
        f.validate().unwrap();
        let raw = CSFactors { l: id.clone(), lpp: id.scale(I), thetas: vec![-0.3, 2.0], r: id.clone(), rp: None };
        let (cm, sm) = (raw.cos_diag(), raw.sin_diag());
        let direct = ComplexMatrix::from_blocks(&cm, &sm.scale(I), &-&sm, &cm.scale(I)).unwrap();
        assert!(reconstruct(&f).unwrap().dist(&direct) < 1e-14);
    }
}
