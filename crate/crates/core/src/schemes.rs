//! The three worked feedback schemes: basic, weak swap and
//! target-dependent, with their coupling unitaries, Kraus pairs, CS factors,
//! optical layouts and fidelity laws.
//!
//! # Controller frames
//!
//! The weak swap and the target-dependent scheme encode the target in the
//! controller. The Kraus pair is read off the effective unitary
//! `(B ⊗ 1)·U·(V ⊗ 1)` where `V = [T, T⊥]` prepares the controller and `B`
//! is a fixed local readout frame. The channel does not depend on `B`, but
//! the individual operators (and hence filtering) do; the frames below give
//! the operators in their standard closed forms:
//!
//! * weak swap: `K0 = e^{−iλ}|T⟩⟨T| + cos λ|T⊥⟩⟨T⊥|`, `K1 = sin λ|T⟩⟨T⊥|`,
//! * target-dependent: `K0,1 = (|T⟩⟨T| ± sin λ|T⟩⟨T⊥| + cos λ|T⊥⟩⟨T⊥|)/√2`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8, PI};

use crate::channel::{kraus_from_unitary, KrausSet};
use crate::csd::{control_unitary_from_kraus, CSFactors};
use crate::error::{Error, Result};
use crate::gates;
use crate::linalg::{c, cis, expm_hermitian, outer, ComplexMatrix};
use crate::optics::{compile_controlled_phase, OpticalCircuit, OpticalElement, Platform};
use crate::state::PureState;

/// Which scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// `K0 = |T⟩⟨T|`, `K1 = |T⟩⟨T⊥|`.
    Basic,
    /// `U = exp(−iλS)`.
    WeakSwap,
    /// `U(λ) = exp(−i(λ/2)(σ_y⊗σ_y + σ_z⊗σ_z))`.
    TargetDep,
}

impl SchemeKind {
    /// Configuration name.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Basic => "basic",
            Self::WeakSwap => "weak_swap",
            Self::TargetDep => "target_dep",
        }
    }

    /// Inverse of [`SchemeKind::name`].
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "basic" => Some(Self::Basic),
            "weak_swap" => Some(Self::WeakSwap),
            "target_dep" => Some(Self::TargetDep),
            _ => None,
        }
    }
}

/// A constructed scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct Scheme {
    /// Which scheme.
    pub kind: SchemeKind,
    /// Target state of the system.
    pub target: PureState,
    /// Coupling strength (unused for the basic scheme).
    pub lambda: f64,
    /// Coupling unitary acting on controller ⊗ system.
    pub coupling: ComplexMatrix,
    /// Controller preparation `V` (controller starts in `V|0⟩`).
    pub prep: ComplexMatrix,
    /// Controller readout frame `B`.
    pub readout: ComplexMatrix,
    /// Kraus pair of `(B ⊗ 1)·U·(V ⊗ 1)` with the controller in `|0⟩`.
    pub kraus: KrausSet,
    /// CS factors of the coupling (exact for the basic scheme, up to a
    /// global phase for the listed factorizations of the other two).
    pub factors: CSFactors,
}

impl Scheme {
    /// `(B ⊗ 1)·U·(V ⊗ 1)`.
    pub fn effective_unitary(&self) -> ComplexMatrix {
        let id = gates::id2();
        &(&self.readout.kron(&id) * &self.coupling) * &self.prep.kron(&id)
    }

    /// First and second Kraus operators.
    pub fn k0(&self) -> &ComplexMatrix {
        &self.kraus.operators()[0]
    }

    /// Second Kraus operator.
    pub fn k1(&self) -> &ComplexMatrix {
        &self.kraus.operators()[1]
    }
}

/// The basic scheme for an arbitrary qubit target.
pub fn basic_scheme(target: &PureState) -> Result<Scheme> {
    let t = target.amplitudes();
    let tp = target.perp()?;
    let k0 = outer(t, t);
    let k1 = outer(t, tp.amplitudes());
    let (u, factors) = control_unitary_from_kraus(&k0, &k1)?;
    Ok(Scheme {
        kind: SchemeKind::Basic,
        target: target.clone(),
        lambda: 0.0,
        kraus: KrausSet::new(vec![k0, k1])?,
        coupling: u,
        prep: gates::id2(),
        readout: gates::id2(),
        factors,
    })
}

/// `V = [T, T⊥]` as columns.
pub fn controller_prep(target: &PureState) -> Result<ComplexMatrix> {
    let tp = target.perp()?;
    ComplexMatrix::from_columns(&[target.amplitudes().to_vec(), tp.amplitudes().to_vec()])
}

/// `exp(−iλS) = cos λ·1 − i sin λ·S`.
pub fn weak_swap_unitary(lambda: f64) -> ComplexMatrix {
    ComplexMatrix::identity(4)
        .scale_re(libm::cos(lambda))
        .try_add(&gates::swap().scale(c(0.0, -libm::sin(lambda))))
        .expect("4x4")
}

/// CS factors of the weak swap from its listed factorization
/// `L = P†_{λ/2}`, `Lpp = σ_x P†_{λ/2}`, `Θ = e^{−iλ/2}P_{λ/2}`, `R = 1`,
/// with the second right factor `σ_x` read in the Hadamard form, i.e.
/// `R′ = −iσ_x` in the CS form. Angles are canonicalized.
pub fn weak_swap_factors(lambda: f64) -> Result<CSFactors> {
    listed_factors(&[0.0, -lambda], lambda)
}

/// CS factors of the target-dependent unitary: as for the weak swap but
/// with `Θ = P_{λ/2}`.
pub fn target_dep_factors(lambda: f64) -> Result<CSFactors> {
    listed_factors(&[lambda / 2.0, -lambda / 2.0], lambda)
}

fn listed_factors(raw: &[f64], lambda: f64) -> Result<CSFactors> {
    let l = gates::phase(-lambda / 2.0);
    let lpp = &gates::sigma_x() * &l;
    let rp = gates::sigma_x().scale(c(0.0, -1.0));
    CSFactors::from_raw(l, lpp, raw, gates::id2(), Some(rp))
}

/// The weak swap with the target encoded in the controller.
pub fn weak_swap(lambda: f64, target: &PureState) -> Result<Scheme> {
    let u = weak_swap_unitary(lambda);
    let prep = controller_prep(target)?;
    let readout = &ComplexMatrix::diag(&[c(1.0, 0.0), c(0.0, 1.0)]) * &prep.dagger();
    let eff = &(&readout.kron(&gates::id2()) * &u) * &prep.kron(&gates::id2());
    Ok(Scheme {
        kind: SchemeKind::WeakSwap,
        target: target.clone(),
        lambda,
        kraus: kraus_from_unitary(&eff, 2, 2, 0)?,
        coupling: u,
        prep,
        readout,
        factors: weak_swap_factors(lambda)?,
    })
}

/// `exp(−i(λ/2)(σ_y⊗σ_y + σ_z⊗σ_z))` via eigendecomposition of the generator.
pub fn target_dep_unitary(lambda: f64) -> Result<ComplexMatrix> {
    let g = gates::sigma_y().kron(&gates::sigma_y()).try_add(&gates::sigma_z().kron(&gates::sigma_z()))?;
    expm_hermitian(&g, lambda / 2.0)
}

/// Target of the target-dependent scheme, `(|0⟩ + |1⟩)/√2`.
pub fn target_dep_target() -> PureState {
    PureState::new(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).expect("normalized")
}

/// The target-dependent scheme.
pub fn target_dep_scheme(lambda: f64) -> Result<Scheme> {
    let u = target_dep_unitary(lambda)?;
    let target = target_dep_target();
    let prep = controller_prep(&target)?;
    let h = FRAC_1_SQRT_2;
    let (m, p) = (cis(-FRAC_PI_4), cis(FRAC_PI_4));
    let readout = ComplexMatrix::m2(m * h, m * c(0.0, h), p * h, p * c(0.0, -h));
    let eff = &(&readout.kron(&gates::id2()) * &u) * &prep.kron(&gates::id2());
    Ok(Scheme {
        kind: SchemeKind::TargetDep,
        target,
        lambda,
        kraus: kraus_from_unitary(&eff, 2, 2, 0)?,
        coupling: u,
        prep,
        readout,
        factors: target_dep_factors(lambda)?,
    })
}

/// `(1⊕σ_x)(H⊗1)(1⊕P†_λ)(M⊗1)(1⊕σ_x)` with `M = P†_{λ/2}H` for the weak
/// swap and `M = H` for the target-dependent scheme.
pub fn hadamard_layout_product(lambda: f64, pol_phase: bool) -> ComplexMatrix {
    let id = gates::id2();
    let cnot = gates::controlled(&gates::sigma_x());
    let h = gates::hadamard();
    let m = if pol_phase { &gates::phase(-lambda / 2.0) * &h } else { h.clone() };
    let mid = gates::controlled(&gates::phase(-lambda));
    let parts = [&cnot, &h.kron(&id), &mid, &m.kron(&id), &cnot];
    crate::linalg::product(&parts)
}

/// The basic scheme's coupling for `T = |0⟩` as the explicit CS product
/// `diag(1, σ_y)·(H⊗1)·diag(e^{iπ/4}P†_{π/4}, e^{−iπ/4}P_{π/4})·(H⊗1)`.
pub fn basic_cs_product() -> ComplexMatrix {
    let id = gates::id2();
    let h = gates::hadamard().kron(&id);
    let mid =
        gates::phase(-FRAC_PI_4).scale(cis(FRAC_PI_4)).direct_sum(&gates::phase(FRAC_PI_4).scale(cis(-FRAC_PI_4)));
    let left = id.direct_sum(&gates::sigma_y());
    crate::linalg::product(&[&left, &h, &mid, &h])
}

/// The simplified product for `T = |0⟩`:
/// `(1 ⊕ σ_xP†_{π/2})·(P†_{π/4}HP_{π/4} ⊗ 1)·(1 ⊕ P_{π/2})·(H ⊗ P†_{π/4})`.
///
/// It differs from [`basic_cs_product`] by the controller phase
/// `diag(1, −i)` (besides a global phase), which leaves the channel intact.
pub fn basic_simplified_product() -> ComplexMatrix {
    let h = gates::hadamard();
    let p4 = gates::phase(FRAC_PI_4);
    let a = gates::controlled(&(&gates::sigma_x() * &gates::phase(-PI / 2.0)));
    let b = crate::linalg::product(&[&p4.dagger(), &h, &p4]).kron(&gates::id2());
    let cc = gates::controlled(&gates::phase(PI / 2.0));
    let d = h.kron(&p4.dagger());
    crate::linalg::product(&[&a, &b, &cc, &d])
}

/// Element layout of the simplified basic scheme on the polarisation/OAM
/// platform. With `fix_controller_phase` a final `P†_{π/4}` on polarisation
/// makes it equal to the coupling unitary up to a global phase.
pub fn basic_circuit(ell: i32, fix_controller_phase: bool) -> Result<OpticalCircuit> {
    let l = ell as f64;
    let mut circ = OpticalCircuit::new(Platform::PolOam { ell })?;
    circ.push(OpticalElement::Hwp(FRAC_PI_8))?;
    circ.push(OpticalElement::Dove(PI / (8.0 * l)))?;
    circ.push(OpticalElement::Dove(0.0))?;
    for e in compile_controlled_phase(PI / 2.0, -PI / 2.0, ell)? {
        if e != OpticalElement::PolPhase(0.0) && e != OpticalElement::PolPhase(-0.0) {
            circ.push(e)?;
        }
    }
    circ.push(OpticalElement::Qwp(0.0))?;
    circ.push(OpticalElement::Hwp(FRAC_PI_8))?;
    circ.push(OpticalElement::Qwp(PI / 2.0))?;
    circ.push(OpticalElement::Psdp(PI / (4.0 * l)))?;
    if fix_controller_phase {
        circ.push(OpticalElement::PolPhase(-FRAC_PI_4))?;
    }
    Ok(circ)
}

/// Weak-swap (or, without the polarisation phase, target-dependent) layout
/// for a device rotation α on OAM value ℓ. The polarisation phase is
/// `P†_{λ/2}` with `λ = 2αℓ`.
pub fn hadamard_layout_circuit(alpha: f64, ell: i32, pol_phase: bool) -> Result<OpticalCircuit> {
    let lambda = 2.0 * alpha * ell as f64;
    let mut circ = OpticalCircuit::new(Platform::PolOam { ell })?;
    circ.push(OpticalElement::Psdp(0.0))?;
    circ.push(OpticalElement::Hwp(FRAC_PI_8))?;
    if pol_phase {
        circ.push(OpticalElement::PolPhase(-lambda / 2.0))?;
    }
    circ.push(OpticalElement::Psdp(alpha))?;
    circ.push(OpticalElement::Psdp(0.0))?;
    circ.push(OpticalElement::Hwp(FRAC_PI_8))?;
    circ.push(OpticalElement::Psdp(0.0))?;
    Ok(circ)
}

/// Weak-swap layout for coupling λ on OAM value ℓ (α = λ/2ℓ).
pub fn weak_swap_circuit(lambda: f64, ell: i32) -> Result<OpticalCircuit> {
    if ell == 0 {
        return Err(Error::OutOfRange { what: "OAM value l", value: 0.0 });
    }
    hadamard_layout_circuit(lambda / (2.0 * ell as f64), ell, true)
}

/// Target-dependent layout for coupling λ on OAM value ℓ (α = λ/2ℓ).
pub fn target_dep_circuit(lambda: f64, ell: i32) -> Result<OpticalCircuit> {
    if ell == 0 {
        return Err(Error::OutOfRange { what: "OAM value l", value: 0.0 });
    }
    hadamard_layout_circuit(lambda / (2.0 * ell as f64), ell, false)
}

/// Scheme parameters as supplied by a configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeSpec {
    /// Which scheme.
    pub kind: SchemeKind,
    /// Target state (fixed for the target-dependent scheme).
    pub target: PureState,
    /// Coupling λ.
    pub lambda: f64,
    /// OAM value used for compilation.
    pub ell: i32,
}

impl SchemeSpec {
    /// Builds the scheme.
    pub fn build(&self) -> Result<Scheme> {
        match self.kind {
            SchemeKind::Basic => basic_scheme(&self.target),
            SchemeKind::WeakSwap => weak_swap(self.lambda, &self.target),
            SchemeKind::TargetDep => target_dep_scheme(self.lambda),
        }
    }

    /// Device rotation α = λ/2ℓ.
    pub fn alpha(&self) -> f64 {
        self.lambda / (2.0 * self.ell as f64)
    }
}

/// `F_n = 1 − (1 − F_0)(1 − a)^n` for `n = 0..=n_max`, with `a = sin²(·)`.
pub fn fidelity_curve(sin2_arg: f64, f0: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&sin2_arg) {
        return Err(Error::OutOfRange { what: "sin² argument", value: sin2_arg });
    }
    if !(0.0..=1.0).contains(&f0) {
        return Err(Error::OutOfRange { what: "initial fidelity", value: f0 });
    }
    let decay = 1.0 - sin2_arg;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut gap = 1.0 - f0;
    for _ in 0..=n_max {
        out.push(1.0 - gap);
        gap *= decay;
    }
    Ok(out)
}

/// Iteration counts from the geometric fidelity law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationEstimate {
    /// `ln((1−F)/(1−F_0)) / ln(decay)`.
    pub n_exact: f64,
    /// The printed expression `(1/decay)·ln((1−F)/(1−F_0))`.
    pub n_paper: f64,
    /// `⌈n_exact⌉`, the number of iterations actually needed.
    pub operational: u64,
}

/// Inverts the fidelity law for the number of iterations.
pub fn iterations_needed(f: f64, f0: f64, decay: f64) -> Result<IterationEstimate> {
    if !(0.0..1.0).contains(&f0) || !(f0 < f && f < 1.0) {
        return Err(Error::OutOfRange { what: "fidelity pair", value: f });
    }
    if !(decay > 0.0 && decay < 1.0) {
        return Err(Error::OutOfRange { what: "decay", value: decay });
    }
    let ratio = libm::log((1.0 - f) / (1.0 - f0));
    let n_exact = ratio / libm::log(decay);
    Ok(IterationEstimate { n_exact, n_paper: ratio / decay, operational: libm::ceil(n_exact - 1e-12) as u64 })
}

/// OAM values `(4n+1)ℓ`, `|n| ≤ n_range`, on which a weak swap built with
/// α = π/4ℓ also acts as a full swap.
pub fn aliased_subspaces(alpha: f64, ell: i32, n_range: u32) -> Result<Vec<i64>> {
    if ell == 0 {
        return Err(Error::OutOfRange { what: "OAM value l", value: 0.0 });
    }
    let want = PI / (4.0 * ell as f64);
    if (alpha - want).abs() > 1e-9 {
        return Err(Error::OutOfRange { what: "alpha (expected pi/(4 l))", value: alpha });
    }
    let r = n_range as i64;
    Ok((-r..=r).map(|n| (4 * n + 1) * ell as i64).collect())
}

/// Decay factors of the target-dependent scheme under two parameterizations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayComparison {
    /// Coupling λ = 2αℓ realized by the apparatus.
    pub lambda: f64,
    /// Device angle α.
    pub alpha: f64,
    /// OAM value.
    pub ell: i32,
    /// `cos²λ`, the decay of `1 − F_n` for the channel of `U(λ)`.
    pub decay_channel: f64,
    /// `1 − sin²(αℓ) = cos²(λ/2)`, the decay in the printed fidelity law.
    pub decay_printed: f64,
}

/// Compares the channel's decay factor with the printed fidelity law.
pub fn decay_comparison(alpha: f64, ell: i32) -> DecayComparison {
    let lambda = 2.0 * alpha * ell as f64;
    let s = libm::sin(alpha * ell as f64);
    let co = libm::cos(lambda);
    DecayComparison { lambda, alpha, ell, decay_channel: co * co, decay_printed: 1.0 - s * s }
}

/// Least-squares line through `(n, ln(1 − F_n))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogGapFit {
    /// Fitted slope.
    pub slope: f64,
    /// Fitted intercept.
    pub intercept: f64,
    /// Largest absolute residual.
    pub max_residual: f64,
}

/// Fits `ln(1 − F_n)` against `n`, ignoring points with `1 − F_n ≤ floor`.
pub fn fit_log_gap(fidelities: &[f64], floor: f64) -> Option<LogGapFit> {
    let pts: Vec<(f64, f64)> = fidelities
        .iter()
        .enumerate()
        .filter(|(_, f)| 1.0 - **f > floor)
        .map(|(n, f)| (n as f64, libm::log(1.0 - f)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept = (sy - slope * sx) / m;
    let max_residual = pts.iter().map(|p| (p.1 - slope * p.0 - intercept).abs()).fold(0.0, f64::max);
    Some(LogGapFit { slope, intercept, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in [SchemeKind::Basic, SchemeKind::WeakSwap, SchemeKind::TargetDep] {
            assert_eq!(SchemeKind::from_name(k.name()), Some(k));
        }
    }

    #[test]
    fn aliasing_values() {
        assert_eq!(aliased_subspaces(PI / 4.0, 1, 2).unwrap(), vec![-7, -3, 1, 5, 9]);
        assert_eq!(aliased_subspaces(PI / 8.0, 2, 1).unwrap(), vec![-6, 2, 10]);
        assert!(aliased_subspaces(0.3, 1, 1).is_err());
    }
}
