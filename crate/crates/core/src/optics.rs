//! Jones-calculus model of the optical elements and compilation of CS
//! factors into element lists.
//!
//! Two platforms are supported. On [`Platform::PolOam`] polarisation is the
//! controller (`|V⟩ = |0⟩`, `|H⟩ = |1⟩`) and the OAM pair `{|−ℓ⟩, |+ℓ⟩}` is
//! the system. On [`Platform::PathPol`] the interferometer path is the
//! controller and polarisation is the system.
//!
//! Conventions:
//!
//! * `H_θ = e^{−2iθσ_y}σ_z` (half-wave plate, fast axis at θ),
//! * `Q_θ = e^{−iθσ_y}·diag(1, −i)·e^{iθσ_y}` (quarter-wave plate),
//! * `P_φ = diag(e^{iφ}, e^{−iφ})`,
//! * PSDP(α) `= 1 ⊕ σ_x P†_{2ℓα}`, Dove prism at α `= P_{2ℓα}σ_x` on OAM.
//!
//! Element lists are in order of application: the first element acts first,
//! so the circuit matrix is `J_k ⋯ J_2 J_1`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI, TAU};
use core::fmt;

use crate::csd::CSFactors;
use crate::error::{Error, Result};
use crate::gates;
use crate::linalg::{c, cis, diagonalize_unitary, phase_distance, wrap, ComplexMatrix};
use crate::state::PureState;
use crate::NORM_TOL;

/// Optical platform of a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Platform {
    /// Path controller, polarisation system.
    PathPol,
    /// Polarisation controller, OAM system on `{|−ℓ⟩, |+ℓ⟩}`.
    PolOam {
        /// OAM value ℓ (nonzero).
        ell: i32,
    },
}

impl Platform {
    /// Mnemonic used in netlists and diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Self::PathPol => "PATH_POL",
            Self::PolOam { .. } => "POL_OAM",
        }
    }

    /// The OAM value, when the platform has one.
    pub fn ell(&self) -> Option<i32> {
        match self {
            Self::PathPol => None,
            Self::PolOam { ell } => Some(*ell),
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PathPol => f.write_str("PATH_POL"),
            Self::PolOam { ell } => write!(f, "POL_OAM l={ell}"),
        }
    }
}

/// Interferometer arm an element sits in (path/polarisation platform only).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arm {
    /// Acts on both arms (or the platform has no arms).
    Both,
    /// Path state `|0⟩`.
    Upper,
    /// Path state `|1⟩`.
    Lower,
}

impl Arm {
    /// Mnemonic used in netlists.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Both => "both",
            Self::Upper => "upper",
            Self::Lower => "lower",
        }
    }
}

/// An optical element with its parameters. Angles are in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OpticalElement {
    /// Half-wave plate with fast axis at the given angle.
    Hwp(f64),
    /// Quarter-wave plate with fast axis at the given angle.
    Qwp(f64),
    /// Phase shifter `P_φ` on polarisation.
    PolPhase(f64),
    /// Phase shifter `P_φ` on the OAM qubit.
    OamPhase(f64),
    /// Balanced beam splitter: Hadamard on the path qubit.
    Bs,
    /// Polarisation-selective Dove prism rotated by α.
    Psdp(f64),
    /// Dove prism rotated by α.
    Dove(f64),
    /// Spiral phase plate adding Δℓ to an ancillary OAM register.
    Spiral(i32),
    /// Cylindrical-lens π converter (OAM analogue of a half-wave plate).
    ModeConvPi(f64),
    /// Cylindrical-lens π/2 converter (OAM analogue of a quarter-wave plate).
    ModeConvPi2(f64),
    /// Polarising beam splitter used for time-bin gating.
    Pbs,
    /// Even/odd OAM sorter on an ancillary OAM register.
    ModeSorterParity,
    /// Electro-optic modulator; flips polarisation when on.
    Eom(bool),
    /// Phase `e^{iφ}` on one interferometer arm.
    ArmPhase(f64),
}

impl OpticalElement {
    /// Mnemonic used in netlists.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Hwp(_) => "HWP",
            Self::Qwp(_) => "QWP",
            Self::PolPhase(_) => "POL_PHASE",
            Self::OamPhase(_) => "OAM_PHASE",
            Self::Bs => "BS",
            Self::Psdp(_) => "PSDP",
            Self::Dove(_) => "DOVE",
            Self::Spiral(_) => "SPIRAL",
            Self::ModeConvPi(_) => "MODE_CONV_PI",
            Self::ModeConvPi2(_) => "MODE_CONV_PI2",
            Self::Pbs => "PBS",
            Self::ModeSorterParity => "MODE_SORTER_PARITY",
            Self::Eom(_) => "EOM",
            Self::ArmPhase(_) => "ARM_PHASE",
        }
    }

    /// Angle parameter, if any.
    pub fn angle(&self) -> Option<f64> {
        match *self {
            Self::Hwp(a)
            | Self::Qwp(a)
            | Self::PolPhase(a)
            | Self::OamPhase(a)
            | Self::Psdp(a)
            | Self::Dove(a)
            | Self::ModeConvPi(a)
            | Self::ModeConvPi2(a)
            | Self::ArmPhase(a) => Some(a),
            _ => None,
        }
    }

    /// Same element with its angle reduced into `[0, 2π)`.
    pub fn normalized(self) -> Self {
        let w = |a: f64| wrap(a, TAU);
        match self {
            Self::Hwp(a) => Self::Hwp(w(a)),
            Self::Qwp(a) => Self::Qwp(w(a)),
            Self::PolPhase(a) => Self::PolPhase(w(a)),
            Self::OamPhase(a) => Self::OamPhase(w(a)),
            Self::Psdp(a) => Self::Psdp(w(a)),
            Self::Dove(a) => Self::Dove(w(a)),
            Self::ModeConvPi(a) => Self::ModeConvPi(w(a)),
            Self::ModeConvPi2(a) => Self::ModeConvPi2(w(a)),
            Self::ArmPhase(a) => Self::ArmPhase(w(a)),
            other => other,
        }
    }

    /// Whether the element may appear on `platform`.
    pub fn is_legal_on(&self, platform: Platform) -> bool {
        match (self, platform) {
            (Self::Hwp(_) | Self::Qwp(_) | Self::PolPhase(_), _) => true,
            (Self::Bs | Self::ArmPhase(_) | Self::Spiral(_) | Self::ModeSorterParity, Platform::PathPol) => true,
            (Self::OamPhase(_) | Self::Psdp(_) | Self::Dove(_) | Self::Pbs | Self::Eom(_), Platform::PolOam { .. }) => {
                true
            }
            (Self::ModeConvPi(_) | Self::ModeConvPi2(_), Platform::PolOam { ell }) => ell.abs() == 1,
            _ => false,
        }
    }
}

/// Half-wave plate Jones matrix `e^{−2iθσ_y}σ_z`.
pub fn hwp_matrix(theta: f64) -> ComplexMatrix {
    &gates::rot_y(2.0 * theta) * &gates::sigma_z()
}

/// Quarter-wave plate Jones matrix `e^{−iθσ_y}·diag(1, −i)·e^{iθσ_y}`.
pub fn qwp_matrix(theta: f64) -> ComplexMatrix {
    let core = ComplexMatrix::diag(&[c(1.0, 0.0), c(0.0, -1.0)]);
    &(&gates::rot_y(theta) * &core) * &gates::rot_y(-theta)
}

/// Dove prism on the OAM qubit: `P_{2ℓα}σ_x`.
pub fn dove_matrix(alpha: f64, ell: i32) -> ComplexMatrix {
    &gates::phase(2.0 * ell as f64 * alpha) * &gates::sigma_x()
}

/// PSDP as a two-qubit operator: `1 ⊕ σ_x P†_{2ℓα}`.
pub fn psdp_matrix(alpha: f64, ell: i32) -> ComplexMatrix {
    gates::controlled(&(&gates::sigma_x() * &gates::phase(-2.0 * ell as f64 * alpha)))
}

fn embed(local: &ComplexMatrix, on_controller: bool) -> ComplexMatrix {
    let id = gates::id2();
    if on_controller {
        local.kron(&id)
    } else {
        id.kron(local)
    }
}

fn embed_arm(local: &ComplexMatrix, arm: Arm) -> ComplexMatrix {
    let id = gates::id2();
    match arm {
        Arm::Both => id.kron(local),
        Arm::Upper => local.direct_sum(&id),
        Arm::Lower => id.direct_sum(local),
    }
}

/// Single-degree-of-freedom Jones matrix (2×2) of an element, where defined.
pub fn local_matrix(element: &OpticalElement, ell: i32) -> Option<ComplexMatrix> {
    Some(match *element {
        OpticalElement::Hwp(a) | OpticalElement::ModeConvPi(a) => hwp_matrix(a),
        OpticalElement::Qwp(a) | OpticalElement::ModeConvPi2(a) => qwp_matrix(a),
        OpticalElement::PolPhase(a) | OpticalElement::OamPhase(a) => gates::phase(a),
        OpticalElement::Dove(a) => dove_matrix(a, ell),
        OpticalElement::Eom(on) => {
            if on {
                gates::sigma_x()
            } else {
                gates::id2()
            }
        }
        OpticalElement::ArmPhase(a) => ComplexMatrix::identity(2).scale(cis(a)),
        OpticalElement::Pbs | OpticalElement::Spiral(_) | OpticalElement::ModeSorterParity => gates::id2(),
        OpticalElement::Bs => gates::hadamard(),
        OpticalElement::Psdp(_) => return None,
    })
}

/// 4×4 Jones matrix (controller ⊗ system) of an element placed on `arm`.
pub fn jones(element: &OpticalElement, platform: Platform, arm: Arm) -> Result<ComplexMatrix> {
    if !element.is_legal_on(platform) || (arm != Arm::Both && platform != Platform::PathPol) {
        return Err(Error::IllegalElement { element: element.name(), platform: platform.name() });
    }
    match platform {
        Platform::PolOam { ell } => {
            if ell == 0 {
                return Err(Error::OutOfRange { what: "OAM value l", value: 0.0 });
            }
            Ok(match element {
                OpticalElement::Psdp(a) => psdp_matrix(*a, ell),
                OpticalElement::Hwp(_)
                | OpticalElement::Qwp(_)
                | OpticalElement::PolPhase(_)
                | OpticalElement::Eom(_) => embed(&local_matrix(element, ell).expect("local"), true),
                OpticalElement::Pbs => ComplexMatrix::identity(4),
                _ => embed(&local_matrix(element, ell).expect("local"), false),
            })
        }
        Platform::PathPol => Ok(match element {
            OpticalElement::Bs => {
                if arm != Arm::Both {
                    return Err(Error::IllegalElement { element: "BS on a single arm", platform: "PATH_POL" });
                }
                embed(&gates::hadamard(), true)
            }
            OpticalElement::ArmPhase(a) => {
                let ph = cis(*a);
                let one = c(1.0, 0.0);
                let d = match arm {
                    Arm::Both => [ph, ph],
                    Arm::Upper => [ph, one],
                    Arm::Lower => [one, ph],
                };
                ComplexMatrix::diag(&d).kron(&gates::id2())
            }
            OpticalElement::Spiral(_) | OpticalElement::ModeSorterParity => ComplexMatrix::identity(4),
            _ => embed_arm(&local_matrix(element, 1).expect("local"), arm),
        }),
    }
}

/// An element together with its arm tag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlacedElement {
    /// The element.
    pub element: OpticalElement,
    /// Arm tag; [`Arm::Both`] outside the path/polarisation platform.
    pub arm: Arm,
}

/// Ordered list of elements on a platform.
#[derive(Clone, Debug, PartialEq)]
pub struct OpticalCircuit {
    platform: Platform,
    elements: Vec<PlacedElement>,
}

impl OpticalCircuit {
    /// Empty circuit.
    pub fn new(platform: Platform) -> Result<Self> {
        if platform == (Platform::PolOam { ell: 0 }) {
            return Err(Error::OutOfRange { what: "OAM value l", value: 0.0 });
        }
        Ok(Self { platform, elements: Vec::new() })
    }

    /// Platform tag.
    pub fn platform(&self) -> Platform {
        self.platform
    }

    /// Elements in order of application.
    pub fn elements(&self) -> &[PlacedElement] {
        &self.elements
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// True when there are no elements.
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Appends an element acting on both arms.
    pub fn push(&mut self, element: OpticalElement) -> Result<()> {
        self.push_on(element, Arm::Both)
    }

    /// Appends an element on the given arm, normalizing its angle.
    pub fn push_on(&mut self, element: OpticalElement, arm: Arm) -> Result<()> {
        jones(&element, self.platform, arm)?;
        self.elements.push(PlacedElement { element: element.normalized(), arm });
        Ok(())
    }

    /// Appends several elements on one arm.
    pub fn extend_on(&mut self, elements: &[OpticalElement], arm: Arm) -> Result<()> {
        elements.iter().try_for_each(|e| self.push_on(*e, arm))
    }

    /// Circuit matrix `J_k ⋯ J_1`.
    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let mut m = ComplexMatrix::identity(4);
        for p in &self.elements {
            m = &jones(&p.element, self.platform, p.arm)? * &m;
        }
        Ok(m)
    }

    /// The same elements re-evaluated on another OAM value.
    pub fn with_ell(&self, ell: i32) -> Result<Self> {
        let platform = match self.platform {
            Platform::PolOam { .. } => Platform::PolOam { ell },
            Platform::PathPol => return Err(Error::IllegalElement { element: "OAM value", platform: "PATH_POL" }),
        };
        let mut out = Self::new(platform)?;
        for p in &self.elements {
            out.push_on(p.element, p.arm)?;
        }
        Ok(out)
    }
}

/// Output of [`verify`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyReport {
    /// `min_φ ‖e^{iφ}·compiled − target‖_F`.
    pub distance: f64,
    /// The minimizing φ.
    pub recovered_phase: f64,
    /// `distance ≤ tol`.
    pub pass: bool,
}

/// Compares a circuit with a target unitary modulo a global phase.
pub fn verify(circuit: &OpticalCircuit, target: &ComplexMatrix, tol: f64) -> Result<VerifyReport> {
    let m = circuit.matrix()?;
    if m.shape() != target.shape() {
        return Err(Error::DimensionMismatch { context: "verify", expected: 4, found: target.rows() });
    }
    let pd = phase_distance(&m, target);
    Ok(VerifyReport { distance: pd.distance, recovered_phase: pd.phase, pass: pd.distance <= tol })
}

/// Applies a circuit to a controller ⊗ system state.
pub fn simulate(circuit: &OpticalCircuit, input: &PureState) -> Result<PureState> {
    if input.dim() != 4 {
        return Err(Error::DimensionMismatch { context: "simulate", expected: 4, found: input.dim() });
    }
    PureState::normalized(circuit.matrix()?.apply(input.amplitudes()))
}

/// Euler angles of a 2×2 unitary:
/// `U = e^{iφ}·e^{−iξσ_y/2}·e^{iησ_z/2}·e^{−iζσ_y/2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles {
    /// ξ ∈ [0, 2π).
    pub xi: f64,
    /// η ∈ [0, 4π).
    pub eta: f64,
    /// ζ ∈ [0, 2π).
    pub zeta: f64,
    /// Global phase φ ∈ [0, 2π).
    pub phase: f64,
}

impl EulerAngles {
    /// `e^{−iξσ_y/2}·e^{iησ_z/2}·e^{−iζσ_y/2}` without the global phase.
    pub fn rotation(&self) -> ComplexMatrix {
        euler_rotation(self.xi, self.eta, self.zeta)
    }

    /// Full matrix including the global phase.
    pub fn matrix(&self) -> ComplexMatrix {
        self.rotation().scale(cis(self.phase))
    }
}

/// `e^{−iξσ_y/2}·e^{iησ_z/2}·e^{−iζσ_y/2}`.
pub fn euler_rotation(xi: f64, eta: f64, zeta: f64) -> ComplexMatrix {
    &(&gates::rot_y(xi / 2.0) * &gates::phase(eta / 2.0)) * &gates::rot_y(zeta / 2.0)
}

/// Euler decomposition of a 2×2 unitary.
///
/// When the middle rotation degenerates (η ∈ {0, 2π}, or η = π) the split
/// between ξ and ζ is not unique; ζ is then set to 0.
pub fn euler_decompose(u: &ComplexMatrix) -> Result<EulerAngles> {
    u.require_unitary(Some(2), "euler_decompose input", NORM_TOL)?;
    let mut phase = u.det().arg() / 2.0;
    let v = u.scale(cis(-phase));
    let (a, b) = (v[(0, 0)], v[(1, 0)]);
    // a = cos(η/2)cos(p) + i sin(η/2)cos(q), b = cos(η/2)sin(p) + i sin(η/2)sin(q)
    // with p = (ξ+ζ)/2, q = (ξ−ζ)/2.
    let rc = libm::hypot(a.re, b.re);
    let rs = libm::hypot(a.im, b.im);
    let eta = 2.0 * libm::atan2(rs, rc);
    let (p, q) = if rs <= 1e-14 {
        let p = libm::atan2(b.re, a.re);
        (p, p)
    } else if rc <= 1e-14 {
        let q = libm::atan2(b.im, a.im);
        (q, q)
    } else {
        (libm::atan2(b.re, a.re), libm::atan2(b.im, a.im))
    };
    let mut xi = p + q;
    let mut zeta = p - q;
    // Each 2π shift of ξ or ζ flips the sign of the rotation; absorb it in φ.
    for x in [&mut xi, &mut zeta] {
        let k = libm::floor(*x / TAU);
        *x -= k * TAU;
        if *x >= TAU {
            *x -= TAU;
        }
        if (k as i64).rem_euclid(2) == 1 {
            phase += PI;
        }
    }
    Ok(EulerAngles { xi, eta: wrap(eta, 2.0 * TAU), zeta, phase: wrap(phase, TAU) })
}

/// Wave-plate triple realizing `e^{−iξσ_y/2}e^{iησ_z/2}e^{−iζσ_y/2}` up to a
/// global phase:
/// `Q_{π/4+ξ/2} · H_{−π/4+(ξ+η−ζ)/4} · Q_{(π−2ζ)/4}`.
///
/// Returned in order of application, i.e. `[Q_{(π−2ζ)/4}, H, Q_{π/4+ξ/2}]`.
pub fn qqh(xi: f64, eta: f64, zeta: f64) -> [OpticalElement; 3] {
    [
        OpticalElement::Qwp((PI - 2.0 * zeta) / 4.0),
        OpticalElement::Hwp(-FRAC_PI_4 + (xi + eta - zeta) / 4.0),
        OpticalElement::Qwp(FRAC_PI_4 + xi / 2.0),
    ]
}

/// Swaps a quarter-wave plate past a half-wave plate:
/// `Q_φ H_{φ′} = H_{φ′} Q_{2φ′−φ}`. Returns `(φ′, 2φ′ − φ)`.
pub fn reorder_qh(qwp: f64, hwp: f64) -> (f64, f64) {
    (hwp, 2.0 * hwp - qwp)
}

/// Wave plates realizing `H_{α/2}·P_{λ/2}·Hadamard` up to a global phase:
/// `Q_{α+π/4} · H_{(2α+λ)/4−π/8} · Q_{π/2}`, in order of application.
pub fn waveplate_sandwich(alpha: f64, lambda: f64) -> [OpticalElement; 3] {
    [
        OpticalElement::Qwp(FRAC_PI_2),
        OpticalElement::Hwp((2.0 * alpha + lambda) / 4.0 - FRAC_PI_8),
        OpticalElement::Qwp(alpha + FRAC_PI_4),
    ]
}

/// Product of 2×2 Jones matrices of a list of local elements, in order of application.
pub fn local_product(elements: &[OpticalElement], ell: i32) -> ComplexMatrix {
    elements.iter().fold(gates::id2(), |acc, e| &local_matrix(e, ell).expect("local element") * &acc)
}

/// `1 ⊕ diag(e^{iθ1}, e^{iθ2})` up to a global phase, with a polarisation
/// phase `P†_{θ′₁}` and two PSDPs, where `θ′₁ = (θ1+θ2)/4` and
/// `θ′₂ = (θ1−θ2)/2`.
pub fn compile_controlled_phase(theta1: f64, theta2: f64, ell: i32) -> Result<Vec<OpticalElement>> {
    if ell == 0 {
        return Err(Error::OutOfRange { what: "OAM value l", value: 0.0 });
    }
    let t1 = (theta1 + theta2) / 4.0;
    let t2 = (theta1 - theta2) / 2.0;
    Ok(vec![OpticalElement::PolPhase(-t1), OpticalElement::Psdp(-t2 / (2.0 * ell as f64)), OpticalElement::Psdp(0.0)])
}

const STRUCT_TOL: f64 = 1e-12;

fn is_diagonal(m: &ComplexMatrix) -> bool {
    m[(0, 1)].norm() <= STRUCT_TOL && m[(1, 0)].norm() <= STRUCT_TOL
}

fn is_antidiagonal(m: &ComplexMatrix) -> bool {
    m[(0, 0)].norm() <= STRUCT_TOL && m[(1, 1)].norm() <= STRUCT_TOL
}

fn is_scalar(m: &ComplexMatrix) -> bool {
    phase_distance(m, &gates::id2()).distance <= STRUCT_TOL
}

/// Compiles a 2×2 unitary acting on the OAM qubit.
///
/// Diagonal phases use a Dove-prism pair, `σ_x`-type operators a single Dove
/// prism; anything else needs the mode converters and therefore `|ℓ| = 1`.
pub fn compile_oam_local(m: &ComplexMatrix, ell: i32, factor: &'static str) -> Result<Vec<OpticalElement>> {
    m.require_unitary(Some(2), factor, NORM_TOL)?;
    let twol = 2.0 * ell as f64;
    if is_scalar(m) {
        return Ok(Vec::new());
    }
    if is_diagonal(m) {
        let phi = (m[(0, 0)].arg() - m[(1, 1)].arg()) / 2.0;
        // DOVE(0)·DOVE(−φ/2ℓ) = σ_x P_{−φ} σ_x = P_φ.
        return Ok(vec![OpticalElement::Dove(-phi / twol), OpticalElement::Dove(0.0)]);
    }
    if is_antidiagonal(m) {
        let phi = (m[(0, 1)].arg() - m[(1, 0)].arg()) / 2.0;
        return Ok(vec![OpticalElement::Dove(phi / twol)]);
    }
    if ell.abs() != 1 {
        return Err(Error::NotImplementable { factor, ell });
    }
    let e = euler_decompose(m)?;
    let [a, b, cc] = qqh(e.xi, e.eta, e.zeta);
    let conv = |x: OpticalElement| match x {
        OpticalElement::Qwp(t) => OpticalElement::ModeConvPi2(t),
        OpticalElement::Hwp(t) => OpticalElement::ModeConvPi(t),
        other => other,
    };
    Ok(vec![conv(a), conv(b), conv(cc)])
}

/// Compiles `1 ⊕ Y` when `Y` is diagonal or of the form `e^{iχ}σ_x P†_θ`;
/// returns `None` for other `Y`.
fn compile_controlled_direct(y: &ComplexMatrix, ell: i32) -> Result<Option<Vec<OpticalElement>>> {
    if is_diagonal(y) {
        return compile_controlled_phase(y[(0, 0)].arg(), y[(1, 1)].arg(), ell).map(Some);
    }
    if is_antidiagonal(y) {
        let (a, b) = (y[(0, 1)].arg(), y[(1, 0)].arg());
        let chi = (a + b) / 2.0;
        let theta = (a - b) / 2.0;
        return Ok(Some(vec![OpticalElement::PolPhase(-chi / 2.0), OpticalElement::Psdp(theta / (2.0 * ell as f64))]));
    }
    Ok(None)
}

/// Compiles CS factors of a qubit-qubit unitary for the polarisation/OAM
/// platform, using
///
/// ```text
/// U = C_{Lpp L†} · (H ⊗ LΘ) · C_{(Θ†)²} · (H ⊗ 1) · C_X · (1 ⊗ R†),   X = −i R′† R,
/// ```
///
/// where `C_Y = 1 ⊕ Y`. `C_X` disappears in the gauge `R′ = −iR`. A
/// controlled operation that is neither diagonal nor `σ_x`-type is first
/// diagonalized, `Y = W Φ W†`, moving `W†` into the preceding OAM-local factor.
pub fn compile_pol_oam(factors: &CSFactors, ell: i32) -> Result<OpticalCircuit> {
    factors.validate()?;
    if factors.n() != 2 {
        return Err(Error::DimensionMismatch { context: "compile_pol_oam", expected: 2, found: factors.n() });
    }
    let mut circ = OpticalCircuit::new(Platform::PolOam { ell })?;
    let hwp_h = OpticalElement::Hwp(FRAC_PI_8);

    circ.extend_on(&compile_oam_local(&factors.r.dagger(), ell, "R†")?, Arm::Both)?;
    let x = (&factors.r_prime().dagger() * &factors.r).scale(c(0.0, -1.0));
    if x.dist(&gates::id2()) > STRUCT_TOL {
        let els = match compile_controlled_direct(&x, ell)? {
            Some(els) => els,
            None => {
                let (w, ph) = diagonalize_unitary(&x)?;
                let mut v = compile_oam_local(&w.dagger(), ell, "eigenbasis of R′†R")?;
                v.extend(compile_controlled_phase(ph[0].arg(), ph[1].arg(), ell)?);
                v.extend(compile_oam_local(&w, ell, "eigenbasis of R′†R")?);
                v
            }
        };
        circ.extend_on(&els, Arm::Both)?;
    }
    circ.push(hwp_h)?;
    let t = &factors.thetas;
    circ.extend_on(&compile_controlled_phase(-2.0 * t[0], -2.0 * t[1], ell)?, Arm::Both)?;
    circ.push(hwp_h)?;

    let l_theta = &factors.l * &factors.theta_matrix();
    let y = &factors.lpp * &factors.l.dagger();
    match compile_controlled_direct(&y, ell)? {
        Some(els) => {
            circ.extend_on(&compile_oam_local(&l_theta, ell, "LΘ")?, Arm::Both)?;
            circ.extend_on(&els, Arm::Both)?;
        }
        None => {
            let (w, ph) = diagonalize_unitary(&y)?;
            circ.extend_on(&compile_oam_local(&(&w.dagger() * &l_theta), ell, "W†LΘ")?, Arm::Both)?;
            circ.extend_on(&compile_controlled_phase(ph[0].arg(), ph[1].arg(), ell)?, Arm::Both)?;
            circ.extend_on(&compile_oam_local(&w, ell, "W")?, Arm::Both)?;
        }
    }
    Ok(circ)
}

/// Wave-plate stack for a polarisation unitary on one arm. On a single arm
/// the stack's global phase becomes a relative phase, so it is corrected
/// with an [`OpticalElement::ArmPhase`].
fn arm_stack(circ: &mut OpticalCircuit, m: &ComplexMatrix, arm: Arm) -> Result<()> {
    let els: Vec<OpticalElement> = if is_scalar(m) {
        Vec::new()
    } else {
        let e = euler_decompose(m)?;
        qqh(e.xi, e.eta, e.zeta).to_vec()
    };
    circ.extend_on(&els, arm)?;
    if arm != Arm::Both {
        let p = local_product(&els, 1);
        let psi = p.inner(m).arg();
        if psi.abs() > 1e-15 {
            circ.push_on(OpticalElement::ArmPhase(psi), arm)?;
        }
    }
    Ok(())
}

/// Compiles CS factors into a two-arm interferometer on the
/// path/polarisation platform:
///
/// ```text
/// U = (L ⊕ Lpp) · (H ⊗ 1) · (Θ ⊕ Θ†) · (H ⊗ 1) · (R† ⊕ −iR′†)
/// ```
///
/// with each arm factor realized as a quarter/half/quarter wave-plate stack.
pub fn compile_path_pol(factors: &CSFactors) -> Result<OpticalCircuit> {
    factors.validate()?;
    if factors.n() != 2 {
        return Err(Error::DimensionMismatch { context: "compile_path_pol", expected: 2, found: factors.n() });
    }
    let mut circ = OpticalCircuit::new(Platform::PathPol)?;
    let rd = factors.r.dagger();
    let rpd = factors.r_prime().dagger().scale(c(0.0, -1.0));
    if rd.dist(&rpd) <= STRUCT_TOL {
        arm_stack(&mut circ, &rd, Arm::Both)?;
    } else {
        arm_stack(&mut circ, &rd, Arm::Upper)?;
        arm_stack(&mut circ, &rpd, Arm::Lower)?;
    }
    circ.push(OpticalElement::Bs)?;
    let theta = factors.theta_matrix();
    arm_stack(&mut circ, &theta, Arm::Upper)?;
    arm_stack(&mut circ, &theta.dagger(), Arm::Lower)?;
    circ.push(OpticalElement::Bs)?;
    arm_stack(&mut circ, &factors.l, Arm::Upper)?;
    arm_stack(&mut circ, &factors.lpp, Arm::Lower)?;
    Ok(circ)
}

/// Global-phase-free comparison helper for 2×2 or 4×4 matrices.
pub fn equal_up_to_phase(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    phase_distance(a, b).distance <= tol
}
