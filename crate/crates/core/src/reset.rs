//! Controller reset strategies: lossy filtering (with the amplification
//! ledger), time-bin ancillas and OAM ancillas, plus the closed-form
//! fidelities of filtered iteration.
//!
//! Bin conventions: in the time-bin engine the Kraus index `b_j` of
//! iteration `j` (from 1) contributes `b_j·2^{j−1}` to the bin index; in the
//! OAM engine it contributes `b_j·2^{N−j}`, because every later iteration
//! doubles the OAM values already written. In both cases bin `m` holds
//! `K_{b_N}⋯K_{b_1}|ψ0⟩`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::channel::KrausSet;
use crate::error::{Error, Result};
use crate::linalg::{c, vnorm, ComplexMatrix, C64};
use crate::schemes::SchemeKind;
use crate::state::{DensityMatrix, PureState};

/// Squared norm below which a filtered state counts as extinguished.
pub const FILTER_FLOOR: f64 = 1e-24;

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Unnormalized system state after a number of filter steps.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredState {
    amplitudes: Vec<C64>,
    norm2: f64,
    steps: usize,
}

impl FilteredState {
    /// Starts from a normalized state.
    pub fn new(psi: &PureState) -> Self {
        Self { amplitudes: psi.amplitudes().to_vec(), norm2: 1.0, steps: 0 }
    }

    /// Unnormalized amplitudes.
    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Surviving intensity fraction.
    pub fn norm2(&self) -> f64 {
        self.norm2
    }

    /// Number of filter steps applied.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `|⟨T|ψ⟩|² / ‖ψ‖²`.
    pub fn fidelity(&self, target: &PureState) -> Result<f64> {
        if self.norm2 < FILTER_FLOOR {
            return Err(Error::FilteredToZero);
        }
        Ok((target.overlap(&self.amplitudes).norm_sqr() / self.norm2).clamp(0.0, 1.0))
    }

    /// Gain that restores the input intensity, `1/norm²`.
    pub fn required_gain(&self) -> Result<f64> {
        required_gain(1.0 - self.norm2)
    }
}

/// `K̃ = (K0 + K1)/√2`, the operator left after projecting the controller
/// onto `|+⟩` and rotating it back.
pub fn filter_operator(kraus: &KrausSet) -> Result<ComplexMatrix> {
    if kraus.len() != 2 {
        return Err(Error::DimensionMismatch { context: "filter_operator", expected: 2, found: kraus.len() });
    }
    let ops = kraus.operators();
    Ok(ops[0].try_add(&ops[1])?.scale_re(FRAC_1_SQRT_2))
}

/// One filtering pass; no renormalization.
pub fn filter_step(kraus: &KrausSet, state: &FilteredState) -> Result<FilteredState> {
    let k = filter_operator(kraus)?;
    let amplitudes = k.try_apply(&state.amplitudes)?;
    let norm2 = norm2(&amplitudes);
    Ok(FilteredState { amplitudes, norm2, steps: state.steps + 1 })
}

/// Filters `n` times.
pub fn filter_run(kraus: &KrausSet, psi0: &PureState, n: usize) -> Result<Vec<FilteredState>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(FilteredState::new(psi0));
    for _ in 0..n {
        let next = filter_step(kraus, out.last().expect("nonempty"))?;
        out.push(next);
    }
    Ok(out)
}

/// `|⟨T|K̃ⁿψ0⟩|² / ‖K̃ⁿψ0‖²` by repeated filtering.
pub fn filtered_fidelity_numeric(kraus: &KrausSet, psi0: &PureState, target: &PureState, n: usize) -> Result<f64> {
    let mut s = FilteredState::new(psi0);
    for _ in 0..n {
        s = filter_step(kraus, &s)?;
    }
    s.fidelity(target)
}

/// Closed-form filtered fidelity.
///
/// * basic: 1 for `n ≥ 1`, provided `⟨T|ψ0⟩ + ⟨T⊥|ψ0⟩ ≠ 0`;
/// * weak swap: `1/(1 + Λcos^{2n}λ)`,
///   `Λ = |⟨T⊥|ψ0⟩|² / |⟨T|ψ0⟩ + e^{iλ}sin λ Σ_{k<n}(e^{iλ}cos λ)^k ⟨T⊥|ψ0⟩|²`;
/// * target-dependent: `1/(1 + cos^{2n}λ·|⟨T⊥|ψ0⟩|²/|⟨T|ψ0⟩|²)`.
///
/// `T⊥` is [`PureState::perp`] of the target. `n = 0` gives `|⟨T|ψ0⟩|²`.
pub fn filtered_fidelity_analytic(
    kind: SchemeKind,
    lambda: f64,
    psi0: &PureState,
    target: &PureState,
    n: usize,
) -> Result<f64> {
    let tp = target.perp()?;
    let a = target.overlap(psi0.amplitudes());
    let b = tp.overlap(psi0.amplitudes());
    if n == 0 {
        return Ok(a.norm_sqr().clamp(0.0, 1.0));
    }
    let cos2n = libm::pow(libm::cos(lambda), 2.0 * n as f64);
    let lam_big = match kind {
        SchemeKind::Basic => {
            if (a + b).norm_sqr() < FILTER_FLOOR {
                return Err(Error::Proviso("<T|psi0> + <T_perp|psi0> vanishes"));
            }
            return Ok(1.0);
        }
        SchemeKind::WeakSwap => {
            let q = crate::linalg::cis(lambda) * libm::cos(lambda);
            let mut sum = c(0.0, 0.0);
            let mut pow = c(1.0, 0.0);
            for _ in 0..n {
                sum += pow;
                pow *= q;
            }
            let den = (a + crate::linalg::cis(lambda) * libm::sin(lambda) * sum * b).norm_sqr();
            if den < FILTER_FLOOR {
                return Err(Error::Proviso("Lambda is unbounded"));
            }
            b.norm_sqr() / den
        }
        SchemeKind::TargetDep => {
            if a.norm_sqr() < FILTER_FLOOR {
                return Err(Error::Proviso("<T|psi0> vanishes"));
            }
            b.norm_sqr() / a.norm_sqr()
        }
    };
    Ok(1.0 / (1.0 + lam_big * cos2n))
}

/// `1/(1 − loss)`.
pub fn required_gain(loss_fraction: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&loss_fraction) {
        return Err(Error::OutOfRange { what: "loss fraction", value: loss_fraction });
    }
    Ok(1.0 / (1.0 - loss_fraction))
}

/// Vacuum speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Parametric amplifier parameters (SI units).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct GainParams {
    /// Effective nonlinear coefficient (m/V).
    pub d_eff: f64,
    /// Signal angular frequency (rad/s).
    pub omega1: f64,
    /// Idler angular frequency (rad/s).
    pub omega2: f64,
    /// Signal wave number in the medium (1/m).
    pub k1: f64,
    /// Idler wave number in the medium (1/m).
    pub k2: f64,
    /// Pump field amplitude (V/m).
    pub a3_abs: f64,
    /// Wave-vector mismatch (1/m).
    pub delta_k: f64,
    /// Interaction length (m).
    pub length: f64,
    /// Coupling Γ supplied directly (1/m), overriding the field expression.
    pub gamma: Option<f64>,
}

/// Result of [`parametric_gain`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainReport {
    /// Γ².
    pub gamma2: f64,
    /// g² = Γ² − Δk²/4; negative in the oscillatory regime.
    pub g2: f64,
    /// √|g²|.
    pub g_abs: f64,
    /// Intensity gain G = I1(L)/I1(0).
    pub gain: f64,
    /// I1(L)/I1(0), equal to G.
    pub i1_ratio: f64,
    /// I2(L)/I1(0) with no idler input; `None` when ω1 = 0.
    pub i2_ratio: Option<f64>,
}

impl GainParams {
    /// Γ², from the override or from the field expression.
    pub fn gamma2(&self) -> Result<f64> {
        if let Some(g) = self.gamma {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::OutOfRange { what: "Gamma", value: g });
            }
            return Ok(g * g);
        }
        if !(self.k1 > 0.0 && self.k2 > 0.0) {
            return Err(Error::OutOfRange { what: "wave numbers k1*k2", value: self.k1 * self.k2 });
        }
        let c2 = SPEED_OF_LIGHT * SPEED_OF_LIGHT;
        let num = 4.0
            * self.d_eff
            * self.d_eff
            * self.omega1
            * self.omega1
            * self.omega2
            * self.omega2
            * self.a3_abs
            * self.a3_abs;
        Ok(num / (self.k1 * self.k2 * c2 * c2))
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            ("d_eff", self.d_eff),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("k1", self.k1),
            ("k2", self.k2),
            ("A3", self.a3_abs),
            ("L", self.length),
        ];
        for (what, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::OutOfRange { what, value: v });
            }
        }
        if !self.delta_k.is_finite() {
            return Err(Error::OutOfRange { what: "delta_k", value: self.delta_k });
        }
        Ok(())
    }
}

/// `sinh(gL)/g` continued to `sin(|g|L)/|g|` for `g² < 0`, with a series
/// near `g = 0`.
pub fn sinh_ratio(g2: f64, length: f64) -> f64 {
    let g = libm::sqrt(g2.abs());
    let x = g * length;
    if x < 1e-6 {
        return length * (1.0 + g2 * length * length / 6.0);
    }
    if g2 > 0.0 {
        libm::sinh(x) / g
    } else {
        libm::sin(x) / g
    }
}

/// Parametric gain `G = 1 + Γ²(sinh(gL)/g)²` and output intensity ratios.
pub fn parametric_gain(p: &GainParams) -> Result<GainReport> {
    p.validate()?;
    let gamma2 = p.gamma2()?;
    let g2 = gamma2 - p.delta_k * p.delta_k / 4.0;
    let r = sinh_ratio(g2, p.length);
    let amp = gamma2 * r * r;
    let gain = 1.0 + amp;
    let i2_ratio = (p.omega1 > 0.0).then(|| p.omega2 / p.omega1 * amp);
    Ok(GainReport { gamma2, g2, g_abs: libm::sqrt(g2.abs()), gain, i1_ratio: gain, i2_ratio })
}

/// Optimal `N → M` universal cloner fidelity `(NM + N + M)/(M(N + 2))`.
pub fn cloner_fidelity(n: u64, m: u64) -> Result<f64> {
    if n < 1 || n > m {
        return Err(Error::OutOfRange { what: "cloner copies (need 1 <= N <= M)", value: n as f64 });
    }
    let (n, m) = (n as f64, m as f64);
    Ok((n * m + n + m) / (m * (n + 2.0)))
}

/// `M → ∞` limit of [`cloner_fidelity`], `(N + 1)/(N + 2)`.
pub fn cloner_limit(n: u64) -> Result<f64> {
    if n < 1 {
        return Err(Error::OutOfRange { what: "cloner inputs", value: 0.0 });
    }
    let n = n as f64;
    Ok((n + 1.0) / (n + 2.0))
}

/// Controller polarisation label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarisation {
    /// Vertical, the controller's initial and reset state (index 0).
    V,
    /// Horizontal (index 1).
    H,
}

impl Polarisation {
    /// Single-letter label.
    pub fn name(&self) -> &'static str {
        match self {
            Self::V => "V",
            Self::H => "H",
        }
    }
}

/// One pulse of a [`PulseTrain`].
#[derive(Clone, Debug, PartialEq)]
pub struct Pulse {
    /// Delay `m·τ`.
    pub delay: f64,
    /// Controller polarisation.
    pub controller: Polarisation,
    /// System amplitudes.
    pub amplitudes: Vec<C64>,
}

/// Output of the time-bin (or OAM) ancilla engines: index `m` to pulse.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseTrain {
    /// Pulses by index.
    pub bins: BTreeMap<u64, Pulse>,
    /// Round-trip time.
    pub tau: f64,
    /// Iterations completed.
    pub n: usize,
}

impl PulseTrain {
    /// `Σ_m ‖amplitudes_m‖²`.
    pub fn total_norm2(&self) -> f64 {
        self.bins.values().map(|p| norm2(&p.amplitudes)).sum()
    }

    /// `Σ_m |⟨T|a_m⟩|² / Σ_m ‖a_m‖²`.
    pub fn fidelity(&self, target: &PureState) -> f64 {
        let num: f64 = self.bins.values().map(|p| target.overlap(&p.amplitudes).norm_sqr()).sum();
        num / self.total_norm2()
    }

    /// System state with the ancilla index traced out, `Σ_m |a_m⟩⟨a_m|`
    /// (unnormalized when losses occurred).
    pub fn reduced_matrix(&self) -> ComplexMatrix {
        let d = self.bins.values().next().map_or(0, |p| p.amplitudes.len());
        let mut rho = ComplexMatrix::zeros(d, d);
        for p in self.bins.values() {
            rho = &rho + &crate::linalg::outer(&p.amplitudes, &p.amplitudes);
        }
        rho.hermitian_part()
    }

    /// [`PulseTrain::reduced_matrix`] normalized to unit trace.
    pub fn reduced_density(&self) -> Result<DensityMatrix> {
        let t = self.total_norm2();
        if t < FILTER_FLOOR {
            return Err(Error::FilteredToZero);
        }
        DensityMatrix::new(self.reduced_matrix().scale_re(1.0 / t))
    }
}

fn require_iterations(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::OutOfRange { what: "iteration count", value: n as f64 });
    }
    Ok(())
}

fn check_pair(kraus: &KrausSet, psi0: &PureState) -> Result<()> {
    if kraus.len() != 2 {
        return Err(Error::DimensionMismatch { context: "ancilla engine", expected: 2, found: kraus.len() });
    }
    if kraus.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch { context: "ancilla engine", expected: kraus.dim(), found: psi0.dim() });
    }
    Ok(())
}

/// Time-bin ancilla engine at the Kraus level. Bin `m = Σ_j b_j 2^{j−1}`
/// holds `K_{b_N}⋯K_{b_1}|ψ0⟩` at delay `mτ`; every controller is reset to
/// `V` after each iteration, including the last.
pub fn timebin_run(kraus: &KrausSet, psi0: &PureState, n: usize, tau: f64) -> Result<PulseTrain> {
    check_pair(kraus, psi0)?;
    require_iterations(n, 62)?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::OutOfRange { what: "round-trip time tau", value: tau });
    }
    let ops = kraus.operators();
    let mut bins: BTreeMap<u64, Vec<C64>> = BTreeMap::new();
    bins.insert(0, psi0.amplitudes().to_vec());
    for j in 1..=n {
        let shift = 1u64 << (j - 1);
        let mut next = BTreeMap::new();
        for (m, v) in &bins {
            next.insert(*m, ops[0].apply(v));
            next.insert(m + shift, ops[1].apply(v));
        }
        bins = next;
    }
    Ok(train(bins, tau, n))
}

fn train(bins: BTreeMap<u64, Vec<C64>>, tau: f64, n: usize) -> PulseTrain {
    let bins = bins
        .into_iter()
        .map(|(m, amplitudes)| (m, Pulse { delay: m as f64 * tau, controller: Polarisation::V, amplitudes }))
        .collect();
    PulseTrain { bins, tau, n }
}

/// Device-level time-bin simulation from the coupling unitary
/// (controller ⊗ system, controller index 0 = `V`).
///
/// Per iteration `j`: couple, split on a PBS, send the `H` arm round the
/// delay loop `2^{j−1}` times (EOM1 gating), recombine, then flip
/// polarisation on the freshly delayed pulses (EOM2). The loop fails if any
/// `H` amplitude survives the reset.
pub fn timebin_device(coupling: &ComplexMatrix, psi0: &PureState, n: usize, tau: f64) -> Result<PulseTrain> {
    let d = psi0.dim();
    coupling.require_unitary(Some(2 * d), "coupling unitary", crate::NORM_TOL)?;
    require_iterations(n, 62)?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::OutOfRange { what: "round-trip time tau", value: tau });
    }
    // Each bin holds the joint controller ⊗ system vector.
    let mut bins: BTreeMap<u64, Vec<C64>> = BTreeMap::new();
    let mut joint = vec![c(0.0, 0.0); 2 * d];
    joint[..d].copy_from_slice(psi0.amplitudes());
    bins.insert(0, joint);
    for j in 1..=n {
        let round_trips = 1u64 << (j - 1);
        let mut next: BTreeMap<u64, Vec<C64>> = BTreeMap::new();
        for (m, v) in &bins {
            let out = coupling.apply(v);
            let (v_arm, h_arm) = out.split_at(d);
            let mut stay = vec![c(0.0, 0.0); 2 * d];
            stay[..d].copy_from_slice(v_arm);
            let mut delayed = vec![c(0.0, 0.0); 2 * d];
            delayed[d..].copy_from_slice(h_arm);
            next.insert(*m, stay);
            next.insert(m + round_trips, delayed);
        }
        for (m, v) in next.iter_mut() {
            if *m >= round_trips {
                let (lo, hi) = v.split_at_mut(d);
                lo.swap_with_slice(hi);
            }
        }
        bins = next;
    }
    let mut sys = BTreeMap::new();
    for (m, v) in bins {
        let h = vnorm(&v[d..]);
        if h > 1e-12 {
            return Err(Error::OutOfRange { what: "residual H amplitude after reset", value: h });
        }
        sys.insert(m, v[..d].to_vec());
    }
    Ok(train(sys, tau, n))
}

/// `T_N(a) = Σ_n a_n 2ⁿ τ` with `a_n` indexed from 1.
pub fn timebin_delay(bits: &[bool], tau: f64) -> f64 {
    bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| libm::ldexp(tau, i as i32 + 1)).sum()
}

/// Intensity efficiencies of OAM doubling, by the value being doubled.
#[derive(Clone, Debug, PartialEq)]
pub struct EfficiencyTable {
    entries: BTreeMap<u64, f64>,
    extrapolate: bool,
    ideal: bool,
}

impl Default for EfficiencyTable {
    /// 0.97, 0.93 and 0.86 for doubling 1, 2 and 3; no extrapolation.
    fn default() -> Self {
        Self::new([(1, 0.97), (2, 0.93), (3, 0.86)].into_iter().collect(), false).expect("valid table")
    }
}

impl EfficiencyTable {
    /// Table from intensity efficiencies in `[0, 1]`.
    pub fn new(entries: BTreeMap<u64, f64>, extrapolate: bool) -> Result<Self> {
        for (&l, &e) in &entries {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::OutOfRange { what: "doubling efficiency", value: e });
            }
            if l == 0 {
                return Err(Error::OutOfRange { what: "doubling efficiency key", value: 0.0 });
            }
        }
        if extrapolate && entries.len() < 2 {
            return Err(Error::OutOfRange { what: "table size for extrapolation", value: entries.len() as f64 });
        }
        Ok(Self { entries, extrapolate, ideal: false })
    }

    /// Lossless doubling for every value.
    pub fn ideal() -> Self {
        Self { entries: BTreeMap::new(), extrapolate: false, ideal: true }
    }

    /// Same entries with extrapolation switched on or off.
    pub fn with_extrapolation(mut self, on: bool) -> Result<Self> {
        if on && self.entries.len() < 2 && !self.ideal {
            return Err(Error::OutOfRange { what: "table size for extrapolation", value: self.entries.len() as f64 });
        }
        self.extrapolate = on;
        Ok(self)
    }

    /// Tabulated entries.
    pub fn entries(&self) -> &BTreeMap<u64, f64> {
        &self.entries
    }

    /// Intensity efficiency of doubling value `l`; doubling 0 is free.
    /// Past the table the last two entries are extended linearly (clamped
    /// to `[0, 1]`) when enabled.
    pub fn intensity(&self, l: u64) -> Result<f64> {
        if l == 0 || self.ideal {
            return Ok(1.0);
        }
        if let Some(&e) = self.entries.get(&l) {
            return Ok(e);
        }
        if !self.extrapolate {
            return Err(Error::EfficiencyMissing(l));
        }
        let below: Vec<(u64, f64)> = self.entries.range(..l).map(|(k, v)| (*k, *v)).collect();
        let above: Vec<(u64, f64)> = self.entries.range(l..).map(|(k, v)| (*k, *v)).collect();
        let (p, q) = match (below.len(), above.len()) {
            (n, m) if n >= 1 && m >= 1 => (below[n - 1], above[0]),
            (n, _) if n >= 2 => (below[n - 2], below[n - 1]),
            (_, m) if m >= 2 => (above[0], above[1]),
            _ => return Err(Error::EfficiencyMissing(l)),
        };
        let slope = (q.1 - p.1) / (q.0 as f64 - p.0 as f64);
        Ok((p.1 + slope * (l as f64 - p.0 as f64)).clamp(0.0, 1.0))
    }

    /// Amplitude factor `√intensity`.
    pub fn amplitude(&self, l: u64) -> Result<f64> {
        Ok(libm::sqrt(self.intensity(l)?))
    }
}

/// Output of [`oam_run`].
#[derive(Clone, Debug, PartialEq)]
pub struct OamRun {
    /// OAM value to system amplitudes.
    pub modes: BTreeMap<u64, Vec<C64>>,
    /// Surviving intensity `Σ_m ‖a_m‖²`.
    pub norm2: f64,
    /// Iterations completed.
    pub n: usize,
}

impl OamRun {
    /// Same data as a pulse train indexed by OAM value (delay 0).
    pub fn as_train(&self) -> PulseTrain {
        let bins = self
            .modes
            .iter()
            .map(|(m, a)| (*m, Pulse { delay: 0.0, controller: Polarisation::V, amplitudes: a.clone() }))
            .collect();
        PulseTrain { bins, tau: 0.0, n: self.n }
    }
}

/// OAM ancilla engine. Per iteration: double the OAM values written so far
/// (each doubling of `l` scaled by the table's amplitude factor), couple,
/// add one quantum of OAM on the `K1` branch and reset polarisation on the
/// odd modes. OAM value `m = Σ_j b_j 2^{N−j}` holds `K_{b_N}⋯K_{b_1}|ψ0⟩`.
pub fn oam_run(kraus: &KrausSet, psi0: &PureState, n: usize, table: &EfficiencyTable) -> Result<OamRun> {
    check_pair(kraus, psi0)?;
    require_iterations(n, 62)?;
    let ops = kraus.operators();
    let mut modes: BTreeMap<u64, Vec<C64>> = BTreeMap::new();
    modes.insert(0, psi0.amplitudes().to_vec());
    for j in 1..=n {
        let mut next = BTreeMap::new();
        for (m, v) in &modes {
            let (base, scaled) = if j == 1 {
                (*m, v.clone())
            } else {
                let f = table.amplitude(*m)?;
                (2 * m, v.iter().map(|z| z * f).collect())
            };
            next.insert(base, ops[0].apply(&scaled));
            next.insert(base + 1, ops[1].apply(&scaled));
        }
        modes = next;
    }
    let norm2 = modes.values().map(|v| norm2(v)).sum();
    Ok(OamRun { modes, norm2, n })
}
