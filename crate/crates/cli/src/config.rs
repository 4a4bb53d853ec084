//! Scenario configuration: one `key=value` per line, `#` comments.
//!
//! Unknown keys, repeated keys and malformed values are errors carrying the
//! line number. [`ScenarioConfig::print`] writes the keys that are set in a
//! fixed order, so printing a parsed file is idempotent.

use std::path::PathBuf;

use cohfeed_core::schemes::SchemeKind;
use cohfeed_core::C64;

use crate::formats::{format_complex_vec, parse_complex_vec, parse_real};
use crate::output::Format;
use crate::InputError;

/// A state given in a configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    /// Explicit amplitudes (normalized on use).
    Vector(Vec<C64>),
    /// `mixed:maximally`.
    MaximallyMixed,
    /// `random`: drawn from the seeded generator.
    Random,
}

impl StateSpec {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "mixed:maximally" => Ok(Self::MaximallyMixed),
            "random" => Ok(Self::Random),
            _ => parse_complex_vec(s).map(Self::Vector),
        }
    }

    fn print(&self) -> String {
        match self {
            Self::Vector(v) => format_complex_vec(v),
            Self::MaximallyMixed => "mixed:maximally".to_string(),
            Self::Random => "random".to_string(),
        }
    }
}

/// Controller reset strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResetKind {
    /// Trace-preserving iteration (fresh controller each time).
    None,
    /// Filtering onto `|+⟩`.
    Filter,
    /// Time-bin ancilla.
    Timebin,
    /// OAM ancilla.
    Oam,
}

impl ResetKind {
    fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Filter => "filter",
            Self::Timebin => "timebin",
            Self::Oam => "oam",
        }
    }
}

/// Platform selector (the OAM value comes from `ell`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlatformKind {
    /// Path controller, polarisation system.
    PathPol,
    /// Polarisation controller, OAM system.
    PolOam,
}

/// How scheme circuits are laid out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// Dedicated per-scheme element layouts.
    Scheme,
    /// Generic compilation of the CS factors.
    Cs,
}

/// All recognised keys in print order.
pub const KEYS: &[&str] = &[
    "scheme",
    "lambda",
    "alpha",
    "ell",
    "target",
    "initial",
    "n",
    "reset",
    "tau",
    "efficiency",
    "extrapolate",
    "device",
    "platform",
    "layout",
    "fix_phase",
    "unitary",
    "netlist",
    "seed",
    "out",
    "format",
    "d_eff",
    "omega1",
    "omega2",
    "k1",
    "k2",
    "a3",
    "delta_k",
    "length",
    "gamma",
];

/// Parsed configuration; unset keys are `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScenarioConfig {
    /// `scheme`.
    pub scheme: Option<SchemeKind>,
    /// `lambda`.
    pub lambda: Option<f64>,
    /// `alpha` (device angle, radians).
    pub alpha: Option<f64>,
    /// `ell`.
    pub ell: Option<i32>,
    /// `target`.
    pub target: Option<StateSpec>,
    /// `initial`.
    pub initial: Option<StateSpec>,
    /// `n`.
    pub n: Option<usize>,
    /// `reset`.
    pub reset: Option<ResetKind>,
    /// `tau`.
    pub tau: Option<f64>,
    /// `efficiency` table path.
    pub efficiency: Option<PathBuf>,
    /// `extrapolate`.
    pub extrapolate: Option<bool>,
    /// `device` (device-level time-bin simulation).
    pub device: Option<bool>,
    /// `platform`.
    pub platform: Option<PlatformKind>,
    /// `layout`.
    pub layout: Option<Layout>,
    /// `fix_phase` (basic layout controller-phase correction).
    pub fix_phase: Option<bool>,
    /// `unitary` file path.
    pub unitary: Option<PathBuf>,
    /// `netlist` file path.
    pub netlist: Option<PathBuf>,
    /// `seed`.
    pub seed: Option<u64>,
    /// `out` directory.
    pub out: Option<PathBuf>,
    /// `format`.
    pub format: Option<Format>,
    /// `d_eff` (m/V).
    pub d_eff: Option<f64>,
    /// `omega1` (rad/s).
    pub omega1: Option<f64>,
    /// `omega2` (rad/s).
    pub omega2: Option<f64>,
    /// `k1` (1/m).
    pub k1: Option<f64>,
    /// `k2` (1/m).
    pub k2: Option<f64>,
    /// `a3` pump amplitude (V/m).
    pub a3: Option<f64>,
    /// `delta_k` (1/m).
    pub delta_k: Option<f64>,
    /// `length` (m).
    pub length: Option<f64>,
    /// `gamma` (1/m), overrides the field expression.
    pub gamma: Option<f64>,
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected `true` or `false`, found `{s}`")),
    }
}

fn parse_int<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("invalid integer `{s}`"))
}

impl ScenarioConfig {
    /// Parses a configuration file's text.
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| InputError::at(i + 1, format!("expected `key=value`, found `{line}`")))?;
            let k = k.trim();
            if seen.contains(&k.to_string()) {
                return Err(InputError::at(i + 1, format!("duplicate key `{k}`")));
            }
            seen.push(k.to_string());
            cfg.set(k, v.trim()).map_err(|e| InputError::at(i + 1, e))?;
        }
        Ok(cfg)
    }

    /// Applies `key=value` overrides given on the command line.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<(), InputError> {
        for (i, o) in overrides.iter().enumerate() {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| InputError::new(format!("override {}: expected `key=value`, found `{o}`", i + 1)))?;
            self.set(k.trim(), v.trim()).map_err(|e| InputError::new(format!("override `{o}`: {e}")))?;
        }
        Ok(())
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        let real = || parse_real(v);
        match key {
            "scheme" => {
                self.scheme = Some(
                    SchemeKind::from_name(v)
                        .ok_or_else(|| format!("unknown scheme `{v}` (expected basic, weak_swap or target_dep)"))?,
                )
            }
            "lambda" => self.lambda = Some(real()?),
            "alpha" => self.alpha = Some(real()?),
            "ell" => self.ell = Some(parse_int(v)?),
            "target" => self.target = Some(StateSpec::parse(v)?),
            "initial" => self.initial = Some(StateSpec::parse(v)?),
            "n" => self.n = Some(parse_int(v)?),
            "reset" => {
                self.reset = Some(match v {
                    "none" => ResetKind::None,
                    "filter" => ResetKind::Filter,
                    "timebin" => ResetKind::Timebin,
                    "oam" => ResetKind::Oam,
                    _ => return Err(format!("unknown reset `{v}` (expected none, filter, timebin or oam)")),
                })
            }
            "tau" => self.tau = Some(real()?),
            "efficiency" => self.efficiency = Some(PathBuf::from(v)),
            "extrapolate" => self.extrapolate = Some(parse_bool(v)?),
            "device" => self.device = Some(parse_bool(v)?),
            "platform" => {
                self.platform = Some(match v {
                    "pol_oam" | "POL_OAM" => PlatformKind::PolOam,
                    "path_pol" | "PATH_POL" => PlatformKind::PathPol,
                    _ => return Err(format!("unknown platform `{v}` (expected pol_oam or path_pol)")),
                })
            }
            "layout" => {
                self.layout = Some(match v {
                    "scheme" => Layout::Scheme,
                    "cs" => Layout::Cs,
                    _ => return Err(format!("unknown layout `{v}` (expected scheme or cs)")),
                })
            }
            "fix_phase" => self.fix_phase = Some(parse_bool(v)?),
            "unitary" => self.unitary = Some(PathBuf::from(v)),
            "netlist" => self.netlist = Some(PathBuf::from(v)),
            "seed" => self.seed = Some(parse_int(v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "format" => {
                self.format = Some(match v {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(format!("unknown format `{v}` (expected csv or json)")),
                })
            }
            "d_eff" => self.d_eff = Some(real()?),
            "omega1" => self.omega1 = Some(real()?),
            "omega2" => self.omega2 = Some(real()?),
            "k1" => self.k1 = Some(real()?),
            "k2" => self.k2 = Some(real()?),
            "a3" => self.a3 = Some(real()?),
            "delta_k" => self.delta_k = Some(real()?),
            "length" => self.length = Some(real()?),
            "gamma" => self.gamma = Some(real()?),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Text value of a key, if set.
    pub fn get(&self, key: &str) -> Option<String> {
        let r = |x: Option<f64>| x.map(|v| format!("{v:?}"));
        let p = |x: &Option<PathBuf>| x.as_ref().map(|v| v.display().to_string());
        match key {
            "scheme" => self.scheme.map(|s| s.name().to_string()),
            "lambda" => r(self.lambda),
            "alpha" => r(self.alpha),
            "ell" => self.ell.map(|v| v.to_string()),
            "target" => self.target.as_ref().map(StateSpec::print),
            "initial" => self.initial.as_ref().map(StateSpec::print),
            "n" => self.n.map(|v| v.to_string()),
            "reset" => self.reset.map(|v| v.name().to_string()),
            "tau" => r(self.tau),
            "efficiency" => p(&self.efficiency),
            "extrapolate" => self.extrapolate.map(|v| v.to_string()),
            "device" => self.device.map(|v| v.to_string()),
            "platform" => self.platform.map(|v| match v {
                PlatformKind::PolOam => "pol_oam".to_string(),
                PlatformKind::PathPol => "path_pol".to_string(),
            }),
            "layout" => self.layout.map(|v| match v {
                Layout::Scheme => "scheme".to_string(),
                Layout::Cs => "cs".to_string(),
            }),
            "fix_phase" => self.fix_phase.map(|v| v.to_string()),
            "unitary" => p(&self.unitary),
            "netlist" => p(&self.netlist),
            "seed" => self.seed.map(|v| v.to_string()),
            "out" => p(&self.out),
            "format" => self.format.map(|v| v.ext().to_string()),
            "d_eff" => r(self.d_eff),
            "omega1" => r(self.omega1),
            "omega2" => r(self.omega2),
            "k1" => r(self.k1),
            "k2" => r(self.k2),
            "a3" => r(self.a3),
            "delta_k" => r(self.delta_k),
            "length" => r(self.length),
            "gamma" => r(self.gamma),
            _ => None,
        }
    }

    /// Canonical text form.
    pub fn print(&self) -> String {
        let mut s = String::new();
        for k in KEYS {
            if let Some(v) = self.get(k) {
                s.push_str(k);
                s.push('=');
                s.push_str(&v);
                s.push('\n');
            }
        }
        s
    }
}
