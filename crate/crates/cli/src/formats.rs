//! Text formats: complex numbers and vectors, unitary files, netlists and
//! efficiency tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use cohfeed_core::linalg::c;
use cohfeed_core::optics::{Arm, OpticalCircuit, OpticalElement, Platform};
use cohfeed_core::reset::EfficiencyTable;
use cohfeed_core::{ComplexMatrix, C64};

use crate::InputError;

/// Parses a real number, rejecting non-finite values.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("invalid number `{s}`"))?;
    if !v.is_finite() {
        return Err(format!("non-finite number `{s}`"));
    }
    Ok(v)
}

/// Parses `re+imi`, `re-imi`, `re` or `imi`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t = s.trim();
    let bad = || format!("invalid complex number `{s}`");
    let Some(body) = t.strip_suffix('i') else {
        return parse_real(t).map(|re| c(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split =
        (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let im_of = |x: &str| -> Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => parse_real(x).map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => Ok(c(parse_real(&body[..k]).map_err(|_| bad())?, im_of(&body[k..])?)),
        None => Ok(c(0.0, im_of(body)?)),
    }
}

/// Formats as `re+imi` / `re-imi` with shortest round-trip digits.
pub fn format_complex(z: C64) -> String {
    if z.im.is_sign_negative() {
        format!("{:?}-{:?}i", z.re, -z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

/// Parses a comma-separated complex vector.
pub fn parse_complex_vec(s: &str) -> Result<Vec<C64>, String> {
    s.split(',').map(parse_complex).collect()
}

/// Formats a complex vector, comma separated.
pub fn format_complex_vec(v: &[C64]) -> String {
    v.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(",")
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Reads a unitary file: `dim=N`, then `N²` row-major `re im` pairs.
pub fn parse_unitary(text: &str) -> Result<ComplexMatrix, InputError> {
    let mut dim = None;
    let mut nums: Vec<(usize, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if dim.is_none() {
            let v = line
                .strip_prefix("dim")
                .map(str::trim_start)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| InputError::at(i + 1, "expected header `dim=N`"))?;
            let d: usize =
                v.trim().parse().map_err(|_| InputError::at(i + 1, format!("invalid dimension `{}`", v.trim())))?;
            if d == 0 {
                return Err(InputError::at(i + 1, "dimension must be positive"));
            }
            dim = Some(d);
            continue;
        }
        for tok in line.split_whitespace() {
            nums.push((i + 1, parse_real(tok).map_err(|e| InputError::at(i + 1, e))?));
        }
    }
    let d = dim.ok_or_else(|| InputError::new("missing header `dim=N`"))?;
    if nums.len() != 2 * d * d {
        let line = nums.last().map(|n| n.0);
        let msg = format!("expected {} numbers for dim={d}, found {}", 2 * d * d, nums.len());
        return Err(InputError { file: None, line, message: msg });
    }
    let data = nums.chunks(2).map(|p| c(p[0].1, p[1].1)).collect();
    ComplexMatrix::from_vec(d, d, data).map_err(|e| InputError::new(e.to_string()))
}

/// Writes a unitary file, one matrix row per line.
pub fn format_unitary(m: &ComplexMatrix) -> String {
    let mut s = format!("dim={}\n", m.rows());
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format!("{:?} {:?}", m[(r, j)].re, m[(r, j)].im)).collect();
        s.push_str(&row.join("  "));
        s.push('\n');
    }
    s
}

fn significant_digits(s: &str) -> usize {
    s.bytes().filter(u8::is_ascii_digit).skip_while(|&b| b == b'0').count()
}

fn pad_sig6(d: f64) -> String {
    if d == 0.0 {
        return "0.00000".to_string();
    }
    let mut s = format!("{d}");
    let have = significant_digits(&s);
    if have < 6 {
        if !s.contains('.') {
            s.push('.');
        }
        s.extend(std::iter::repeat_n('0', 6 - have));
    }
    s
}

/// Angle token for a netlist: degrees with at least six significant digits
/// that convert back to exactly `rad`, or `rad=<value>` when no such decimal
/// exists among the neighbours of the nearest degree value.
pub fn format_angle(rad: f64) -> String {
    let d0 = rad.to_degrees();
    let mut lo = d0;
    let mut hi = d0;
    let mut candidates = vec![d0];
    for _ in 0..16 {
        lo = lo.next_down();
        hi = hi.next_up();
        candidates.push(hi);
        candidates.push(lo);
    }
    for d in candidates {
        let s = pad_sig6(d);
        if s.parse::<f64>().map(f64::to_radians) == Ok(rad) {
            return s;
        }
    }
    format!("rad={rad:?}")
}

/// Parses an angle token written by [`format_angle`] (or plain degrees).
pub fn parse_angle(tok: &str) -> Result<f64, String> {
    match tok.strip_prefix("rad=") {
        Some(r) => parse_real(r),
        None => parse_real(tok).map(f64::to_radians),
    }
}

fn element_params(e: &OpticalElement) -> Option<String> {
    match *e {
        OpticalElement::Spiral(d) => Some(d.to_string()),
        OpticalElement::Eom(on) => Some(if on { "on" } else { "off" }.to_string()),
        _ => e.angle().map(format_angle),
    }
}

/// Writes a netlist. Arm tags are written for the path/polarisation platform.
pub fn format_netlist(circ: &OpticalCircuit) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "PLATFORM {}", circ.platform());
    for p in circ.elements() {
        s.push_str(p.element.name());
        if let Some(v) = element_params(&p.element) {
            s.push(' ');
            s.push_str(&v);
        }
        if circ.platform() == Platform::PathPol {
            s.push_str(" arm=");
            s.push_str(p.arm.name());
        }
        s.push('\n');
    }
    s
}

fn parse_platform(rest: &str, line: usize) -> Result<Platform, InputError> {
    let toks: Vec<&str> = rest.split_whitespace().collect();
    match toks.as_slice() {
        ["PATH_POL"] => Ok(Platform::PathPol),
        ["POL_OAM", l] => {
            let v = l.strip_prefix("l=").ok_or_else(|| InputError::at(line, "expected `l=<ell>` after POL_OAM"))?;
            let ell: i32 = v.parse().map_err(|_| InputError::at(line, format!("invalid OAM value `{v}`")))?;
            if ell == 0 {
                return Err(InputError::at(line, "OAM value must be nonzero"));
            }
            Ok(Platform::PolOam { ell })
        }
        _ => Err(InputError::at(line, format!("unknown platform `{}`", rest.trim()))),
    }
}

fn parse_arm(v: &str) -> Option<Arm> {
    match v {
        "both" => Some(Arm::Both),
        "upper" => Some(Arm::Upper),
        "lower" => Some(Arm::Lower),
        _ => None,
    }
}

fn parse_element(name: &str, param: Option<&str>, line: usize) -> Result<OpticalElement, InputError> {
    let angle = || -> Result<f64, InputError> {
        let p = param.ok_or_else(|| InputError::at(line, format!("{name} needs an angle")))?;
        parse_angle(p).map_err(|e| InputError::at(line, e))
    };
    let none = |e: OpticalElement| -> Result<OpticalElement, InputError> {
        match param {
            None => Ok(e),
            Some(p) => Err(InputError::at(line, format!("{name} takes no parameter, found `{p}`"))),
        }
    };
    Ok(match name {
        "HWP" => OpticalElement::Hwp(angle()?),
        "QWP" => OpticalElement::Qwp(angle()?),
        "POL_PHASE" => OpticalElement::PolPhase(angle()?),
        "OAM_PHASE" => OpticalElement::OamPhase(angle()?),
        "PSDP" => OpticalElement::Psdp(angle()?),
        "DOVE" => OpticalElement::Dove(angle()?),
        "MODE_CONV_PI" => OpticalElement::ModeConvPi(angle()?),
        "MODE_CONV_PI2" => OpticalElement::ModeConvPi2(angle()?),
        "ARM_PHASE" => OpticalElement::ArmPhase(angle()?),
        "BS" => none(OpticalElement::Bs)?,
        "PBS" => none(OpticalElement::Pbs)?,
        "MODE_SORTER_PARITY" => none(OpticalElement::ModeSorterParity)?,
        "SPIRAL" => {
            let p = param.ok_or_else(|| InputError::at(line, "SPIRAL needs an integer charge"))?;
            OpticalElement::Spiral(p.parse().map_err(|_| InputError::at(line, format!("invalid charge `{p}`")))?)
        }
        "EOM" => match param {
            Some("on") => OpticalElement::Eom(true),
            Some("off") => OpticalElement::Eom(false),
            _ => return Err(InputError::at(line, "EOM needs `on` or `off`")),
        },
        _ => return Err(InputError::at(line, format!("unknown element `{name}`"))),
    })
}

/// Reads a netlist written by [`format_netlist`] (comments `#` allowed).
pub fn parse_netlist(text: &str) -> Result<OpticalCircuit, InputError> {
    let mut circ: Option<OpticalCircuit> = None;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let Some(c) = circ.as_mut() else {
            let rest =
                line.strip_prefix("PLATFORM").ok_or_else(|| InputError::at(n, "expected header `PLATFORM <name>`"))?;
            let p = parse_platform(rest, n)?;
            circ = Some(OpticalCircuit::new(p).map_err(|e| InputError::at(n, e.to_string()))?);
            continue;
        };
        let mut toks = line.split_whitespace();
        let name = toks.next().expect("nonempty line");
        let mut param = None;
        let mut arm = Arm::Both;
        for t in toks {
            if let Some(a) = t.strip_prefix("arm=") {
                arm = parse_arm(a).ok_or_else(|| InputError::at(n, format!("unknown arm `{a}`")))?;
            } else if param.is_none() {
                param = Some(t);
            } else {
                return Err(InputError::at(n, format!("unexpected token `{t}`")));
            }
        }
        let e = parse_element(name, param, n)?;
        c.push_on(e, arm).map_err(|e| InputError::at(n, e.to_string()))?;
    }
    circ.ok_or_else(|| InputError::new("empty netlist"))
}

/// Reads an efficiency table: lines `l eff` or `l=eff`, intensity
/// efficiencies in `[0, 1]`.
pub fn parse_efficiency(text: &str, extrapolate: bool) -> Result<EfficiencyTable, InputError> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .or_else(|| line.split_once(char::is_whitespace))
            .ok_or_else(|| InputError::at(i + 1, "expected `l eff`"))?;
        let l: u64 =
            k.trim().parse().map_err(|_| InputError::at(i + 1, format!("invalid OAM value `{}`", k.trim())))?;
        let e = parse_real(v).map_err(|e| InputError::at(i + 1, e))?;
        if entries.insert(l, e).is_some() {
            return Err(InputError::at(i + 1, format!("duplicate entry for l={l}")));
        }
    }
    EfficiencyTable::new(entries, extrapolate).map_err(|e| InputError::new(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.25+0i").unwrap(), c(0.25, 0.0));
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("-2.5e-3-4e+2i").unwrap(), c(-2.5e-3, -400.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("3i").unwrap(), c(0.0, 3.0));
        assert!(parse_complex("1+2j").is_err());
        for z in [c(1.0, -0.0), c(-0.1, 1e-300), c(3.0, -2.0)] {
            let back = parse_complex(&format_complex(z)).unwrap();
            assert_eq!(back.re.to_bits(), z.re.to_bits());
            assert_eq!(back.im.to_bits(), z.im.to_bits());
        }
    }

    #[test]
    fn angle_tokens() {
        assert_eq!(format_angle(std::f64::consts::FRAC_PI_4), "45.0000");
        assert_eq!(format_angle(std::f64::consts::FRAC_PI_8), "22.5000");
        for x in [0.0, 1e-9, 0.1, 1.0, 2.5, 6.0] {
            assert_eq!(parse_angle(&format_angle(x)).unwrap(), x);
        }
    }
}
