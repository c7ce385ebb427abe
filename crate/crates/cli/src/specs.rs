//! Text grammar for states and couplers.
//!
//! States: `fock:<n>`, `coherent:<re>,<im>` or `amps:<re>,<im>;<re>,<im>;...`
//! (Fock amplitudes from `|0>` upwards).
//!
//! Couplers: `trp:<Tre>,<Tim>,<Rre>,<Rim>,<Pre>,<Pim>`,
//! `angles:<p0>,<p1>,<p2>,<p3>` or `gain:<R2>` (amplifier with real
//! `T = sqrt(1 + R2)`, `R = sqrt(R2)`, `P = 1`).

use condeng::conditional::PolynomialState;
use condeng::couplers::params_from_angles;
use condeng::{CouplerAngles, CouplerKind, CouplerParams, FockVector, C64};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Fock(usize),
    Coherent(C64),
    Amps(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplerSpec {
    pub params: CouplerParams,
    pub angles: Option<CouplerAngles>,
}

fn floats(body: &str, what: &str) -> Result<Vec<f64>> {
    body.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::config(format!("{what}: '{t}' is not a finite number")))
        })
        .collect()
}

fn exactly<const N: usize>(body: &str, what: &str) -> Result<[f64; N]> {
    let v = floats(body, what)?;
    v.try_into()
        .map_err(|v: Vec<f64>| CliError::config(format!("{what}: expected {N} numbers, got {}", v.len())))
}

pub fn parse_kind(s: &str) -> Result<CouplerKind> {
    match s.trim() {
        "amplifier" => Ok(CouplerKind::Amplifier),
        "converter" => Ok(CouplerKind::Converter),
        other => Err(CliError::config(format!(
            "coupler kind '{other}' is not 'amplifier' or 'converter'"
        ))),
    }
}

pub fn parse_state(s: &str) -> Result<StateSpec> {
    let (tag, body) = s
        .split_once(':')
        .ok_or_else(|| CliError::config(format!("state spec '{s}' has no 'tag:' prefix")))?;
    match tag.trim() {
        "fock" => body
            .trim()
            .parse()
            .map(StateSpec::Fock)
            .map_err(|_| CliError::config(format!("fock: '{body}' is not a photon number"))),
        "coherent" => {
            let [re, im] = exactly::<2>(body, "coherent")?;
            Ok(StateSpec::Coherent(C64::new(re, im)))
        }
        "amps" => {
            let amps = body
                .split(';')
                .map(|pair| exactly::<2>(pair, "amps").map(|[re, im]| C64::new(re, im)))
                .collect::<Result<Vec<_>>>()?;
            if amps.iter().all(|a| a.norm() == 0.0) {
                return Err(CliError::config("amps: all amplitudes are zero"));
            }
            Ok(StateSpec::Amps(amps))
        }
        other => Err(CliError::config(format!("unknown state tag '{other}'"))),
    }
}

impl StateSpec {
    /// Idler polynomial; coherent states are expanded up to `cutoff`.
    pub fn polynomial(&self, cutoff: usize) -> Result<PolynomialState> {
        match self {
            StateSpec::Fock(n) => Ok(PolynomialState::fock(*n)),
            StateSpec::Coherent(a) => Ok(PolynomialState::coherent(*a, cutoff)?),
            StateSpec::Amps(v) => Ok(PolynomialState::from_ket(&FockVector::normalized(v.clone())?)),
        }
    }

    /// Normalized ket on `0..cutoff`; fails if amplitudes would be cut off.
    pub fn ket(&self, cutoff: usize) -> Result<FockVector> {
        match self {
            StateSpec::Fock(n) if *n < cutoff => Ok(FockVector::fock(*n, cutoff)),
            StateSpec::Fock(n) => Err(CliError::config(format!("fock:{n} does not fit cutoff {cutoff}"))),
            StateSpec::Coherent(a) => Ok(FockVector::coherent(*a, cutoff).normalize()?),
            StateSpec::Amps(v) if v.len() <= cutoff => {
                let mut amps = v.clone();
                amps.resize(cutoff, C64::new(0.0, 0.0));
                Ok(FockVector::normalized(amps)?)
            }
            StateSpec::Amps(v) => Err(CliError::config(format!(
                "{} amplitudes do not fit cutoff {cutoff}",
                v.len()
            ))),
        }
    }
}

/// Parses a coupler; `kind` is required for `trp:` and `angles:`.
pub fn parse_coupler(s: &str, kind: Option<CouplerKind>) -> Result<CouplerSpec> {
    let (tag, body) = s
        .split_once(':')
        .ok_or_else(|| CliError::config(format!("coupler spec '{s}' has no 'tag:' prefix")))?;
    let need_kind = || kind.ok_or_else(|| CliError::config(format!("coupler '{tag}:' needs a kind")));
    match tag.trim() {
        "trp" => {
            let [tr, ti, rr, ri, pr, pi] = exactly::<6>(body, "trp")?;
            let params = CouplerParams::new(need_kind()?, C64::new(tr, ti), C64::new(rr, ri), C64::new(pr, pi))?;
            Ok(CouplerSpec { params, angles: None })
        }
        "angles" => {
            let angles = CouplerAngles::new(need_kind()?, exactly::<4>(body, "angles")?);
            Ok(CouplerSpec {
                params: params_from_angles(&angles),
                angles: Some(angles),
            })
        }
        "gain" => {
            if kind == Some(CouplerKind::Converter) {
                return Err(CliError::config("gain: describes an amplifier, not a converter"));
            }
            let [r2] = exactly::<1>(body, "gain")?;
            Ok(CouplerSpec {
                params: CouplerParams::amplifier_with_gain(r2)?,
                angles: None,
            })
        }
        other => Err(CliError::config(format!("unknown coupler tag '{other}'"))),
    }
}
