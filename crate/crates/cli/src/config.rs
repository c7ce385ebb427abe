//! Configuration file schema. Every table rejects unknown keys.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Kv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig4a,
    Fig4b,
    Fig4c,
    Fig4d,
}

impl Preset {
    /// `(eta_f, eta_d)` of the preset.
    pub fn efficiencies(self) -> (f64, f64) {
        match self {
            Preset::Fig4a => (1.0, 1.0),
            Preset::Fig4b => (0.999, 1.0),
            Preset::Fig4c => (1.0, 0.7),
            Preset::Fig4d => (0.999, 0.7),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub cutoff: Option<usize>,
    pub qubit_sweep: Option<SweepSection>,
    pub synthesize: Option<SynthesizeSection>,
    pub fock_run: Option<FockRunSection>,
    pub yop: Option<YopSection>,
    pub multiport_check: Option<MultiportSection>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub qmin: Option<f64>,
    pub qmax: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesizeSection {
    pub target: Option<String>,
    pub coupler: Option<String>,
    pub kind: Option<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockRunSection {
    pub preset: Option<Preset>,
    pub r2: Option<f64>,
    pub eta_d: Option<f64>,
    pub eta_f: Option<f64>,
    pub target_n: Option<usize>,
    pub trips: Option<Vec<usize>>,
    pub rows: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YopSection {
    pub coupler: Option<String>,
    pub kind: Option<String>,
    pub f: Option<String>,
    pub g: Option<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiportSection {
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub h_re: Option<Vec<Vec<f64>>>,
    pub h_im: Option<Vec<Vec<f64>>>,
    pub coupler: Option<String>,
    pub kind: Option<String>,
    pub draws: Option<usize>,
    pub seed: Option<u64>,
    pub max_modes: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::config(format!("config: {}", e.message())))
    }
}

/// Value from the command line, else from the config file, else an error.
pub fn required<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T> {
    flag.or(file).ok_or_else(|| CliError::config(format!("missing required value '{name}'")))
}
