//! On-disk formats: the spectrum file written by `quantize` and the
//! verification report written by `verify`.
//!
//! Floats go through serde_json, which prints the shortest decimal that reads
//! back to the same binary64 value; with `float_roundtrip` the reader is exact
//! too, so a save/load cycle is bit-exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::product::{EntireProduct, ZeroTail};
use crate::rotation::RotationParams;
use crate::specfun::{Clause, PropositionReport, RayClassification};

pub const SCHEMA_VERSION: u32 = 1;

pub const SIGN_CONVENTION: &str = "levels and zeros of C, D are stored in the internal variable s = -lambda, \
where lambda is the spectral parameter of y'' = (z^m + lambda) y; PT eigenvalues are positive in lambda";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub command_line: Vec<String>,
    /// RFC 3339, UTC.
    pub timestamp: String,
}

impl Provenance {
    pub fn now(command_line: Vec<String>) -> Self {
        Self {
            command_line,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRecord {
    pub amplitude: f64,
    pub exponent: f64,
    pub shift: f64,
    pub start_index: usize,
}

impl From<&ZeroTail> for TailRecord {
    fn from(t: &ZeroTail) -> Self {
        Self {
            amplitude: t.amplitude,
            exponent: t.exponent,
            shift: t.index_shift,
            start_index: t.start_index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub schema_version: u32,
    pub alpha: f64,
    pub phase_offset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    pub levels: Vec<f64>,
    pub tail: Option<TailRecord>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub provenance: Provenance,
}

impl SpectrumFile {
    pub fn rotation(&self) -> Result<RotationParams, CliError> {
        RotationParams::new(self.alpha, self.phase_offset).map_err(|e| CliError::Malformed(e.to_string()))
    }

    pub fn product(&self) -> Result<EntireProduct, CliError> {
        let tail = match &self.tail {
            Some(t) => Some(
                ZeroTail::new(t.amplitude, t.exponent, t.shift, t.start_index)
                    .map_err(|e| CliError::Malformed(format!("tail: {e}")))?,
            ),
            None => None,
        };
        EntireProduct::new(self.levels.clone(), tail).map_err(|e| CliError::Malformed(format!("levels: {e}")))
    }

    fn check(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Malformed(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("unsupported schema version {}", self.schema_version));
        }
        if self.levels.is_empty() {
            return bad("no levels".into());
        }
        if let Some(i) = self.levels.windows(2).position(|w| !(w[0] < w[1])) {
            return bad(format!("levels not strictly increasing at index {}", i + 2));
        }
        if !(self.levels[0] > 0.0) || !self.levels.iter().all(|v| v.is_finite()) {
            return bad("levels must be positive and finite".into());
        }
        if !(self.residual >= 0.0) {
            return bad(format!("negative residual {}", self.residual));
        }
        self.rotation()?;
        self.product()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Numeric(e.to_string()))?;
        fs::write(path, text + "\n").map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
        let file: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
        file.check()?;
        Ok(file)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub radius: f64,
    pub zeros: Vec<RayClassification>,
    pub one_points: Vec<RayClassification>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub input: String,
    pub sign_convention: String,
    pub provenance: Provenance,
    pub window_radius: f64,
    /// Seed of the random points used for the identity checks.
    pub sample_seed: u64,
    pub clauses: Vec<Clause>,
    pub proposition: PropositionReport,
    pub witness: Option<WitnessSummary>,
    pub verdict: bool,
}

impl VerificationReport {
    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Numeric(e.to_string()))?;
        fs::write(path, text + "\n").map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
    }
}
