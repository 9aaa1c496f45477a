//! JSON reports and CSV tables written by the command-line tool.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::config::FlatConfig;
use crate::error::{Error, Result};
use crate::pipeline::{AmplitudeSweepPoint, AnalysisSettings, GainSensitivityRow, GainStudyMethod, MeasurementResult};
use crate::spectral::Spectrum;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Settings a report was produced with.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ReportConfig {
    Experiment(FlatConfig),
    Analysis(AnalysisSettings),
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportFiles {
    pub hot_psd_csv: Option<String>,
    pub cold_psd_csv: Option<String>,
    pub hot_capture: Option<String>,
    pub cold_capture: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub timestamp_unix_s: u64,
    pub config: ReportConfig,
    /// Noise figure the simulated device was built with.
    pub nominal_nf_db: Option<f64>,
    /// Y factor an error-free measurement of that device would give.
    pub ideal_y: Option<f64>,
    pub result: MeasurementResult,
    pub files: ReportFiles,
}

impl ReportDocument {
    pub fn new(command: &'static str, config: ReportConfig, result: MeasurementResult) -> Self {
        let timestamp_unix_s = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            tool: TOOL,
            version: VERSION,
            command,
            timestamp_unix_s,
            config,
            nominal_nf_db: None,
            ideal_y: None,
            result,
            files: ReportFiles::default(),
        }
    }

    /// Pretty JSON; floats are written in shortest round-trip form, so every
    /// value reads back bit-exact.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `freq_hz,psd` table of a spectrum.
pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::with_capacity(32 * s.len());
    out.push_str("freq_hz,psd\n");
    for (f, p) in s.freq_hz().iter().zip(s.psd()) {
        let _ = writeln!(out, "{f},{p:e}");
    }
    out
}

pub fn amplitude_sweep_csv(points: &[AmplitudeSweepPoint]) -> String {
    let mut out = String::from("ref_amplitude_fraction,mean_ratio_error,std_ratio_error,n_ok,n_failed\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            p.fraction, p.mean_error, p.std_error, p.n_ok, p.n_failed
        );
    }
    out
}

pub fn th_error_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("th_rel_error,delta_nf_db\n");
    for (e, d) in rows {
        let _ = writeln!(out, "{e},{d}");
    }
    out
}

pub fn gain_csv(rows: &[GainSensitivityRow]) -> String {
    let mut out = String::from("method,gain_ratio,nf_bias_db\n");
    for r in rows {
        let method = match r.method {
            GainStudyMethod::Direct => "direct",
            GainStudyMethod::YFactor => "y_factor",
        };
        let _ = writeln!(out, "{method},{},{}", r.gain_ratio, r.nf_bias_db);
    }
    out
}
