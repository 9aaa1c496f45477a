//! Flat JSON experiment configuration.
//!
//! Every key maps onto one [`ExperimentConfig`] field. Unknown keys are
//! rejected and all problems are reported together. `t_hot_k`, `t_cold_k`
//! and `band` are required; the device may be given either by
//! `dut_added_noise_power` or by `dut_nf_db` (not both) and defaults to a
//! noiseless one.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::dut::{dut_from_nf, DutSpec};
use crate::error::{Error, Result};
use crate::pipeline::{Acquisition, ExperimentConfig};
use crate::sigmodel::NoiseSourceSpec;
use crate::spectral::Window;

/// Fully materialized configuration, as echoed in reports. Feeding it back
/// through [`parse_config`] reproduces the same [`ExperimentConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatConfig {
    pub t_hot_k: f64,
    pub t_cold_k: f64,
    pub t0_k: f64,
    pub power_scale: f64,
    pub dut_gain_linear: f64,
    pub dut_added_noise_power: f64,
    pub sample_rate_hz: f64,
    pub n_samples: usize,
    pub fft_size: usize,
    pub f_ref_hz: f64,
    pub ref_amplitude: f64,
    pub band: [f64; 2],
    pub ref_exclusion_halfwidth_bins: usize,
    pub post_dut_gain_linear: f64,
    pub seed: u64,
    pub window: Window,
    pub overlap_fraction: f64,
    pub acquisition: Acquisition,
    pub floor_correction: bool,
}

impl From<&ExperimentConfig> for FlatConfig {
    fn from(c: &ExperimentConfig) -> Self {
        Self {
            t_hot_k: c.source.t_hot_k(),
            t_cold_k: c.source.t_cold_k(),
            t0_k: c.source.t0_k(),
            power_scale: c.source.power_scale(),
            dut_gain_linear: c.dut.gain_linear(),
            dut_added_noise_power: c.dut.added_noise_power(),
            sample_rate_hz: c.sample_rate_hz,
            n_samples: c.n_samples,
            fft_size: c.fft_size,
            f_ref_hz: c.f_ref_hz,
            ref_amplitude: c.ref_amplitude,
            band: [c.band_hz.0, c.band_hz.1],
            ref_exclusion_halfwidth_bins: c.ref_exclusion_halfwidth_bins,
            post_dut_gain_linear: c.post_dut_gain_linear,
            seed: c.seed,
            window: c.window,
            overlap_fraction: c.overlap_fraction,
            acquisition: c.acquisition,
            floor_correction: c.floor_correction,
        }
    }
}

const KEYS: &[&str] = &[
    "t_hot_k",
    "t_cold_k",
    "t0_k",
    "power_scale",
    "dut_gain_linear",
    "dut_added_noise_power",
    "dut_nf_db",
    "sample_rate_hz",
    "n_samples",
    "fft_size",
    "f_ref_hz",
    "ref_amplitude",
    "band",
    "ref_exclusion_halfwidth_bins",
    "post_dut_gain_linear",
    "seed",
    "window",
    "overlap_fraction",
    "acquisition",
    "floor_correction",
];

struct Fields<'a> {
    map: &'a Map<String, Value>,
    errors: Vec<String>,
}

impl Fields<'_> {
    fn number(&mut self, key: &str, default: Option<f64>) -> f64 {
        match self.map.get(key) {
            None => default.unwrap_or_else(|| {
                self.errors.push(format!("{key}: required field missing"));
                f64::NAN
            }),
            Some(v) => v.as_f64().unwrap_or_else(|| {
                self.errors.push(format!("{key}: expected a number, got {v}"));
                f64::NAN
            }),
        }
    }

    fn optional_number(&mut self, key: &str) -> Option<f64> {
        self.map.contains_key(key).then(|| self.number(key, None))
    }

    fn count(&mut self, key: &str, default: u64) -> u64 {
        match self.map.get(key) {
            None => default,
            Some(v) => v.as_u64().unwrap_or_else(|| {
                self.errors.push(format!("{key}: expected a non-negative integer, got {v}"));
                default
            }),
        }
    }

    fn flag(&mut self, key: &str, default: bool) -> bool {
        match self.map.get(key) {
            None => default,
            Some(v) => v.as_bool().unwrap_or_else(|| {
                self.errors.push(format!("{key}: expected true or false, got {v}"));
                default
            }),
        }
    }

    fn parsed<T: for<'de> Deserialize<'de> + Default>(&mut self, key: &str) -> T {
        match self.map.get(key) {
            None => T::default(),
            Some(v) => serde_json::from_value(v.clone()).unwrap_or_else(|e| {
                self.errors.push(format!("{key}: {e}"));
                T::default()
            }),
        }
    }

    fn band(&mut self) -> (f64, f64) {
        match self.map.get("band") {
            None => {
                self.errors.push("band: required field missing ([f_lo_hz, f_hi_hz])".into());
                (f64::NAN, f64::NAN)
            }
            Some(v) => match serde_json::from_value::<[f64; 2]>(v.clone()) {
                Ok([lo, hi]) => (lo, hi),
                Err(_) => {
                    self.errors.push(format!("band: expected [f_lo_hz, f_hi_hz], got {v}"));
                    (f64::NAN, f64::NAN)
                }
            },
        }
    }
}

fn describe(e: Error) -> String {
    match e {
        Error::InvalidParameter { name, reason } => format!("{name}: {reason}"),
        other => other.to_string(),
    }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::Config(vec![format!("not valid JSON: {e}")]))?;
    let Value::Object(map) = value else {
        return Err(Error::Config(vec!["configuration must be a JSON object".into()]));
    };
    let mut f = Fields {
        map: &map,
        errors: map
            .keys()
            .filter(|k| !KEYS.contains(&k.as_str()))
            .map(|k| format!("{k}: unknown field"))
            .collect(),
    };

    let t_hot = f.number("t_hot_k", None);
    let t_cold = f.number("t_cold_k", None);
    let t0 = f.number("t0_k", Some(NoiseSourceSpec::STANDARD_T0_K));
    let power_scale = f.number("power_scale", Some(1.0));
    let gain = f.number("dut_gain_linear", Some(1.0));
    let added = f.optional_number("dut_added_noise_power");
    let nf_db = f.optional_number("dut_nf_db");
    let band = f.band();
    let sample_rate_hz = f.number("sample_rate_hz", Some(ExperimentConfig::DEFAULT_SAMPLE_RATE_HZ));
    let n_samples = f.count("n_samples", ExperimentConfig::DEFAULT_N_SAMPLES as u64) as usize;
    let fft_size = f.count("fft_size", ExperimentConfig::DEFAULT_FFT_SIZE as u64) as usize;
    let f_ref_hz = f.number("f_ref_hz", Some(ExperimentConfig::DEFAULT_F_REF_HZ));
    let ref_amplitude = f.number("ref_amplitude", Some(ExperimentConfig::DEFAULT_REF_AMPLITUDE));
    let exclusion = f.count(
        "ref_exclusion_halfwidth_bins",
        ExperimentConfig::DEFAULT_REF_EXCLUSION as u64,
    ) as usize;
    let post_gain = f.number("post_dut_gain_linear", Some(1.0));
    let seed = f.count("seed", 0);
    let window: Window = f.parsed("window");
    let overlap_fraction = f.number("overlap_fraction", Some(0.0));
    let acquisition: Acquisition = f.parsed("acquisition");
    let floor_correction = f.flag("floor_correction", true);
    let mut errors = f.errors;

    let bandwidth = if band.1 > band.0 { band.1 - band.0 } else { 1.0 };
    let source = NoiseSourceSpec::new(t_hot, t_cold, t0, bandwidth, power_scale)
        .map_err(|e| errors.push(describe(e)))
        .ok();
    let dut = match (added, nf_db) {
        (Some(_), Some(_)) => {
            errors.push("dut_nf_db: give either dut_nf_db or dut_added_noise_power, not both".into());
            None
        }
        (Some(na), None) => DutSpec::new(gain, na, bandwidth).map_err(|e| errors.push(describe(e))).ok(),
        (None, nf) => dut_from_nf(nf.unwrap_or(0.0), gain, bandwidth, t0.max(f64::MIN_POSITIVE), power_scale.max(f64::MIN_POSITIVE))
            .map_err(|e| errors.push(describe(e)))
            .ok(),
    };

    let (Some(source), Some(dut)) = (source, dut) else {
        return Err(Error::Config(errors));
    };
    let cfg = ExperimentConfig {
        source,
        dut,
        sample_rate_hz,
        n_samples,
        fft_size,
        f_ref_hz,
        ref_amplitude,
        band_hz: band,
        ref_exclusion_halfwidth_bins: exclusion,
        post_dut_gain_linear: post_gain,
        seed,
        window,
        overlap_fraction,
        acquisition,
        floor_correction,
    };
    for p in cfg.problems() {
        if !errors.iter().any(|e| e.split(':').next() == p.split(':').next()) {
            errors.push(p);
        }
    }
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(errors))
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// JSON text of the materialized configuration.
pub fn to_json(cfg: &ExperimentConfig) -> String {
    serde_json::to_string_pretty(&FlatConfig::from(cfg)).expect("flat config serializes")
}
