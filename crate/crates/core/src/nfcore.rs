//! Noise-figure algebra: SNR, noise factor and noise figure conversions,
//! the direct method, the Y-factor relations and the Friis cascade.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Standard reference temperature, K.
pub const T0_KELVIN: f64 = 290.0;

/// How a noise factor was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NfMethod {
    Direct,
    YFactorTemps,
    YFactorPowers,
}

/// Physical plausibility of an estimated noise factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NfStatus {
    Physical,
    /// 0 < F < 1: better than noiseless, only reachable through estimation noise.
    BelowUnity,
    /// F <= 0: no noise figure exists (`nf_db` is NaN).
    NonPositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseFigureResult {
    pub y: Option<f64>,
    pub f: f64,
    pub nf_db: f64,
    pub method: NfMethod,
    pub status: NfStatus,
}

impl NoiseFigureResult {
    pub fn new(f: f64, y: Option<f64>, method: NfMethod) -> Self {
        let status = if f <= 0.0 {
            NfStatus::NonPositive
        } else if f < 1.0 {
            NfStatus::BelowUnity
        } else {
            NfStatus::Physical
        };
        Self {
            y,
            f,
            nf_db: 10.0 * f.log10(),
            method,
            status,
        }
    }

    pub fn is_physical(&self) -> bool {
        self.status == NfStatus::Physical
    }
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{name} must be finite and positive, got {v}")))
    }
}

/// Signal-to-noise ratio in dB.
pub fn snr_db(signal_power: f64, noise_power: f64) -> Result<f64> {
    let s = positive("signal_power", signal_power)?;
    let n = positive("noise_power", noise_power)?;
    Ok(10.0 * (s / n).log10())
}

/// Noise factor from input and output SNR.
pub fn f_from_snr(snr_in_db: f64, snr_out_db: f64) -> f64 {
    10f64.powf((snr_in_db - snr_out_db) / 10.0)
}

pub fn f_to_nf(f: f64) -> Result<f64> {
    Ok(10.0 * positive("noise factor", f)?.log10())
}

pub fn nf_to_f(nf_db: f64) -> f64 {
    10f64.powf(nf_db / 10.0)
}

/// Available thermal noise power `k T B` in watts.
pub fn thermal_noise_power(temperature_k: f64, bandwidth_hz: f64) -> f64 {
    BOLTZMANN * temperature_k * bandwidth_hz
}

/// Direct-method noise factor: measured output noise power (W) over the
/// amplified reference noise `k T0 B G`.
pub fn f_direct(output_noise_power_w: f64, gain_linear: f64, bandwidth_hz: f64, t0_k: f64) -> Result<f64> {
    positive("output_noise_power_w", output_noise_power_w)?;
    let denom = thermal_noise_power(
        positive("t0_k", t0_k)?,
        positive("bandwidth_hz", bandwidth_hz)?,
    ) * positive("gain_linear", gain_linear)?;
    if denom == 0.0 {
        return Err(Error::Domain("k T0 B G underflows to zero".into()));
    }
    Ok(output_noise_power_w / denom)
}

/// Direct-method estimate when the post-DUT amplifier gain drifted by
/// `gain_ratio` (actual over assumed): the error multiplies straight into F.
pub fn direct_gain_error(f_true: f64, gain_ratio: f64) -> Result<f64> {
    Ok(f_true * positive("gain_ratio", gain_ratio)?)
}

/// NF error in dB caused by a gain ratio in the direct method.
pub fn direct_gain_error_db(gain_ratio: f64) -> Result<f64> {
    Ok(10.0 * positive("gain_ratio", gain_ratio)?.log10())
}

pub fn y_factor(n_hot: f64, n_cold: f64) -> Result<f64> {
    Ok(positive("n_hot", n_hot)? / positive("n_cold", n_cold)?)
}

fn check_y(y: f64) -> Result<f64> {
    if !y.is_finite() || y <= 0.0 {
        return Err(Error::Domain(format!("Y factor must be finite and positive, got {y}")));
    }
    if y == 1.0 {
        return Err(Error::SingularY);
    }
    Ok(y)
}

/// `F = ((Th/T0 - 1) - Y (Tc/T0 - 1)) / (Y - 1)`
pub fn f_from_y_temps(y: f64, t_hot_k: f64, t_cold_k: f64, t0_k: f64) -> Result<NoiseFigureResult> {
    let y = check_y(y)?;
    let th = positive("t_hot_k", t_hot_k)?;
    let tc = positive("t_cold_k", t_cold_k)?;
    let t0 = positive("t0_k", t0_k)?;
    let f = ((th / t0 - 1.0) - y * (tc / t0 - 1.0)) / (y - 1.0);
    Ok(NoiseFigureResult::new(f, Some(y), NfMethod::YFactorTemps))
}

/// Power form of the Y-factor relation; `n0` is the power that corresponds
/// to T0 in the same units as the calibration powers.
pub fn f_from_y_powers(y: f64, n_hot_cal: f64, n_cold_cal: f64, n0: f64) -> Result<NoiseFigureResult> {
    let y = check_y(y)?;
    let nh = positive("n_hot_cal", n_hot_cal)?;
    let nc = positive("n_cold_cal", n_cold_cal)?;
    let n0 = positive("n0", n0)?;
    let f = ((nh / n0 - 1.0) - y * (nc / n0 - 1.0)) / (y - 1.0);
    Ok(NoiseFigureResult::new(f, Some(y), NfMethod::YFactorPowers))
}

/// Y factor a device of noise factor `f` shows against a hot/cold source.
pub fn ideal_y(f: f64, t_hot_k: f64, t_cold_k: f64, t0_k: f64) -> f64 {
    let added = (f - 1.0) * t0_k;
    (t_hot_k + added) / (t_cold_k + added)
}

/// Cascade noise factor of `(noise_factor, power_gain)` stages in signal order.
pub fn friis_cascade(stages: &[(f64, f64)]) -> Result<f64> {
    let Some(&(f1, _)) = stages.first() else {
        return Err(Error::invalid("stages", "cascade needs at least one stage"));
    };
    for &(f, g) in stages {
        if !(f >= 1.0 && f.is_finite()) {
            return Err(Error::invalid("stages", format!("stage noise factor {f} < 1")));
        }
        positive("stage gain", g)?;
    }
    let mut total = f1;
    let mut gain = stages[0].1;
    for &(f, g) in &stages[1..] {
        total += (f - 1.0) / gain;
        gain *= g;
    }
    Ok(total)
}
