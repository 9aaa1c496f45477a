//! Device under test: a linear power-gain stage that adds white noise at
//! its output, plus the closed-form noise figure of a non-inverting op-amp
//! stage from datasheet noise densities.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::nfcore::{nf_to_f, BOLTZMANN};
use crate::sigmodel::{rng_from_seed, SampledSignal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DutSpec {
    gain_linear: f64,
    added_noise_power: f64,
    bandwidth_hz: f64,
}

impl DutSpec {
    pub fn new(gain_linear: f64, added_noise_power: f64, bandwidth_hz: f64) -> Result<Self> {
        if !(gain_linear.is_finite() && gain_linear > 0.0) {
            return Err(Error::invalid("gain_linear", format!("must be > 0, got {gain_linear}")));
        }
        if !(added_noise_power.is_finite() && added_noise_power >= 0.0) {
            return Err(Error::invalid(
                "added_noise_power",
                format!("must be >= 0, got {added_noise_power}"),
            ));
        }
        if !(bandwidth_hz.is_finite() && bandwidth_hz > 0.0) {
            return Err(Error::invalid("bandwidth_hz", format!("must be > 0, got {bandwidth_hz}")));
        }
        Ok(Self {
            gain_linear,
            added_noise_power,
            bandwidth_hz,
        })
    }

    /// Unity-gain, noiseless device.
    pub fn ideal(bandwidth_hz: f64) -> Result<Self> {
        Self::new(1.0, 0.0, bandwidth_hz)
    }

    /// Power gain G.
    pub fn gain_linear(&self) -> f64 {
        self.gain_linear
    }

    /// Output-referred added noise power Na.
    pub fn added_noise_power(&self) -> f64 {
        self.added_noise_power
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    /// Total output noise power for an input noise power `input_power`.
    pub fn output_power(&self, input_power: f64) -> f64 {
        self.gain_linear * input_power + self.added_noise_power
    }
}

/// Pass `input` through the device: amplitude gain `sqrt(G)` followed by
/// fresh Gaussian noise of power `Na`.
pub fn apply_dut(dut: &DutSpec, input: &SampledSignal, seed: u64) -> Result<SampledSignal> {
    let amp = dut.gain_linear.sqrt();
    let out = if dut.added_noise_power == 0.0 {
        input.samples().iter().map(|x| amp * x).collect()
    } else {
        let sigma = dut.added_noise_power.sqrt();
        let mut rng = rng_from_seed(seed);
        input
            .samples()
            .iter()
            .map(|x| {
                let z: f64 = StandardNormal.sample(&mut rng);
                amp * x + sigma * z
            })
            .collect()
    };
    SampledSignal::new(input.sample_rate_hz(), out)
}

/// Device whose nominal noise figure at `t0_k` is `nf_db`.
pub fn dut_from_nf(
    nf_db: f64,
    gain_linear: f64,
    bandwidth_hz: f64,
    t0_k: f64,
    power_scale: f64,
) -> Result<DutSpec> {
    if !(nf_db.is_finite() && nf_db >= 0.0) {
        return Err(Error::invalid("nf_db", format!("must be >= 0 dB, got {nf_db}")));
    }
    if !(t0_k > 0.0 && power_scale > 0.0) {
        return Err(Error::invalid("t0_k", "t0_k and power_scale must be positive"));
    }
    let f = nf_to_f(nf_db);
    DutSpec::new(
        gain_linear,
        (f - 1.0) * power_scale * t0_k * gain_linear,
        bandwidth_hz,
    )
}

/// Noise factor `(Na + N0 G) / (N0 G)` with `N0 = power_scale * t0_k`.
pub fn nominal_f(dut: &DutSpec, t0_k: f64, power_scale: f64) -> f64 {
    let n0g = power_scale * t0_k * dut.gain_linear;
    (dut.added_noise_power + n0g) / n0g
}

/// Input-referred noise sources of a non-inverting op-amp stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpampNoiseModel {
    /// Input voltage noise density, V/sqrt(Hz).
    pub en_v_per_rthz: f64,
    /// Input current noise density, A/sqrt(Hz).
    pub in_a_per_rthz: f64,
    /// Source resistance, ohms.
    pub rs_ohm: f64,
    /// Feedback network seen from the inverting input, ohms.
    pub req_ohm: f64,
    pub temperature_k: f64,
}

impl OpampNoiseModel {
    fn validate(&self) -> Result<()> {
        if self.rs_ohm == 0.0 {
            return Err(Error::Domain(
                "source resistance is zero: noise figure is undefined".into(),
            ));
        }
        if !(self.rs_ohm > 0.0 && self.rs_ohm.is_finite()) {
            return Err(Error::invalid("rs_ohm", format!("must be > 0, got {}", self.rs_ohm)));
        }
        if !(self.req_ohm > 0.0 && self.req_ohm.is_finite()) {
            return Err(Error::invalid("req_ohm", format!("must be > 0, got {}", self.req_ohm)));
        }
        if !(self.en_v_per_rthz >= 0.0 && self.in_a_per_rthz >= 0.0) {
            return Err(Error::invalid("en_v_per_rthz", "noise densities must be >= 0"));
        }
        if !(self.temperature_k > 0.0 && self.temperature_k.is_finite()) {
            return Err(Error::invalid("temperature_k", "must be > 0 K"));
        }
        Ok(())
    }
}

/// Spot noise figure (dB) of the stage driven from `rs_ohm`:
///
/// `F = (4kT·Rs + en² + (in·Rs)² + 4kT·Req) / (4kT·Rs)`
pub fn opamp_noise_figure(m: &OpampNoiseModel) -> Result<f64> {
    m.validate()?;
    let four_kt = 4.0 * BOLTZMANN * m.temperature_k;
    let source = four_kt * m.rs_ohm;
    let current = m.in_a_per_rthz * m.rs_ohm;
    let total = source
        + m.en_v_per_rthz * m.en_v_per_rthz
        + current * current
        + four_kt * m.req_ohm;
    Ok(10.0 * (total / source).log10())
}
