//! Analog-domain waveforms of the test setup: thermal noise from a
//! calibrated hot/cold source and the square-wave reference tone.
//!
//! Noise power is carried in temperature-proportional units: a source at
//! temperature `T` produces white Gaussian noise of variance
//! `power_scale * T` spread uniformly over the simulated Nyquist band.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Uniformly sampled real waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    sample_rate_hz: f64,
    samples: Vec<f64>,
}

impl SampledSignal {
    pub fn new(sample_rate_hz: f64, samples: Vec<f64>) -> Result<Self> {
        check_rate(sample_rate_hz)?;
        if samples.is_empty() {
            return Err(Error::Shape("signal has no samples".into()));
        }
        Ok(Self {
            sample_rate_hz,
            samples,
        })
    }

    pub fn zeros(n: usize, sample_rate_hz: f64) -> Result<Self> {
        Self::new(sample_rate_hz, vec![0.0; n])
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Multiply every sample by `factor` (an amplitude gain).
    pub fn scaled(&self, factor: f64) -> SampledSignal {
        SampledSignal {
            sample_rate_hz: self.sample_rate_hz,
            samples: self.samples.iter().map(|x| factor * x).collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Mean square value (total power, DC included).
    pub fn power(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum::<f64>() / self.samples.len() as f64
    }

    /// Sample variance about the sample mean.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / self.samples.len() as f64
    }
}

fn check_rate(sample_rate_hz: f64) -> Result<()> {
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(Error::invalid(
            "sample_rate_hz",
            format!("must be finite and positive, got {sample_rate_hz}"),
        ));
    }
    Ok(())
}

/// Seeded generator shared by every stochastic stage of the crate.
pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent sub-seed for stream `stream` of a run seeded with
/// `seed` (SplitMix64 finalizer over the pair).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(stream.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Zero-mean white Gaussian noise with standard deviation `sigma`.
pub fn gaussian_noise(n: usize, sample_rate_hz: f64, sigma: f64, seed: u64) -> Result<SampledSignal> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one sample"));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::invalid(
            "sigma",
            format!("must be finite and non-negative, got {sigma}"),
        ));
    }
    check_rate(sample_rate_hz)?;
    let mut rng = rng_from_seed(seed);
    let samples = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sigma * z
        })
        .collect();
    SampledSignal::new(sample_rate_hz, samples)
}

/// Square wave taking the values `+amplitude` for the first half of each
/// period and `-amplitude` for the second half.
pub fn square_wave(
    n: usize,
    sample_rate_hz: f64,
    f0_hz: f64,
    amplitude: f64,
    phase_rad: f64,
) -> Result<SampledSignal> {
    check_rate(sample_rate_hz)?;
    if n == 0 {
        return Err(Error::invalid("n", "need at least one sample"));
    }
    if !(f0_hz.is_finite() && f0_hz > 0.0 && f0_hz < sample_rate_hz / 2.0) {
        return Err(Error::invalid(
            "f0_hz",
            format!("must lie in (0, {}) Hz, got {f0_hz}", sample_rate_hz / 2.0),
        ));
    }
    if !amplitude.is_finite() || !phase_rad.is_finite() {
        return Err(Error::invalid("amplitude", "amplitude and phase must be finite"));
    }
    let phase_cycles = phase_rad / std::f64::consts::TAU;
    let samples = (0..n)
        .map(|i| {
            let cycles = (i as f64 * f0_hz) / sample_rate_hz + phase_cycles;
            if cycles.rem_euclid(1.0) < 0.5 {
                amplitude
            } else {
                -amplitude
            }
        })
        .collect();
    SampledSignal::new(sample_rate_hz, samples)
}

/// Elementwise sum of two signals on the same time grid.
pub fn mix(a: &SampledSignal, b: &SampledSignal) -> Result<SampledSignal> {
    if a.sample_rate_hz != b.sample_rate_hz || a.len() != b.len() {
        return Err(Error::Shape(format!(
            "cannot mix {} samples @ {} Hz with {} samples @ {} Hz",
            a.len(),
            a.sample_rate_hz,
            b.len(),
            b.sample_rate_hz
        )));
    }
    let samples = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| x + y)
        .collect();
    SampledSignal::new(a.sample_rate_hz, samples)
}

/// Which state of the calibrated noise source is selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceState {
    Hot,
    Cold,
}

/// Calibrated two-level noise source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSourceSpec {
    t_hot_k: f64,
    t_cold_k: f64,
    t0_k: f64,
    bandwidth_hz: f64,
    power_scale: f64,
}

impl NoiseSourceSpec {
    pub const STANDARD_T0_K: f64 = 290.0;

    pub fn new(
        t_hot_k: f64,
        t_cold_k: f64,
        t0_k: f64,
        bandwidth_hz: f64,
        power_scale: f64,
    ) -> Result<Self> {
        if !(t_cold_k.is_finite() && t_cold_k > 0.0) {
            return Err(Error::invalid("t_cold_k", format!("must be > 0 K, got {t_cold_k}")));
        }
        // equal temperatures are allowed for null checks; ordering is
        // enforced by the experiment layer where a Y factor is formed
        if !(t_hot_k.is_finite() && t_hot_k >= t_cold_k) {
            return Err(Error::invalid(
                "t_hot_k",
                format!("must be >= t_cold_k ({t_cold_k} K), got {t_hot_k}"),
            ));
        }
        if !(t0_k.is_finite() && t0_k > 0.0) {
            return Err(Error::invalid("t0_k", format!("must be > 0 K, got {t0_k}")));
        }
        if !(bandwidth_hz.is_finite() && bandwidth_hz > 0.0) {
            return Err(Error::invalid("bandwidth_hz", format!("must be > 0, got {bandwidth_hz}")));
        }
        if !(power_scale.is_finite() && power_scale > 0.0) {
            return Err(Error::invalid("power_scale", format!("must be > 0, got {power_scale}")));
        }
        Ok(Self {
            t_hot_k,
            t_cold_k,
            t0_k,
            bandwidth_hz,
            power_scale,
        })
    }

    /// Source at the given hot/cold temperatures with T0 = 290 K and unit power scale.
    pub fn with_temperatures(t_hot_k: f64, t_cold_k: f64, bandwidth_hz: f64) -> Result<Self> {
        Self::new(t_hot_k, t_cold_k, Self::STANDARD_T0_K, bandwidth_hz, 1.0)
    }

    pub fn t_hot_k(&self) -> f64 {
        self.t_hot_k
    }

    pub fn t_cold_k(&self) -> f64 {
        self.t_cold_k
    }

    pub fn t0_k(&self) -> f64 {
        self.t0_k
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn power_scale(&self) -> f64 {
        self.power_scale
    }

    pub fn temperature(&self, state: SourceState) -> f64 {
        match state {
            SourceState::Hot => self.t_hot_k,
            SourceState::Cold => self.t_cold_k,
        }
    }

    /// Full-band noise power delivered in `state`.
    pub fn noise_power(&self, state: SourceState) -> f64 {
        self.power_scale * self.temperature(state)
    }

    /// Noise power corresponding to the reference temperature T0.
    pub fn reference_power(&self) -> f64 {
        self.power_scale * self.t0_k
    }
}

/// White Gaussian output of the noise source in the selected state.
pub fn source_output(
    src: &NoiseSourceSpec,
    state: SourceState,
    n: usize,
    sample_rate_hz: f64,
    seed: u64,
) -> Result<SampledSignal> {
    gaussian_noise(n, sample_rate_hz, src.noise_power(state).sqrt(), seed)
}
