//! One-bit digitizer: an ideal voltage comparator between the observed node
//! and a reference waveform, with optional flip-flop subsampling, and the
//! arcsine-law helpers used to reason about its output statistics.

use crate::error::{Error, Result};
use crate::sigmodel::SampledSignal;

/// Uniformly sampled real-valued sequence that spectral estimators accept.
pub trait Series {
    fn sample_rate_hz(&self) -> f64;
    fn len(&self) -> usize;
    fn value(&self, i: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Series for SampledSignal {
    fn sample_rate_hz(&self) -> f64 {
        SampledSignal::sample_rate_hz(self)
    }

    fn len(&self) -> usize {
        SampledSignal::len(self)
    }

    fn value(&self, i: usize) -> f64 {
        self.samples()[i]
    }
}

/// Comparator output: a sequence over {+1, -1}.
#[derive(Debug, Clone, PartialEq)]
pub struct BitStream {
    sample_rate_hz: f64,
    bits: Vec<i8>,
}

impl BitStream {
    pub fn new(sample_rate_hz: f64, bits: Vec<i8>) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::invalid(
                "sample_rate_hz",
                format!("must be finite and positive, got {sample_rate_hz}"),
            ));
        }
        if let Some(pos) = bits.iter().position(|&b| b != 1 && b != -1) {
            return Err(Error::invalid(
                "bits",
                format!("element {pos} is {}, expected +1 or -1", bits[pos]),
            ));
        }
        Ok(Self {
            sample_rate_hz,
            bits,
        })
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn bits(&self) -> &[i8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn mean(&self) -> f64 {
        if self.bits.is_empty() {
            return 0.0;
        }
        self.bits.iter().map(|&b| b as i64).sum::<i64>() as f64 / self.bits.len() as f64
    }
}

impl Series for BitStream {
    fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    fn len(&self) -> usize {
        self.bits.len()
    }

    fn value(&self, i: usize) -> f64 {
        self.bits[i] as f64
    }
}

/// Compare `input` against `reference` sample by sample.
///
/// A sample resolves to +1 when `input >= reference` and -1 otherwise; an
/// exact tie resolves to +1.
pub fn digitize(input: &SampledSignal, reference: &SampledSignal) -> Result<BitStream> {
    if input.sample_rate_hz() != reference.sample_rate_hz() || input.len() != reference.len() {
        return Err(Error::Shape(format!(
            "comparator inputs differ: {} samples @ {} Hz vs {} samples @ {} Hz",
            input.len(),
            input.sample_rate_hz(),
            reference.len(),
            reference.sample_rate_hz()
        )));
    }
    let bits = input
        .samples()
        .iter()
        .zip(reference.samples())
        .map(|(x, r)| if x >= r { 1 } else { -1 })
        .collect();
    BitStream::new(input.sample_rate_hz(), bits)
}

/// Keep every `factor`-th bit, starting with the first.
pub fn decimate(bits: &BitStream, factor: usize) -> Result<BitStream> {
    if factor == 0 {
        return Err(Error::invalid("factor", "decimation factor must be >= 1"));
    }
    let kept = bits.bits.iter().step_by(factor).copied().collect();
    BitStream::new(bits.sample_rate_hz / factor as f64, kept)
}

/// `(2/pi) asin(rho)`: normalized autocorrelation of a hard-limited
/// zero-mean Gaussian process whose own normalized autocorrelation is `rho`.
pub fn arcsine_map(rho: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("correlation coefficient {rho} outside [-1, 1]")));
    }
    Ok(std::f64::consts::FRAC_2_PI * rho.asin())
}

/// Biased, normalized autocorrelation for lags `0..=max_lag`:
/// `r(k) = sum x[i] x[i+k] / sum x[i]^2`, so `r(0) = 1`.
pub fn empirical_autocorr<S: Series + ?Sized>(x: &S, max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Shape("autocorrelation of an empty sequence".into()));
    }
    if max_lag >= n {
        return Err(Error::invalid(
            "max_lag",
            format!("must be below the sequence length {n}, got {max_lag}"),
        ));
    }
    let values: Vec<f64> = (0..n).map(|i| x.value(i)).collect();
    let r0: f64 = values.iter().map(|v| v * v).sum();
    if r0 == 0.0 {
        return Err(Error::Domain("autocorrelation of an all-zero sequence".into()));
    }
    Ok((0..=max_lag)
        .map(|lag| {
            let s: f64 = values[..n - lag]
                .iter()
                .zip(&values[lag..])
                .map(|(a, b)| a * b)
                .sum();
            s / r0
        })
        .collect())
}
