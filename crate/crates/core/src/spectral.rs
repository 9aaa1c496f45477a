//! Averaged-periodogram PSD estimation and the reference-tone procedure:
//! locate the square-wave fundamental in two spectra, scale one so the
//! reference powers agree, and integrate the in-band noise with the
//! reference bins left out.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{num_complex::Complex, Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::digitizer::Series;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    #[serde(rename = "rect", alias = "rectangular")]
    Rectangular,
    Hann,
}

impl Window {
    fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            // periodic Hann, the usual choice for spectral averaging
            Window::Hann => (0..n)
                .map(|i| {
                    let s = (std::f64::consts::PI * i as f64 / n as f64).sin();
                    s * s
                })
                .collect(),
        }
    }
}

/// One-sided power spectral density on the grid `k * fs / fft_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    freq_hz: Vec<f64>,
    psd: Vec<f64>,
    fft_size: usize,
    n_segments: usize,
    bin_width_hz: f64,
    sample_rate_hz: f64,
}

impl Spectrum {
    /// Build a spectrum directly from density values on the standard grid.
    pub fn from_density(sample_rate_hz: f64, fft_size: usize, psd: Vec<f64>, n_segments: usize) -> Result<Self> {
        if fft_size < 2 {
            return Err(Error::invalid("fft_size", "must be at least 2"));
        }
        if psd.len() != fft_size / 2 + 1 {
            return Err(Error::Shape(format!(
                "{} density values for an FFT of size {fft_size}",
                psd.len()
            )));
        }
        if psd.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("psd", "densities must be finite and non-negative"));
        }
        let bin_width_hz = sample_rate_hz / fft_size as f64;
        Ok(Self {
            freq_hz: (0..psd.len()).map(|k| k as f64 * bin_width_hz).collect(),
            psd,
            fft_size,
            n_segments,
            bin_width_hz,
            sample_rate_hz,
        })
    }

    pub fn freq_hz(&self) -> &[f64] {
        &self.freq_hz
    }

    pub fn psd(&self) -> &[f64] {
        &self.psd
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn n_segments(&self) -> usize {
        self.n_segments
    }

    pub fn bin_width_hz(&self) -> f64 {
        self.bin_width_hz
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn nyquist_hz(&self) -> f64 {
        self.sample_rate_hz / 2.0
    }

    pub fn len(&self) -> usize {
        self.psd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psd.is_empty()
    }

    /// Power in a single bin (density times bin width).
    pub fn bin_power(&self, k: usize) -> f64 {
        self.psd[k] * self.bin_width_hz
    }

    /// Integral of the density over the whole grid.
    pub fn total_power(&self) -> f64 {
        self.psd.iter().sum::<f64>() * self.bin_width_hz
    }

    /// Bin whose centre is nearest to `f_hz`.
    pub fn nearest_bin(&self, f_hz: f64) -> usize {
        let k = (f_hz / self.bin_width_hz).round().max(0.0) as usize;
        k.min(self.len() - 1)
    }

    fn same_grid(&self, other: &Spectrum) -> bool {
        self.fft_size == other.fft_size && self.sample_rate_hz == other.sample_rate_hz
    }
}

/// Segments summed per parallel task; fixed so the summation order, and
/// therefore the result, does not depend on thread scheduling.
const SEGMENTS_PER_TASK: usize = 8;

/// Averaged windowed periodogram (Bartlett with the rectangular window and
/// no overlap, Welch otherwise), scaled so the density integrates to the
/// mean square of the input.
pub fn psd<S: Series + Sync + ?Sized>(
    x: &S,
    fft_size: usize,
    window: Window,
    overlap_fraction: f64,
) -> Result<Spectrum> {
    if fft_size < 2 {
        return Err(Error::invalid("fft_size", "must be at least 2"));
    }
    if !(0.0..=0.75).contains(&overlap_fraction) {
        return Err(Error::invalid(
            "overlap_fraction",
            format!("must lie in [0, 0.75], got {overlap_fraction}"),
        ));
    }
    if fft_size > x.len() {
        return Err(Error::InsufficientData {
            needed: fft_size,
            available: x.len(),
        });
    }
    let step = ((fft_size as f64 * (1.0 - overlap_fraction)).round() as usize).max(1);
    let n_segments = (x.len() - fft_size) / step + 1;
    let coeffs = window.coefficients(fft_size);
    let window_power: f64 = coeffs.iter().map(|w| w * w).sum();
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(fft_size);
    let n_bins = fft_size / 2 + 1;

    let tasks = n_segments.div_ceil(SEGMENTS_PER_TASK);
    let partials: Vec<Vec<f64>> = (0..tasks)
        .into_par_iter()
        .map(|task| {
            let mut acc = vec![0.0; n_bins];
            let mut buf = vec![Complex::new(0.0, 0.0); fft_size];
            let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            let first = task * SEGMENTS_PER_TASK;
            let last = (first + SEGMENTS_PER_TASK).min(n_segments);
            for seg in first..last {
                let start = seg * step;
                for (i, slot) in buf.iter_mut().enumerate() {
                    *slot = Complex::new(coeffs[i] * x.value(start + i), 0.0);
                }
                fft.process_with_scratch(&mut buf, &mut scratch);
                for (a, c) in acc.iter_mut().zip(&buf) {
                    *a += c.norm_sqr();
                }
            }
            acc
        })
        .collect();

    let mut sum = vec![0.0; n_bins];
    for part in &partials {
        for (s, p) in sum.iter_mut().zip(part) {
            *s += p;
        }
    }

    let fs = x.sample_rate_hz();
    let scale = 1.0 / (fs * window_power * n_segments as f64);
    let has_nyquist = fft_size.is_multiple_of(2);
    let density = sum
        .into_iter()
        .enumerate()
        .map(|(k, p)| {
            let one_sided = if k == 0 || (has_nyquist && k == n_bins - 1) { 1.0 } else { 2.0 };
            one_sided * p * scale
        })
        .collect();
    Spectrum::from_density(fs, fft_size, density, n_segments)
}

/// Location and integrated power of the reference tone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferencePeak {
    pub bin: usize,
    pub freq_hz: f64,
    /// Power of the peak bin plus one guard bin on each side.
    pub power: f64,
}

/// Largest bin within `search_halfwidth_bins` of the bin nearest `f_ref_hz`,
/// with its power integrated over the peak bin and one guard bin per side.
pub fn find_reference_peak(s: &Spectrum, f_ref_hz: f64, search_halfwidth_bins: usize) -> Result<ReferencePeak> {
    if !(f_ref_hz.is_finite() && f_ref_hz >= 0.0 && f_ref_hz <= s.nyquist_hz()) {
        return Err(Error::invalid(
            "f_ref_hz",
            format!("{f_ref_hz} Hz lies outside [0, {}] Hz", s.nyquist_hz()),
        ));
    }
    let centre = s.nearest_bin(f_ref_hz);
    let last = s.len() - 1;
    if centre < search_halfwidth_bins || centre + search_halfwidth_bins > last {
        return Err(Error::invalid(
            "search_halfwidth_bins",
            format!("window of +-{search_halfwidth_bins} bins around bin {centre} leaves the grid 0..={last}"),
        ));
    }
    let lo = centre - search_halfwidth_bins;
    let hi = centre + search_halfwidth_bins;
    let mut bin = lo;
    for k in lo..=hi {
        if s.psd[k] > s.psd[bin] {
            bin = k;
        }
    }
    let power = (bin.saturating_sub(1)..=(bin + 1).min(last))
        .map(|k| s.bin_power(k))
        .sum();
    Ok(ReferencePeak {
        bin,
        freq_hz: s.freq_hz[bin],
        power,
    })
}

/// Mean density of the bins between `inner` (exclusive) and `outer`
/// (inclusive) bins away from `bin` on either side.
pub fn local_noise_floor(s: &Spectrum, bin: usize, inner: usize, outer: usize) -> Result<f64> {
    let last = s.len() - 1;
    let (mut sum, mut count) = (0.0, 0usize);
    for d in inner + 1..=outer {
        if bin >= d {
            sum += s.psd[bin - d];
            count += 1;
        }
        if bin + d <= last {
            sum += s.psd[bin + d];
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::DegenerateBand(format!(
            "no bins between {inner} and {outer} bins from bin {bin}"
        )));
    }
    Ok(sum / count as f64)
}

/// Reference tone power with the broadband floor under its three bins
/// removed.
pub fn tone_power(s: &Spectrum, peak: &ReferencePeak, floor_inner: usize, floor_outer: usize) -> Result<f64> {
    let floor = local_noise_floor(s, peak.bin, floor_inner, floor_outer)?;
    let lo = peak.bin.saturating_sub(1);
    let hi = (peak.bin + 1).min(s.len() - 1);
    Ok(peak.power - floor * s.bin_width_hz * (hi - lo + 1) as f64)
}

/// Scale every density value by `target_peak_power / own_peak_power`.
pub fn normalize_to_reference(s: &Spectrum, target_peak_power: f64, own_peak_power: f64) -> Result<Spectrum> {
    if !(own_peak_power.is_finite() && own_peak_power > 0.0) {
        return Err(Error::DegenerateReference(format!(
            "own reference power is {own_peak_power}"
        )));
    }
    if !(target_peak_power.is_finite() && target_peak_power > 0.0) {
        return Err(Error::DegenerateReference(format!(
            "target reference power is {target_peak_power}"
        )));
    }
    let factor = target_peak_power / own_peak_power;
    Ok(Spectrum {
        psd: s.psd.iter().map(|v| v * factor).collect(),
        ..s.clone()
    })
}

/// Integrated power over bins with centres in `[f_lo_hz, f_hi_hz]`, leaving
/// out every bin whose extent overlaps one of the `excluded` intervals.
pub fn band_power(s: &Spectrum, f_lo_hz: f64, f_hi_hz: f64, excluded: &[(f64, f64)]) -> Result<f64> {
    if !(f_lo_hz >= 0.0 && f_lo_hz < f_hi_hz && f_hi_hz <= s.nyquist_hz()) {
        return Err(Error::invalid(
            "band",
            format!(
                "need 0 <= f_lo < f_hi <= {} Hz, got [{f_lo_hz}, {f_hi_hz}]",
                s.nyquist_hz()
            ),
        ));
    }
    let bins = band_bins(s, f_lo_hz, f_hi_hz, excluded);
    if bins.is_empty() {
        return Err(Error::DegenerateBand(format!(
            "no bins left in [{f_lo_hz}, {f_hi_hz}] Hz after exclusions"
        )));
    }
    Ok(bins.iter().map(|&k| s.psd[k]).sum::<f64>() * s.bin_width_hz)
}

/// Indices of the bins [`band_power`] integrates.
pub fn band_bins(s: &Spectrum, f_lo_hz: f64, f_hi_hz: f64, excluded: &[(f64, f64)]) -> Vec<usize> {
    let half = s.bin_width_hz / 2.0;
    s.freq_hz
        .iter()
        .enumerate()
        .filter(|&(_, &f)| f >= f_lo_hz && f <= f_hi_hz)
        .filter(|&(_, &f)| !excluded.iter().any(|&(a, b)| f + half > a && f - half < b))
        .map(|(k, _)| k)
        .collect()
}

/// Knobs of the hot/cold ratio estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSettings {
    pub band_hz: (f64, f64),
    /// Reference frequency; `None` compares raw band powers (multi-bit path
    /// with no injected reference).
    pub f_ref_hz: Option<f64>,
    pub search_halfwidth_bins: usize,
    pub exclusion_halfwidth_bins: usize,
    /// Subtract the local noise floor from the reference peak power.
    pub floor_correction: bool,
    /// Outer edge, in bins from the peak, of the floor estimate.
    pub floor_outer_bins: usize,
}

impl RatioSettings {
    pub const DEFAULT_SEARCH_HALFWIDTH: usize = 5;
    pub const DEFAULT_EXCLUSION_HALFWIDTH: usize = 3;
    pub const DEFAULT_FLOOR_OUTER: usize = 23;

    pub fn with_reference(band_hz: (f64, f64), f_ref_hz: f64, exclusion_halfwidth_bins: usize) -> Self {
        Self {
            band_hz,
            f_ref_hz: Some(f_ref_hz),
            search_halfwidth_bins: Self::DEFAULT_SEARCH_HALFWIDTH,
            exclusion_halfwidth_bins,
            floor_correction: true,
            floor_outer_bins: Self::DEFAULT_FLOOR_OUTER.max(exclusion_halfwidth_bins + 20),
        }
    }

    pub fn without_reference(band_hz: (f64, f64)) -> Self {
        Self {
            band_hz,
            f_ref_hz: None,
            search_halfwidth_bins: Self::DEFAULT_SEARCH_HALFWIDTH,
            exclusion_halfwidth_bins: Self::DEFAULT_EXCLUSION_HALFWIDTH,
            floor_correction: false,
            floor_outer_bins: Self::DEFAULT_FLOOR_OUTER,
        }
    }
}

/// Reference measurements for one spectrum of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceMeasurement {
    pub peak: ReferencePeak,
    /// Power used for normalization (floor-corrected when enabled).
    pub tone_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub y: f64,
    pub hot_reference: Option<ReferenceMeasurement>,
    pub cold_reference: Option<ReferenceMeasurement>,
    /// In-band powers after normalization and reference exclusion.
    pub band_power_hot: f64,
    pub band_power_cold: f64,
    pub excluded_hz: Vec<(f64, f64)>,
}

fn measure_reference(s: &Spectrum, f_ref_hz: f64, settings: &RatioSettings) -> Result<ReferenceMeasurement> {
    let peak = find_reference_peak(s, f_ref_hz, settings.search_halfwidth_bins)?;
    let tone_power = if settings.floor_correction {
        tone_power(
            s,
            &peak,
            settings.exclusion_halfwidth_bins,
            settings.floor_outer_bins,
        )?
    } else {
        peak.power
    };
    // floor subtraction of a tone-free spectrum leaves only rounding residue
    if tone_power.is_nan() || tone_power <= 1e-9 * peak.power {
        return Err(Error::DegenerateReference(format!(
            "reference at {} Hz does not rise above the noise floor (tone power {tone_power:e})",
            peak.freq_hz
        )));
    }
    Ok(ReferenceMeasurement { peak, tone_power })
}

/// Hot-over-cold in-band noise power ratio with reference normalization.
pub fn power_ratio_with(hot: &Spectrum, cold: &Spectrum, settings: &RatioSettings) -> Result<RatioEstimate> {
    if !hot.same_grid(cold) {
        return Err(Error::Shape(format!(
            "spectra on different grids: fft {} @ {} Hz vs fft {} @ {} Hz",
            hot.fft_size, hot.sample_rate_hz, cold.fft_size, cold.sample_rate_hz
        )));
    }
    let (f_lo, f_hi) = settings.band_hz;
    let Some(f_ref) = settings.f_ref_hz else {
        let band_power_hot = band_power(hot, f_lo, f_hi, &[])?;
        let band_power_cold = band_power(cold, f_lo, f_hi, &[])?;
        return Ok(RatioEstimate {
            y: band_power_hot / band_power_cold,
            hot_reference: None,
            cold_reference: None,
            band_power_hot,
            band_power_cold,
            excluded_hz: Vec::new(),
        });
    };

    let hot_ref = measure_reference(hot, f_ref, settings)?;
    let cold_ref = measure_reference(cold, f_ref, settings)?;
    let hot_n = normalize_to_reference(hot, cold_ref.tone_power, hot_ref.tone_power)?;

    let half = settings.exclusion_halfwidth_bins as f64 * hot.bin_width_hz;
    let mut excluded = vec![(hot_ref.peak.freq_hz - half, hot_ref.peak.freq_hz + half)];
    if cold_ref.peak.bin != hot_ref.peak.bin {
        excluded.push((cold_ref.peak.freq_hz - half, cold_ref.peak.freq_hz + half));
    }
    excluded.sort_by(|a, b| a.0.total_cmp(&b.0));

    let band_power_hot = band_power(&hot_n, f_lo, f_hi, &excluded)?;
    let band_power_cold = band_power(cold, f_lo, f_hi, &excluded)?;
    Ok(RatioEstimate {
        y: band_power_hot / band_power_cold,
        hot_reference: Some(hot_ref),
        cold_reference: Some(cold_ref),
        band_power_hot,
        band_power_cold,
        excluded_hz: excluded,
    })
}

/// Y estimate from a hot/cold spectrum pair with default reference handling.
pub fn power_ratio(
    hot: &Spectrum,
    cold: &Spectrum,
    band: (f64, f64),
    f_ref_hz: f64,
    ref_exclusion_halfwidth_bins: usize,
) -> Result<f64> {
    let settings = RatioSettings::with_reference(band, f_ref_hz, ref_exclusion_halfwidth_bins);
    Ok(power_ratio_with(hot, cold, &settings)?.y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digitizer::BitStream;
    use crate::sigmodel::{gaussian_noise, mix, SampledSignal};
    use proptest::prelude::*;

    fn white(seed: u64, sigma: f64) -> SampledSignal {
        gaussian_noise(1_000_000, 50e3, sigma, seed).unwrap()
    }

    #[test]
    fn parseval_for_white_noise() {
        let x = white(1, 1.0);
        for (w, ov) in [(Window::Rectangular, 0.0), (Window::Hann, 0.0), (Window::Hann, 0.5)] {
            let s = psd(&x, 10_000, w, ov).unwrap();
            assert_eq!(s.len(), 5001);
            assert!((s.total_power() / x.power() - 1.0).abs() < 0.01, "{w:?} {ov}");
            assert!((s.total_power() - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn segment_counts() {
        let x = white(2, 1.0);
        assert_eq!(psd(&x, 10_000, Window::Rectangular, 0.0).unwrap().n_segments(), 100);
        assert_eq!(psd(&x, 10_000, Window::Hann, 0.5).unwrap().n_segments(), 199);
    }

    #[test]
    fn sine_power_at_bin_centre() {
        let (fs, n, a) = (1000.0, 1024, 0.8);
        let f = 100.0 * fs / n as f64;
        let x: Vec<f64> = (0..8 * n)
            .map(|i| a * (std::f64::consts::TAU * f * i as f64 / fs).sin())
            .collect();
        let x = SampledSignal::new(fs, x).unwrap();
        let s = psd(&x, n, Window::Rectangular, 0.0).unwrap();
        let peak: f64 = (99..=101).map(|k| s.bin_power(k)).sum();
        assert!((peak / (a * a / 2.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn constant_bits_put_everything_at_dc() {
        let b = BitStream::new(1000.0, vec![1; 4096]).unwrap();
        let s = psd(&b, 1024, Window::Rectangular, 0.0).unwrap();
        assert!((s.psd()[0] * s.bin_width_hz() - 1.0).abs() < 1e-12);
        assert!(s.psd()[1..].iter().all(|&v| v < 1e-20));
    }

    #[test]
    fn psd_argument_errors() {
        let x = SampledSignal::zeros(100, 1.0).unwrap();
        assert!(matches!(
            psd(&x, 200, Window::Rectangular, 0.0),
            Err(Error::InsufficientData { .. })
        ));
        assert!(psd(&x, 50, Window::Rectangular, 0.8).is_err());
        assert!(psd(&x, 1, Window::Rectangular, 0.0).is_err());
    }

    fn spike(bin: usize, value: f64) -> Spectrum {
        let mut d = vec![0.0; 513];
        d[bin] = value;
        Spectrum::from_density(1024.0, 1024, d, 1).unwrap()
    }

    #[test]
    fn peak_on_single_bin() {
        let s = spike(100, 2.0);
        let p = find_reference_peak(&s, 100.0, 5).unwrap();
        assert_eq!(p.bin, 100);
        assert_eq!(p.power, 2.0);
    }

    #[test]
    fn peak_offset_within_window() {
        let s = spike(102, 1.0);
        assert_eq!(find_reference_peak(&s, 100.0, 5).unwrap().bin, 102);
    }

    #[test]
    fn peak_window_must_fit_grid() {
        let s = spike(2, 1.0);
        assert!(find_reference_peak(&s, 2.0, 5).is_err());
        assert!(find_reference_peak(&s, 510.0, 5).is_err());
        assert!(find_reference_peak(&s, 600.0, 1).is_err());
    }

    #[test]
    fn normalization_is_multiplicative() {
        let x = white(3, 1.0);
        let s = psd(&x, 10_000, Window::Rectangular, 0.0).unwrap();
        assert_eq!(normalize_to_reference(&s, 2.5, 2.5).unwrap(), s);
        let four = normalize_to_reference(&s, 4.0, 1.0).unwrap();
        assert!(four.psd().iter().zip(s.psd()).all(|(a, b)| *a == 4.0 * b));
        let bp = band_power(&s, 500.0, 1500.0, &[]).unwrap();
        let bp4 = band_power(&four, 500.0, 1500.0, &[]).unwrap();
        assert!((bp4 / bp - 4.0).abs() < 1e-12);
        assert!(matches!(
            normalize_to_reference(&s, 1.0, 0.0),
            Err(Error::DegenerateReference(_))
        ));
    }

    #[test]
    fn band_power_full_band_and_exclusions() {
        let x = white(4, 1.0);
        let s = psd(&x, 10_000, Window::Rectangular, 0.0).unwrap();
        let full = band_power(&s, 0.0, s.nyquist_hz(), &[]).unwrap();
        assert!((full - s.total_power()).abs() < 1e-12);
        assert!(matches!(
            band_power(&s, 500.0, 1500.0, &[(400.0, 1600.0)]),
            Err(Error::DegenerateBand(_))
        ));
        assert!(band_power(&s, 1500.0, 500.0, &[]).is_err());
        assert!(band_power(&s, 0.0, 30e3, &[]).is_err());
        // +-3 bins around 1000 Hz removes exactly 7 bins
        let bw = s.bin_width_hz();
        let with = band_power(&s, 500.0, 1500.0, &[(1000.0 - 3.0 * bw, 1000.0 + 3.0 * bw)]).unwrap();
        let manual: f64 = (100..=300)
            .filter(|k| !(197..=203).contains(k))
            .map(|k| s.bin_power(k))
            .sum();
        assert!((with - manual).abs() < 1e-12 * manual);
    }

    #[test]
    fn tone_excluded_band_power_recovers_noise() {
        // 1 kHz tone of power 0.5 on top of unit white noise
        let n = 1_000_000;
        let fs = 50e3;
        let tone: Vec<f64> = (0..n)
            .map(|i| (std::f64::consts::TAU * 1000.0 * i as f64 / fs).sin())
            .collect();
        let x = mix(&white(5, 1.0), &SampledSignal::new(fs, tone).unwrap()).unwrap();
        let s = psd(&x, 10_000, Window::Rectangular, 0.0).unwrap();
        let bw = s.bin_width_hz();
        let p = band_power(&s, 500.0, 1500.0, &[(1000.0 - 3.0 * bw, 1000.0 + 3.0 * bw)]).unwrap();
        let noise_only = 194.0 * bw / (fs / 2.0);
        assert!((p / noise_only - 1.0).abs() < 0.03, "{p} vs {noise_only}");
    }

    #[test]
    fn equal_spectra_have_unit_ratio() {
        let mut d = vec![1e-4; 5001];
        d[600] = 1.0;
        let s = Spectrum::from_density(50e3, 10_000, d, 100).unwrap();
        assert_eq!(power_ratio(&s, &s, (500.0, 1500.0), 3000.0, 3).unwrap(), 1.0);
    }

    #[test]
    fn ratio_requires_common_grid() {
        let a = Spectrum::from_density(50e3, 10_000, vec![1.0; 5001], 1).unwrap();
        let b = Spectrum::from_density(50e3, 5000, vec![1.0; 2501], 1).unwrap();
        assert!(matches!(
            power_ratio(&a, &b, (500.0, 1500.0), 3000.0, 3),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn flat_reference_is_degenerate() {
        let s = Spectrum::from_density(50e3, 10_000, vec![1e-4; 5001], 1).unwrap();
        assert!(matches!(
            power_ratio(&s, &s, (500.0, 1500.0), 3000.0, 3),
            Err(Error::DegenerateReference(_))
        ));
    }

    #[test]
    fn ratio_without_reference_is_plain_band_ratio() {
        let hot = Spectrum::from_density(50e3, 10_000, vec![3e-4; 5001], 1).unwrap();
        let cold = Spectrum::from_density(50e3, 10_000, vec![1e-4; 5001], 1).unwrap();
        let est = power_ratio_with(&hot, &cold, &RatioSettings::without_reference((500.0, 1500.0))).unwrap();
        assert!((est.y - 3.0).abs() < 1e-12);
    }

    fn synthetic_pair(floor_hot: f64, floor_cold: f64, tone_hot: f64, tone_cold: f64, jitter: &[f64]) -> (Spectrum, Spectrum) {
        let mk = |floor: f64, tone: f64, phase: usize| {
            let mut d: Vec<f64> = (0..5001)
                .map(|k| floor * (1.0 + jitter[(k + phase) % jitter.len()]))
                .collect();
            d[600] += tone / 5.0;
            Spectrum::from_density(50e3, 10_000, d, 100).unwrap()
        };
        (mk(floor_hot, tone_hot, 0), mk(floor_cold, tone_cold, 7))
    }

    proptest! {
        #[test]
        fn ratio_is_reciprocal(
            fh in 1e-5f64..1e-3, fc in 1e-5f64..1e-3, th in 0.01f64..1.0, tc in 0.01f64..1.0,
            jitter in proptest::collection::vec(-0.3f64..0.3, 13),
        ) {
            let (hot, cold) = synthetic_pair(fh, fc, th, tc, &jitter);
            let a = power_ratio(&hot, &cold, (500.0, 1500.0), 3000.0, 3).unwrap();
            let b = power_ratio(&cold, &hot, (500.0, 1500.0), 3000.0, 3).unwrap();
            prop_assert!((a * b - 1.0).abs() < 1e-9);
        }

        #[test]
        fn ratio_invariant_to_common_scale(
            fh in 1e-5f64..1e-3, fc in 1e-5f64..1e-3, th in 0.01f64..1.0, tc in 0.01f64..1.0,
            k in 1e-3f64..1e3,
            jitter in proptest::collection::vec(-0.3f64..0.3, 13),
        ) {
            let (hot, cold) = synthetic_pair(fh, fc, th, tc, &jitter);
            let (hot_k, cold_k) = synthetic_pair(fh * k, fc * k, th * k, tc * k, &jitter);
            let a = power_ratio(&hot, &cold, (500.0, 1500.0), 3000.0, 3).unwrap();
            let b = power_ratio(&hot_k, &cold_k, (500.0, 1500.0), 3000.0, 3).unwrap();
            prop_assert!((a / b - 1.0).abs() < 1e-9);
        }

        #[test]
        fn normalized_band_power_scales_linearly(k in 1e-3f64..1e3, seed in 0u64..1000) {
            let x = gaussian_noise(4096, 1000.0, 1.0, seed).unwrap();
            let s = psd(&x, 256, Window::Hann, 0.5).unwrap();
            let bp = band_power(&s, 10.0, 400.0, &[(100.0, 120.0)]).unwrap();
            let bpk = band_power(&normalize_to_reference(&s, k, 1.0).unwrap(), 10.0, 400.0, &[(100.0, 120.0)]).unwrap();
            prop_assert!((bpk / bp / k - 1.0).abs() < 1e-12);
        }
    }
}
