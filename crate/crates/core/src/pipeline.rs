//! End-to-end experiments: hot/cold acquisition through the device and the
//! one-bit digitizer, spectral processing and noise figure estimation, plus
//! the sensitivity studies built on top of them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digitizer::{digitize, BitStream};
use crate::dut::{apply_dut, nominal_f, DutSpec};
use crate::error::{Error, Result};
use crate::nfcore::{f_direct, f_from_y_temps, f_to_nf, ideal_y, NfMethod, NfStatus, NoiseFigureResult, BOLTZMANN};
use crate::sigmodel::{derive_seed, gaussian_noise, source_output, square_wave, NoiseSourceSpec, SampledSignal, SourceState};
use crate::spectral::{band_bins, band_power, power_ratio_with, psd, RatioSettings, ReferenceMeasurement, Spectrum, Window};

/// Where the comparator-node signal is observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acquisition {
    /// Square-wave reference on the comparator, bitstream analyzed.
    #[default]
    OneBit,
    /// Multi-bit samples of the comparator input, no reference injected.
    Analog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: NoiseSourceSpec,
    pub dut: DutSpec,
    pub sample_rate_hz: f64,
    pub n_samples: usize,
    pub fft_size: usize,
    pub f_ref_hz: f64,
    /// Reference amplitude as a fraction of the cold-state RMS at the comparator.
    pub ref_amplitude: f64,
    pub band_hz: (f64, f64),
    pub ref_exclusion_halfwidth_bins: usize,
    /// Power gain of the auxiliary amplifier between the device and the comparator.
    pub post_dut_gain_linear: f64,
    pub seed: u64,
    pub window: Window,
    pub overlap_fraction: f64,
    pub acquisition: Acquisition,
    pub floor_correction: bool,
}

impl ExperimentConfig {
    pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 50_000.0;
    pub const DEFAULT_N_SAMPLES: usize = 1_000_000;
    pub const DEFAULT_FFT_SIZE: usize = 10_000;
    pub const DEFAULT_F_REF_HZ: f64 = 3000.0;
    pub const DEFAULT_REF_AMPLITUDE: f64 = 0.25;
    pub const DEFAULT_BAND_HZ: (f64, f64) = (500.0, 1500.0);
    pub const DEFAULT_REF_EXCLUSION: usize = 3;

    /// Configuration with the default acquisition parameters: 1e6 samples
    /// at 50 kHz, FFT size 1e4, 3 kHz reference at 25 % of the cold RMS and
    /// a 500-1500 Hz measurement band.
    pub fn new(source: NoiseSourceSpec, dut: DutSpec) -> Self {
        Self {
            source,
            dut,
            sample_rate_hz: Self::DEFAULT_SAMPLE_RATE_HZ,
            n_samples: Self::DEFAULT_N_SAMPLES,
            fft_size: Self::DEFAULT_FFT_SIZE,
            f_ref_hz: Self::DEFAULT_F_REF_HZ,
            ref_amplitude: Self::DEFAULT_REF_AMPLITUDE,
            band_hz: Self::DEFAULT_BAND_HZ,
            ref_exclusion_halfwidth_bins: Self::DEFAULT_REF_EXCLUSION,
            post_dut_gain_linear: 1.0,
            seed: 0,
            window: Window::Rectangular,
            overlap_fraction: 0.0,
            acquisition: Acquisition::OneBit,
            floor_correction: true,
        }
    }

    /// Hot/cold source and a device of noise figure `nf_db` with the defaults above.
    pub fn for_device(t_hot_k: f64, t_cold_k: f64, nf_db: f64) -> Result<Self> {
        let band = Self::DEFAULT_BAND_HZ.1 - Self::DEFAULT_BAND_HZ.0;
        let source = NoiseSourceSpec::with_temperatures(t_hot_k, t_cold_k, band)?;
        let dut = crate::dut::dut_from_nf(nf_db, 1.0, band, source.t0_k(), source.power_scale())?;
        Ok(Self::new(source, dut))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn nyquist_hz(&self) -> f64 {
        self.sample_rate_hz / 2.0
    }

    /// Every violated constraint, one message per field.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let nyq = self.nyquist_hz();
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            out.push(format!("sample_rate_hz: must be positive, got {}", self.sample_rate_hz));
        }
        if self.fft_size < 2 {
            out.push(format!("fft_size: must be at least 2, got {}", self.fft_size));
        }
        if self.n_samples < self.fft_size {
            out.push(format!(
                "n_samples: {} is below fft_size {}",
                self.n_samples, self.fft_size
            ));
        }
        if !(self.f_ref_hz > 0.0 && self.f_ref_hz < nyq) {
            out.push(format!("f_ref_hz: must lie in (0, {nyq}), got {}", self.f_ref_hz));
        }
        if !(self.ref_amplitude.is_finite() && self.ref_amplitude >= 0.0) {
            out.push(format!("ref_amplitude: must be >= 0, got {}", self.ref_amplitude));
        }
        let (lo, hi) = self.band_hz;
        if !(lo > 0.0 && lo < hi && hi < nyq) {
            out.push(format!("band: need 0 < f_lo < f_hi < {nyq}, got [{lo}, {hi}]"));
        }
        if !(self.post_dut_gain_linear.is_finite() && self.post_dut_gain_linear > 0.0) {
            out.push(format!(
                "post_dut_gain_linear: must be positive, got {}",
                self.post_dut_gain_linear
            ));
        }
        if !(0.0..=0.75).contains(&self.overlap_fraction) {
            out.push(format!(
                "overlap_fraction: must lie in [0, 0.75], got {}",
                self.overlap_fraction
            ));
        }
        if self.source.t_hot_k() <= self.source.t_cold_k() {
            out.push(format!(
                "t_hot_k: must exceed t_cold_k ({} K), got {}",
                self.source.t_cold_k(),
                self.source.t_hot_k()
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }

    /// Noise factor of the configured device at the source's T0.
    pub fn nominal_f(&self) -> f64 {
        nominal_f(&self.dut, self.source.t0_k(), self.source.power_scale())
    }

    /// Y factor an error-free measurement of this device would return.
    pub fn ideal_y(&self) -> f64 {
        ideal_y(
            self.nominal_f(),
            self.source.t_hot_k(),
            self.source.t_cold_k(),
            self.source.t0_k(),
        )
    }

    /// Cold-state RMS at the comparator input, before the auxiliary amplifier.
    fn cold_rms_before_amplifier(&self) -> f64 {
        self.dut
            .output_power(self.source.noise_power(SourceState::Cold))
            .sqrt()
    }

    pub fn ratio_settings(&self) -> RatioSettings {
        match self.acquisition {
            Acquisition::OneBit => {
                let mut s = RatioSettings::with_reference(
                    self.band_hz,
                    self.f_ref_hz,
                    self.ref_exclusion_halfwidth_bins,
                );
                s.floor_correction = self.floor_correction;
                s
            }
            Acquisition::Analog => RatioSettings::without_reference(self.band_hz),
        }
    }

    pub fn analysis(&self) -> AnalysisSettings {
        AnalysisSettings {
            fft_size: self.fft_size,
            window: self.window,
            overlap_fraction: self.overlap_fraction,
            ratio: self.ratio_settings(),
            t_hot_k: self.source.t_hot_k(),
            t_cold_k: self.source.t_cold_k(),
            t0_k: self.source.t0_k(),
        }
    }
}

/// Everything the offline analysis of a hot/cold capture pair needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSettings {
    pub fft_size: usize,
    pub window: Window,
    pub overlap_fraction: f64,
    pub ratio: RatioSettings,
    pub t_hot_k: f64,
    pub t_cold_k: f64,
    pub t0_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementResult {
    pub method: NfMethod,
    pub y: Option<f64>,
    pub f: f64,
    pub nf_db: f64,
    pub status: NfStatus,
    pub ref_peak_hot: Option<ReferenceMeasurement>,
    pub ref_peak_cold: Option<ReferenceMeasurement>,
    pub band_power_hot: f64,
    pub band_power_cold: f64,
    pub n_segments: usize,
    pub warnings: Vec<String>,
}

impl MeasurementResult {
    fn from_nf(nf: NoiseFigureResult, n_segments: usize) -> Self {
        let mut warnings = Vec::new();
        match nf.status {
            NfStatus::Physical => {}
            NfStatus::BelowUnity => warnings.push(format!(
                "noise factor {:.6} is below 1 (nonphysical, estimation noise)",
                nf.f
            )),
            NfStatus::NonPositive => warnings.push(format!(
                "noise factor {:.6} is not positive; no noise figure exists",
                nf.f
            )),
        }
        Self {
            method: nf.method,
            y: nf.y,
            f: nf.f,
            nf_db: nf.nf_db,
            status: nf.status,
            ref_peak_hot: None,
            ref_peak_cold: None,
            band_power_hot: f64::NAN,
            band_power_cold: f64::NAN,
            n_segments,
            warnings,
        }
    }
}

/// Spectra and the estimate derived from them.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub result: MeasurementResult,
    pub hot_spectrum: Spectrum,
    pub cold_spectrum: Spectrum,
}

/// Complete record of a simulated Y-factor run.
#[derive(Debug, Clone)]
pub struct YFactorRun {
    pub analysis: Analysis,
    /// Comparator outputs; `None` on the analog path.
    pub hot_bits: Option<BitStream>,
    pub cold_bits: Option<BitStream>,
}

impl YFactorRun {
    pub fn result(&self) -> &MeasurementResult {
        &self.analysis.result
    }
}

enum Observed {
    Bits(BitStream),
    Analog(SampledSignal),
}

fn state_index(state: SourceState) -> u64 {
    match state {
        SourceState::Hot => 0,
        SourceState::Cold => 1,
    }
}

/// Comparator-node signal for one source state.
fn acquire(cfg: &ExperimentConfig, state: SourceState) -> Result<Observed> {
    let stream = 2 * state_index(state);
    let raw = source_output(
        &cfg.source,
        state,
        cfg.n_samples,
        cfg.sample_rate_hz,
        derive_seed(cfg.seed, stream),
    )?;
    let out = apply_dut(&cfg.dut, &raw, derive_seed(cfg.seed, stream + 1))?;
    let amp = cfg.post_dut_gain_linear.sqrt();
    let node = out.scaled(amp);
    match cfg.acquisition {
        Acquisition::Analog => Ok(Observed::Analog(node)),
        Acquisition::OneBit => {
            // the reference goes through the same multiply so the comparator
            // decisions are unchanged by a common gain
            let unit = square_wave(cfg.n_samples, cfg.sample_rate_hz, cfg.f_ref_hz, 1.0, 0.0)?;
            let level = cfg.ref_amplitude * cfg.cold_rms_before_amplifier();
            let reference = unit.scaled(level).scaled(amp);
            Ok(Observed::Bits(digitize(&node, &reference)?))
        }
    }
}

fn observed_psd(obs: &Observed, a: &AnalysisSettings) -> Result<Spectrum> {
    match obs {
        Observed::Bits(b) => psd(b, a.fft_size, a.window, a.overlap_fraction),
        Observed::Analog(x) => psd(x, a.fft_size, a.window, a.overlap_fraction),
    }
}

/// Y factor and noise figure from a hot/cold spectrum pair.
pub fn analyze_spectra(hot: Spectrum, cold: Spectrum, a: &AnalysisSettings) -> Result<Analysis> {
    let est = power_ratio_with(&hot, &cold, &a.ratio)?;
    let nf = f_from_y_temps(est.y, a.t_hot_k, a.t_cold_k, a.t0_k)?;
    let mut result = MeasurementResult::from_nf(nf, hot.n_segments());
    if est.y < 1.0 {
        result.warnings.push(format!(
            "Y = {:.6} < 1: hot and cold acquisitions may be swapped",
            est.y
        ));
    }
    result.ref_peak_hot = est.hot_reference;
    result.ref_peak_cold = est.cold_reference;
    result.band_power_hot = est.band_power_hot;
    result.band_power_cold = est.band_power_cold;
    Ok(Analysis {
        result,
        hot_spectrum: hot,
        cold_spectrum: cold,
    })
}

/// Offline analysis of two comparator captures.
pub fn analyze_bitstreams(hot: &BitStream, cold: &BitStream, a: &AnalysisSettings) -> Result<Analysis> {
    if hot.sample_rate_hz() != cold.sample_rate_hz() {
        return Err(Error::Shape(format!(
            "hot capture at {} Hz, cold capture at {} Hz",
            hot.sample_rate_hz(),
            cold.sample_rate_hz()
        )));
    }
    let (hs, cs) = rayon::join(
        || psd(hot, a.fft_size, a.window, a.overlap_fraction),
        || psd(cold, a.fft_size, a.window, a.overlap_fraction),
    );
    analyze_spectra(hs?, cs?, a)
}

/// Simulated two-step Y-factor measurement keeping every intermediate.
pub fn simulate_y_factor(cfg: &ExperimentConfig) -> Result<YFactorRun> {
    cfg.validate()?;
    let a = cfg.analysis();
    let acquire_and_transform = |state| -> Result<(Observed, Spectrum)> {
        let obs = acquire(cfg, state)?;
        let s = observed_psd(&obs, &a)?;
        Ok((obs, s))
    };
    let (hot, cold) = rayon::join(
        || acquire_and_transform(SourceState::Hot),
        || acquire_and_transform(SourceState::Cold),
    );
    let (hot_obs, hot_s) = hot?;
    let (cold_obs, cold_s) = cold?;
    let mut analysis = analyze_spectra(hot_s, cold_s, &a)?;
    if cfg.acquisition == Acquisition::OneBit && cfg.ref_amplitude > 1.0 {
        analysis.result.warnings.push(format!(
            "reference amplitude {} x cold RMS exceeds the noise level at the comparator",
            cfg.ref_amplitude
        ));
    }
    let bits = |o: Observed| match o {
        Observed::Bits(b) => Some(b),
        Observed::Analog(_) => None,
    };
    Ok(YFactorRun {
        analysis,
        hot_bits: bits(hot_obs),
        cold_bits: bits(cold_obs),
    })
}

pub fn run_y_factor_experiment(cfg: &ExperimentConfig) -> Result<MeasurementResult> {
    Ok(simulate_y_factor(cfg)?.analysis.result)
}

/// Direct-method measurement: the source is held at T0, the in-band output
/// noise on the multi-bit path is converted to watts and divided by
/// `k T0 B G` using `assumed_gain_linear` for the whole chain gain
/// (device times auxiliary amplifier).
pub fn run_direct_experiment(cfg: &ExperimentConfig, assumed_gain_linear: f64) -> Result<MeasurementResult> {
    cfg.validate()?;
    let t0 = cfg.source.t0_k();
    let scale = cfg.source.power_scale();
    let raw = gaussian_noise(
        cfg.n_samples,
        cfg.sample_rate_hz,
        (scale * t0).sqrt(),
        derive_seed(cfg.seed, 4),
    )?;
    let out = apply_dut(&cfg.dut, &raw, derive_seed(cfg.seed, 5))?;
    let node = out.scaled(cfg.post_dut_gain_linear.sqrt());
    let s = psd(&node, cfg.fft_size, cfg.window, cfg.overlap_fraction)?;
    let (lo, hi) = cfg.band_hz;
    let measured = band_power(&s, lo, hi, &[])?;
    let bandwidth = band_bins(&s, lo, hi, &[]).len() as f64 * s.bin_width_hz();
    // white noise of power scale*T over the Nyquist band is k*T watts per hertz
    let watts = measured * BOLTZMANN * cfg.nyquist_hz() / scale;
    let f = f_direct(watts, assumed_gain_linear, bandwidth, t0)?;
    let mut result = MeasurementResult::from_nf(NoiseFigureResult::new(f, None, NfMethod::Direct), s.n_segments());
    result.band_power_cold = measured;
    Ok(result)
}

/// One point of the reference-amplitude sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSweepPoint {
    pub fraction: f64,
    /// Mean of `|Y_est - Y_ideal| / Y_ideal` over the seeds that produced an estimate.
    pub mean_error: f64,
    pub std_error: f64,
    pub n_ok: usize,
    /// Seeds whose reference was lost in the noise (degenerate reference).
    pub n_failed: usize,
}

/// Power-ratio error versus reference amplitude (fraction of cold RMS),
/// averaged over `n_seeds` seeds starting at `cfg.seed`.
pub fn sweep_reference_amplitude(
    cfg: &ExperimentConfig,
    amplitudes_fraction: &[f64],
    n_seeds: usize,
) -> Result<Vec<AmplitudeSweepPoint>> {
    cfg.validate()?;
    if n_seeds == 0 {
        return Err(Error::invalid("n_seeds", "need at least one seed"));
    }
    if let Some(bad) = amplitudes_fraction.iter().find(|f| !(**f > 0.0 && f.is_finite())) {
        return Err(Error::invalid("amplitudes_fraction", format!("fractions must be > 0, got {bad}")));
    }
    let y_ideal = cfg.ideal_y();
    let jobs: Vec<(usize, u64)> = (0..amplitudes_fraction.len())
        .flat_map(|i| (0..n_seeds as u64).map(move |s| (i, s)))
        .collect();
    let outcomes: Vec<Result<Option<f64>>> = jobs
        .par_iter()
        .map(|&(i, s)| {
            let mut c = cfg.clone();
            c.ref_amplitude = amplitudes_fraction[i];
            c.seed = cfg.seed.wrapping_add(s);
            match simulate_y_factor(&c) {
                Ok(run) => Ok(run.result().y.map(|y| (y - y_ideal).abs() / y_ideal)),
                Err(Error::DegenerateReference(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut points = Vec::with_capacity(amplitudes_fraction.len());
    let mut outcomes = outcomes.into_iter();
    for &fraction in amplitudes_fraction {
        let mut errors = Vec::new();
        let mut n_failed = 0;
        for o in outcomes.by_ref().take(n_seeds) {
            match o? {
                Some(e) => errors.push(e),
                None => n_failed += 1,
            }
        }
        let n_ok = errors.len();
        let mean_error = errors.iter().sum::<f64>() / n_ok.max(1) as f64;
        let var = errors.iter().map(|e| (e - mean_error).powi(2)).sum::<f64>() / n_ok.max(1) as f64;
        points.push(AmplitudeSweepPoint {
            fraction,
            mean_error: if n_ok == 0 { f64::NAN } else { mean_error },
            std_error: var.sqrt(),
            n_ok,
            n_failed,
        });
    }
    Ok(points)
}

/// NF shift caused by a relative error in the hot temperature, evaluated in
/// closed form: the Y a device of the configured noise factor would show is
/// re-interpreted with the perturbed hot temperature.
pub fn th_uncertainty_study(cfg: &ExperimentConfig, rel_errors: &[f64]) -> Result<Vec<(f64, f64)>> {
    let (th, tc, t0) = (cfg.source.t_hot_k(), cfg.source.t_cold_k(), cfg.source.t0_k());
    let y = ideal_y(cfg.nominal_f(), th, tc, t0);
    let baseline = f_from_y_temps(y, th, tc, t0)?.nf_db;
    rel_errors
        .iter()
        .map(|&e| {
            if e.is_nan() || e.abs() >= 1.0 {
                return Err(Error::invalid("rel_errors", format!("|{e}| must be below 1")));
            }
            let shifted = f_from_y_temps(y, th * (1.0 + e), tc, t0)?;
            Ok((e, shifted.nf_db - baseline))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainStudyMethod {
    Direct,
    YFactor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainSensitivityRow {
    pub method: GainStudyMethod,
    pub gain_ratio: f64,
    /// NF with the drifted amplifier minus NF with the nominal one, same noise records.
    pub nf_bias_db: f64,
}

/// Contrast of the two methods under a drift of the auxiliary amplifier
/// gain. The direct method keeps assuming the nominal chain gain; the
/// Y-factor method needs no gain at all.
pub fn gain_sensitivity_study(cfg: &ExperimentConfig, gain_ratios: &[f64]) -> Result<Vec<GainSensitivityRow>> {
    cfg.validate()?;
    if let Some(bad) = gain_ratios.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::invalid("gain_ratios", format!("ratios must be > 0, got {bad}")));
    }
    let assumed = cfg.dut.gain_linear() * cfg.post_dut_gain_linear;
    let drifted = |r: f64| {
        let mut c = cfg.clone();
        c.post_dut_gain_linear *= r;
        c
    };
    let (direct_base, y_base) = rayon::join(
        || run_direct_experiment(cfg, assumed),
        || run_y_factor_experiment(cfg),
    );
    let (direct_base, y_base) = (direct_base?.nf_db, y_base?.nf_db);

    let rows: Vec<Result<[GainSensitivityRow; 2]>> = gain_ratios
        .par_iter()
        .map(|&r| {
            let c = drifted(r);
            let (d, y) = rayon::join(
                || run_direct_experiment(&c, assumed),
                || run_y_factor_experiment(&c),
            );
            Ok([
                GainSensitivityRow {
                    method: GainStudyMethod::Direct,
                    gain_ratio: r,
                    nf_bias_db: d?.nf_db - direct_base,
                },
                GainSensitivityRow {
                    method: GainStudyMethod::YFactor,
                    gain_ratio: r,
                    nf_bias_db: y?.nf_db - y_base,
                },
            ])
        })
        .collect();
    let mut out = Vec::with_capacity(2 * gain_ratios.len());
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

/// Noise figure of the configured device in dB.
pub fn nominal_nf_db(cfg: &ExperimentConfig) -> f64 {
    f_to_nf(cfg.nominal_f()).unwrap_or(f64::NAN)
}
