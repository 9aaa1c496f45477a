//! Monte Carlo checks of the digitizer and spectral stages against closed
//! forms: the arcsine law and the Gaussian-CDF tone transfer of a
//! comparator driven by a square reference.

use nfbist::digitizer::{arcsine_map, digitize, empirical_autocorr};
use nfbist::dut::{apply_dut, DutSpec};
use nfbist::pipeline::{simulate_y_factor, ExperimentConfig};
use nfbist::sigmodel::{gaussian_noise, square_wave, SampledSignal};
use nfbist::spectral::{band_power, find_reference_peak, psd, tone_power, Window};
use statrs::function::erf::erf;

const N: usize = 1_000_000;
const FS: f64 = 50_000.0;

/// Square-wave amplitude of the comparator response: E[bit | ref = +A]
/// for input `noise` against reference `+-A`.
fn bit_response_amplitude(sigma: f64, a: f64, seed: u64) -> f64 {
    let noise = gaussian_noise(N, FS, sigma, seed).unwrap();
    let reference = square_wave(N, FS, 3000.0, a, 0.0).unwrap();
    let bits = digitize(&noise, &reference).unwrap();
    let corr: f64 = bits
        .bits()
        .iter()
        .zip(reference.samples())
        .map(|(&b, &r)| b as f64 * r.signum())
        .sum::<f64>()
        / N as f64;
    -corr
}

#[test]
fn tone_transfer_follows_gaussian_cdf() {
    for (i, ratio) in [0.2, 0.5, 1.0, 1.5].into_iter().enumerate() {
        let measured = bit_response_amplitude(1.0, ratio, 100 + i as u64);
        let expected = erf(ratio / 2f64.sqrt());
        assert!(
            (measured / expected - 1.0).abs() < 0.02,
            "A/sigma = {ratio}: {measured} vs {expected}"
        );
    }
}

#[test]
fn tone_transfer_is_linear_for_small_references() {
    let slope = (2.0 / std::f64::consts::PI).sqrt();
    for x in [0.01, 0.05, 0.1, 0.15, 0.2] {
        let exact = erf(x / 2f64.sqrt());
        assert!((exact / (slope * x) - 1.0).abs() < 0.01, "{x}");
    }
}

#[test]
fn arcsine_law_for_exponential_correlation() {
    // AR(1) with coefficient 0.9, unit variance, on the input; independent
    // white dither of equal power on the reference. Combined normalized
    // correlation at lag k >= 1 is 0.9^k / 2.
    let phi: f64 = 0.9;
    let drive = gaussian_noise(N, 1.0, (1.0 - phi * phi).sqrt(), 5).unwrap();
    let mut x = Vec::with_capacity(N);
    let mut prev = 0.0;
    for (i, e) in drive.samples().iter().enumerate() {
        prev = if i == 0 { e / (1.0 - phi * phi).sqrt() } else { phi * prev + e };
        x.push(prev);
    }
    let x = SampledSignal::new(1.0, x).unwrap();
    let dither = gaussian_noise(N, 1.0, 1.0, 6).unwrap();
    let r = empirical_autocorr(&digitize(&x, &dither).unwrap(), 20).unwrap();
    for (lag, &got) in r.iter().enumerate() {
        let rho = if lag == 0 { 1.0 } else { phi.powi(lag as i32) / 2.0 };
        let want = arcsine_map(rho).unwrap();
        assert!((got - want).abs() < 0.02, "lag {lag}: {got} vs {want}");
    }
}

#[test]
fn noiseless_device_scales_the_spectrum() {
    let x = gaussian_noise(N, FS, 1.0, 8).unwrap();
    let y = apply_dut(&DutSpec::new(3.0, 0.0, 1.0).unwrap(), &x, 0).unwrap();
    let sx = psd(&x, 10_000, Window::Rectangular, 0.0).unwrap();
    let sy = psd(&y, 10_000, Window::Rectangular, 0.0).unwrap();
    for (a, b) in sx.psd().iter().zip(sy.psd()) {
        assert!((b / a - 3.0).abs() < 1e-9);
    }
}

fn ten_db_run(seed: u64) -> nfbist::pipeline::YFactorRun {
    let cfg = ExperimentConfig::for_device(10_000.0, 1000.0, 10.0).unwrap().with_seed(seed);
    simulate_y_factor(&cfg).unwrap()
}

/// Comparator response amplitudes for the 10 dB device with a reference
/// at 25 % of the cold RMS.
fn ten_db_response() -> (f64, f64) {
    let (cold, hot) = (1000.0 + 2610.0, 10_000.0 + 2610.0);
    let a = 0.25 * f64::sqrt(cold);
    (
        erf(a / f64::sqrt(hot) / 2f64.sqrt()),
        erf(a / f64::sqrt(cold) / 2f64.sqrt()),
    )
}

#[test]
fn reference_peaks_follow_noise_level() {
    let (a_hot, a_cold) = ten_db_response();
    let mut ratios = Vec::new();
    for seed in 0..5 {
        let run = ten_db_run(seed);
        let hot = &run.analysis.hot_spectrum;
        let cold = &run.analysis.cold_spectrum;
        let ph = find_reference_peak(hot, 3000.0, 5).unwrap();
        let pc = find_reference_peak(cold, 3000.0, 5).unwrap();
        assert_eq!(ph.bin, pc.bin);
        assert_eq!(ph.bin, 600);
        let th = tone_power(hot, &ph, 3, 23).unwrap();
        let tc = tone_power(cold, &pc, 3, 23).unwrap();
        ratios.push(tc / th);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let expected = (a_cold / a_hot).powi(2);
    assert!((mean / expected - 1.0).abs() < 0.03, "{mean} vs {expected}");
}

#[test]
fn normalized_floors_estimate_the_noise_ratio() {
    // bits carry a square wave of amplitude a over a white floor of power
    // 1 - a^2, so equalizing tone powers leaves the floors in the ratio
    // a_c^2 (1 - a_h^2) / (a_h^2 (1 - a_c^2))
    let (a_hot, a_cold) = ten_db_response();
    let oracle = a_cold.powi(2) * (1.0 - a_hot.powi(2)) / (a_hot.powi(2) * (1.0 - a_cold.powi(2)));
    let truth = 12_610.0 / 3610.0;
    assert!((oracle / truth - 1.0).abs() < 0.02);

    let ys: Vec<f64> = (0..10).map(|s| ten_db_run(s).result().y.unwrap()).collect();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    assert!((mean / oracle - 1.0).abs() < 0.015, "{mean} vs {oracle}");
}

#[test]
fn unnormalized_bit_floors_hide_the_noise_ratio() {
    // before normalization the one-bit floors are nearly equal
    let run = ten_db_run(3);
    let h = band_power(&run.analysis.hot_spectrum, 500.0, 1500.0, &[]).unwrap();
    let c = band_power(&run.analysis.cold_spectrum, 500.0, 1500.0, &[]).unwrap();
    assert!((h / c - 1.0).abs() < 0.05, "{}", h / c);
}
