//! Noise figure measurement through a one-bit comparator digitizer.
//!
//! A calibrated noise source drives the device under test in a hot and a
//! cold state. The device output is compared against a constant-amplitude
//! square-wave reference by a single comparator; the resulting bitstreams
//! are turned into power spectra, normalized so the reference tone has the
//! same power in both, and the in-band noise ratio gives the Y factor and
//! from it the noise figure.
//!
//! Modules, bottom up:
//!
//! - [`sigmodel`]: thermal noise and square-wave reference synthesis
//! - [`dut`]: device model and op-amp noise figure
//! - [`digitizer`]: comparator, bitstreams, arcsine law
//! - [`spectral`]: PSD estimation, reference normalization, band power
//! - [`nfcore`]: noise figure algebra
//! - [`pipeline`]: end-to-end experiments and sensitivity studies
//! - [`capture`], [`config`], [`report`], [`cli`]: file formats and the
//!   command-line front end

pub mod capture;
pub mod cli;
pub mod config;
pub mod digitizer;
pub mod dut;
pub mod error;
pub mod nfcore;
pub mod pipeline;
pub mod report;
pub mod sigmodel;
pub mod spectral;

pub use digitizer::{arcsine_map, decimate, digitize, empirical_autocorr, BitStream, Series};
pub use dut::{apply_dut, dut_from_nf, nominal_f, opamp_noise_figure, DutSpec, OpampNoiseModel};
pub use error::{Error, Result};
pub use nfcore::{
    f_from_y_powers, f_from_y_temps, f_to_nf, friis_cascade, ideal_y, nf_to_f, NoiseFigureResult,
};
pub use pipeline::{ExperimentConfig, MeasurementResult};
pub use sigmodel::{gaussian_noise, mix, source_output, square_wave, NoiseSourceSpec, SampledSignal, SourceState};
pub use spectral::{band_power, find_reference_peak, normalize_to_reference, power_ratio, psd, Spectrum, Window};
