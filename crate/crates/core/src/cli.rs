//! Command-line front end: `simulate`, `analyze`, `sweep` and `psd`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 file or format error,
//! 4 numeric or degenerate-measurement error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::capture::{read_capture, write_capture};
use crate::config::{load_config, FlatConfig};
use crate::error::{Error, Result};
use crate::pipeline::{
    analyze_bitstreams, gain_sensitivity_study, nominal_nf_db, simulate_y_factor, sweep_reference_amplitude,
    th_uncertainty_study, ExperimentConfig,
};
use crate::report::{
    amplitude_sweep_csv, gain_csv, spectrum_csv, th_error_csv, write_text, ReportConfig, ReportDocument,
};
use crate::spectral::{psd, Window};

#[derive(Debug, Parser)]
#[command(name = "nfbist", version, about = "Noise figure estimation through a one-bit comparator digitizer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WindowArg {
    Rect,
    Hann,
}

impl From<WindowArg> for Window {
    fn from(w: WindowArg) -> Self {
        match w {
            WindowArg::Rect => Window::Rectangular,
            WindowArg::Hann => Window::Hann,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    /// Power-ratio error versus reference amplitude.
    RefAmplitude,
    /// NF shift versus relative hot-temperature error (closed form).
    ThError,
    /// Direct versus Y-factor NF bias under amplifier gain drift.
    Gain,
}

#[derive(Debug, clap::Args)]
pub struct SpectralArgs {
    /// Window for the averaged periodogram.
    #[arg(long, value_enum)]
    pub window: Option<WindowArg>,
    /// Fractional overlap between periodogram segments, 0 to 0.75.
    #[arg(long = "segments-overlap")]
    pub segments_overlap: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a hot/cold acquisition and estimate the noise figure.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the hot and cold bitstreams as NFB1 captures.
        #[arg(long)]
        write_captures: bool,
        #[command(flatten)]
        spectral: SpectralArgs,
    },
    /// Estimate the noise figure from recorded hot and cold captures.
    Analyze {
        hot: PathBuf,
        cold: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        spectral: SpectralArgs,
    },
    /// Run a sensitivity sweep and write one CSV row per point.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        kind: SweepKind,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
        /// Sweep points; defaults depend on the kind.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Option<Vec<f64>>,
        /// Seeds averaged per point (ref-amplitude sweep).
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        spectral: SpectralArgs,
    },
    /// Write the PSD of a capture as CSV.
    Psd {
        capture: PathBuf,
        #[arg(long, default_value_t = ExperimentConfig::DEFAULT_FFT_SIZE)]
        fft_size: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        spectral: SpectralArgs,
    },
}

pub const DEFAULT_AMPLITUDE_POINTS: [f64; 6] = [0.02, 0.1, 0.25, 0.4, 1.0, 1.5];
pub const DEFAULT_TH_ERROR_POINTS: [f64; 3] = [-0.05, 0.0, 0.05];
pub const DEFAULT_GAIN_POINTS: [f64; 3] = [1.0, 1.122_018_454_301_963_4, 0.794_328_234_724_281_5];

fn apply_spectral(cfg: &mut ExperimentConfig, s: &SpectralArgs) -> Result<()> {
    if let Some(w) = s.window {
        cfg.window = w.into();
    }
    if let Some(o) = s.segments_overlap {
        cfg.overlap_fraction = o;
    }
    cfg.validate()
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn cmd_simulate(
    config_path: &Path,
    out_dir: &Path,
    seed: Option<u64>,
    write_captures: bool,
    spectral: &SpectralArgs,
) -> Result<ReportDocument> {
    let mut cfg = load_config(config_path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    apply_spectral(&mut cfg, spectral)?;
    let run = simulate_y_factor(&cfg)?;
    create_dir(out_dir)?;

    let mut report = ReportDocument::new(
        "simulate",
        ReportConfig::Experiment(FlatConfig::from(&cfg)),
        run.analysis.result.clone(),
    );
    report.nominal_nf_db = Some(nominal_nf_db(&cfg));
    report.ideal_y = Some(cfg.ideal_y());
    write_text(out_dir.join("hot_psd.csv"), &spectrum_csv(&run.analysis.hot_spectrum))?;
    write_text(out_dir.join("cold_psd.csv"), &spectrum_csv(&run.analysis.cold_spectrum))?;
    report.files.hot_psd_csv = Some("hot_psd.csv".into());
    report.files.cold_psd_csv = Some("cold_psd.csv".into());
    if write_captures {
        if let (Some(h), Some(c)) = (&run.hot_bits, &run.cold_bits) {
            write_capture(out_dir.join("hot.nfb"), h)?;
            write_capture(out_dir.join("cold.nfb"), c)?;
            report.files.hot_capture = Some("hot.nfb".into());
            report.files.cold_capture = Some("cold.nfb".into());
        }
    }
    write_text(out_dir.join("report.json"), &report.to_json())?;
    Ok(report)
}

pub fn cmd_analyze(
    hot_capture: &Path,
    cold_capture: &Path,
    config_path: &Path,
    out_dir: &Path,
    spectral: &SpectralArgs,
) -> Result<ReportDocument> {
    let mut cfg = load_config(config_path)?;
    apply_spectral(&mut cfg, spectral)?;
    let hot = read_capture(hot_capture)?;
    let cold = read_capture(cold_capture)?;
    let settings = cfg.analysis();
    let analysis = analyze_bitstreams(&hot, &cold, &settings)?;
    create_dir(out_dir)?;
    let mut report = ReportDocument::new("analyze", ReportConfig::Analysis(settings), analysis.result.clone());
    write_text(out_dir.join("hot_psd.csv"), &spectrum_csv(&analysis.hot_spectrum))?;
    write_text(out_dir.join("cold_psd.csv"), &spectrum_csv(&analysis.cold_spectrum))?;
    report.files.hot_psd_csv = Some("hot_psd.csv".into());
    report.files.cold_psd_csv = Some("cold_psd.csv".into());
    report.files.hot_capture = Some(hot_capture.display().to_string());
    report.files.cold_capture = Some(cold_capture.display().to_string());
    write_text(out_dir.join("report.json"), &report.to_json())?;
    Ok(report)
}

pub fn cmd_sweep(
    config_path: &Path,
    kind: SweepKind,
    out_csv: &Path,
    points: Option<&[f64]>,
    seeds: usize,
    seed: Option<u64>,
    spectral: &SpectralArgs,
) -> Result<String> {
    let mut cfg = load_config(config_path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    apply_spectral(&mut cfg, spectral)?;
    let csv = match kind {
        SweepKind::RefAmplitude => {
            let pts = points.unwrap_or(&DEFAULT_AMPLITUDE_POINTS);
            amplitude_sweep_csv(&sweep_reference_amplitude(&cfg, pts, seeds)?)
        }
        SweepKind::ThError => {
            let pts = points.unwrap_or(&DEFAULT_TH_ERROR_POINTS);
            th_error_csv(&th_uncertainty_study(&cfg, pts)?)
        }
        SweepKind::Gain => {
            let pts = points.unwrap_or(&DEFAULT_GAIN_POINTS);
            gain_csv(&gain_sensitivity_study(&cfg, pts)?)
        }
    };
    write_text(out_csv, &csv)?;
    Ok(csv)
}

pub fn cmd_psd(capture_path: &Path, fft_size: usize, out_csv: &Path, spectral: &SpectralArgs) -> Result<String> {
    let bits = read_capture(capture_path)?;
    let window = spectral.window.map(Window::from).unwrap_or_default();
    let s = psd(&bits, fft_size, window, spectral.segments_overlap.unwrap_or(0.0))?;
    let csv = spectrum_csv(&s);
    write_text(out_csv, &csv)?;
    Ok(csv)
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            seed,
            write_captures,
            spectral,
        } => {
            let r = cmd_simulate(&config, &out, seed, write_captures, &spectral)?;
            print_summary(&r);
        }
        Command::Analyze {
            hot,
            cold,
            config,
            out,
            spectral,
        } => {
            let r = cmd_analyze(&hot, &cold, &config, &out, &spectral)?;
            print_summary(&r);
        }
        Command::Sweep {
            config,
            kind,
            out,
            points,
            seeds,
            seed,
            spectral,
        } => {
            let csv = cmd_sweep(&config, kind, &out, points.as_deref(), seeds, seed, &spectral)?;
            print!("{csv}");
        }
        Command::Psd {
            capture,
            fft_size,
            out,
            spectral,
        } => {
            cmd_psd(&capture, fft_size, &out, &spectral)?;
        }
    }
    Ok(())
}

fn print_summary(r: &ReportDocument) {
    let y = r.result.y.map_or("-".to_string(), |y| format!("{y:.4}"));
    println!("Y = {y}  F = {:.4}  NF = {:.3} dB", r.result.f, r.result.nf_db);
    for w in &r.result.warnings {
        eprintln!("warning: {w}");
    }
}

/// Parse `args` (program name first) and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
