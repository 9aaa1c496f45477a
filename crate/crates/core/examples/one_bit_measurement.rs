// Full hot/cold measurement of a 10 dB device through the comparator.

use nfbist::pipeline::{simulate_y_factor, ExperimentConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::for_device(10_000.0, 1000.0, 10.0)?;
    println!(
        "{} samples at {} Hz, FFT {}, reference {} Hz at {:.0}% of cold RMS",
        cfg.n_samples,
        cfg.sample_rate_hz,
        cfg.fft_size,
        cfg.f_ref_hz,
        100.0 * cfg.ref_amplitude
    );

    let run = simulate_y_factor(&cfg)?;
    let r = run.result();
    if let (Some(h), Some(c)) = (&r.ref_peak_hot, &r.ref_peak_cold) {
        println!(
            "reference tone power: hot {:.4e}, cold {:.4e} (bin {})",
            h.tone_power, c.tone_power, c.peak.bin
        );
    }
    println!("raw band power: hot {:.4e}, cold {:.4e}", r.band_power_hot, r.band_power_cold);
    println!(
        "Y = {:.4} (ideal {:.4}), NF = {:.2} dB over {} segments",
        r.y.unwrap_or(f64::NAN),
        cfg.ideal_y(),
        r.nf_db,
        r.n_segments
    );
    for w in &r.warnings {
        println!("warning: {w}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
