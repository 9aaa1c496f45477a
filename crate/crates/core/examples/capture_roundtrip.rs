// Record a hot/cold pair to capture files and analyze them offline.

use nfbist::capture::{read_capture, write_capture};
use nfbist::pipeline::{analyze_bitstreams, simulate_y_factor, ExperimentConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::for_device(10_000.0, 1000.0, 10.0)?.with_seed(3);
    let run = simulate_y_factor(&cfg)?;
    let (hot, cold) = match (&run.hot_bits, &run.cold_bits) {
        (Some(h), Some(c)) => (h, c),
        _ => return Err("one-bit acquisition expected".into()),
    };

    let dir = tempfile::tempdir()?;
    let (hot_path, cold_path) = (dir.path().join("hot.nfb"), dir.path().join("cold.nfb"));
    write_capture(&hot_path, hot)?;
    write_capture(&cold_path, cold)?;
    println!(
        "{} bits -> {} bytes per capture",
        hot.len(),
        std::fs::metadata(&hot_path)?.len()
    );

    let (h, c) = (read_capture(&hot_path)?, read_capture(&cold_path)?);
    assert!(h == *hot && c == *cold);
    let offline = analyze_bitstreams(&h, &c, &cfg.analysis())?;
    println!(
        "live NF {:.4} dB, offline NF {:.4} dB",
        run.result().nf_db,
        offline.result.nf_db
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
