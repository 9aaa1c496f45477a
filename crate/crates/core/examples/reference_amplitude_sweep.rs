// How the reference amplitude affects the power-ratio estimate.

use nfbist::pipeline::{sweep_reference_amplitude, ExperimentConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::for_device(10_000.0, 1000.0, 10.0)?;
    let fractions = [0.02, 0.1, 0.25, 0.4, 1.0, 1.5];
    let points = sweep_reference_amplitude(&cfg, &fractions, 3)?;
    println!("{:>9} {:>12} {:>10} {:>7}", "fraction", "mean error", "std", "failed");
    for p in points {
        println!(
            "{:>9} {:>11.2}% {:>9.2}% {:>7}",
            p.fraction,
            100.0 * p.mean_error,
            100.0 * p.std_error,
            p.n_failed
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
