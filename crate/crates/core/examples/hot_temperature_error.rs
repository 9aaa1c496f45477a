// NF error caused by a miscalibrated hot temperature.

use nfbist::pipeline::{th_uncertainty_study, ExperimentConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let errors = [-0.1, -0.05, -0.02, 0.0, 0.02, 0.05, 0.1];
    for nf in [3.0, 10.0, 16.0] {
        let cfg = ExperimentConfig::for_device(2900.0, 290.0, nf)?;
        let rows = th_uncertainty_study(&cfg, &errors)?;
        let cells: Vec<String> = rows.iter().map(|(e, d)| format!("{:+.0}%:{d:+.3}", 100.0 * e)).collect();
        println!("NF {nf:>4} dB  {}", cells.join("  "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
