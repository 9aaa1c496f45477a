// Amplifier gain drift: direct method against the Y-factor method.

use nfbist::nfcore::direct_gain_error_db;
use nfbist::pipeline::{gain_sensitivity_study, ExperimentConfig, GainStudyMethod};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::for_device(10_000.0, 1000.0, 10.0)?;
    let ratios: Vec<f64> = [-1.0, -0.5, 0.5, 1.0].iter().map(|db| 10f64.powf(db / 10.0)).collect();
    let rows = gain_sensitivity_study(&cfg, &ratios)?;
    println!("{:>10} {:>10} {:>10} {:>10}", "drift dB", "expected", "direct", "Y-factor");
    for r in &ratios {
        let bias = |m| rows.iter().find(|x| x.method == m && x.gain_ratio == *r).map(|x| x.nf_bias_db);
        println!(
            "{:>10.2} {:>10.4} {:>10.4} {:>10.4}",
            10.0 * r.log10(),
            direct_gain_error_db(*r)?,
            bias(GainStudyMethod::Direct).unwrap_or(f64::NAN),
            bias(GainStudyMethod::YFactor).unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
