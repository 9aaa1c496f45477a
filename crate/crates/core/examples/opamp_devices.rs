// Op-amp stages: noise figure from noise densities, cascades, and a
// simulated one-bit measurement of each.

use nfbist::dut::{opamp_noise_figure, OpampNoiseModel};
use nfbist::nfcore::{f_to_nf, friis_cascade, nf_to_f};
use nfbist::pipeline::{run_y_factor_experiment, ExperimentConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // illustrative densities, driven from 1 kOhm with a 100 Ohm feedback network
    let parts = [
        ("low-noise bipolar", 1.1e-9, 1.7e-12),
        ("general purpose", 8e-9, 0.2e-12),
        ("JFET input", 18e-9, 0.01e-12),
        ("CMOS", 25e-9, 0.001e-12),
    ];
    let mut stages = Vec::new();
    println!("{:>18} {:>8} {:>9} {:>8}", "stage", "NF dB", "measured", "error");
    for (i, (name, en, inoise)) in parts.iter().enumerate() {
        let nf = opamp_noise_figure(&OpampNoiseModel {
            en_v_per_rthz: *en,
            in_a_per_rthz: *inoise,
            rs_ohm: 1000.0,
            req_ohm: 100.0,
            temperature_k: 290.0,
        })?;
        let cfg = ExperimentConfig::for_device(2900.0, 290.0, nf)?.with_seed(i as u64);
        let got = run_y_factor_experiment(&cfg)?.nf_db;
        println!("{name:>18} {nf:>8.2} {got:>9.2} {:>+8.2}", got - nf);
        stages.push(nf_to_f(nf));
    }

    // a quiet first stage with 20 dB of gain masks a noisy second stage
    let quiet_first = friis_cascade(&[(stages[0], 100.0), (stages[3], 1.0)])?;
    let noisy_first = friis_cascade(&[(stages[3], 100.0), (stages[0], 1.0)])?;
    println!(
        "cascade NF: quiet stage first {:.2} dB, noisy stage first {:.2} dB",
        f_to_nf(quiet_first)?,
        f_to_nf(noisy_first)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
