// Autocorrelation of a hard-limited Gaussian process.

use nfbist::digitizer::{arcsine_map, digitize, empirical_autocorr};
use nfbist::sigmodel::{gaussian_noise, SampledSignal};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 200_000;
    let phi: f64 = 0.8;
    let drive = gaussian_noise(n, 1.0, (1.0 - phi * phi).sqrt(), 1)?;
    let mut x = Vec::with_capacity(n);
    let mut prev = 0.0;
    for v in drive.samples() {
        prev = phi * prev + v;
        x.push(prev);
    }
    let x = SampledSignal::new(1.0, x)?;
    let zero = SampledSignal::zeros(n, 1.0)?;

    let bits = digitize(&x, &zero)?;
    let r = empirical_autocorr(&bits, 8)?;
    println!("{:>4} {:>8} {:>10} {:>10}", "lag", "rho", "predicted", "measured");
    for (lag, got) in r.iter().enumerate() {
        let rho = phi.powi(lag as i32);
        println!("{lag:>4} {rho:>8.4} {:>10.4} {got:>10.4}", arcsine_map(rho)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
