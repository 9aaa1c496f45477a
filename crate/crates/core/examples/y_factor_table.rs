// Noise figure from measured hot/cold power ratios.

use nfbist::nfcore::{f_from_y_powers, f_from_y_temps, ideal_y, nf_to_f};

const TH: f64 = 10_000.0;
const TC: f64 = 1000.0;
const T0: f64 = 290.0;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("ideal Y for a 10 dB device: {:.5}", ideal_y(nf_to_f(10.0), TH, TC, T0));
    println!("{:>8} {:>8} {:>8}", "Y", "F", "NF dB");
    for y in [3.4866, 3.4766, 3.5620] {
        let r = f_from_y_temps(y, TH, TC, T0)?;
        println!("{y:>8.4} {:>8.4} {:>8.3}", r.f, r.nf_db);
    }

    // the same computation with the source calibrated in powers relative to T0
    let r = f_from_y_powers(3.4766, TH / T0, TC / T0, 1.0)?;
    println!("power form, Y = 3.4766: F = {:.4}", r.f);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
