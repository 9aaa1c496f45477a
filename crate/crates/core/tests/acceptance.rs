//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any failed.
//!
//! cargo test -p nfbist --test acceptance

use std::process::ExitCode;
use std::time::Instant;

use nfbist::capture::{decode_capture, write_capture_to};
use nfbist::digitizer::{arcsine_map, digitize, empirical_autocorr, BitStream};
use nfbist::nfcore::{f_from_y_temps, f_to_nf, ideal_y, nf_to_f};
use nfbist::pipeline::{
    gain_sensitivity_study, run_y_factor_experiment, sweep_reference_amplitude, th_uncertainty_study,
    ExperimentConfig, GainStudyMethod,
};
use nfbist::sigmodel::{gaussian_noise, SampledSignal};
use nfbist::spectral::{psd, Window};
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn y_factor_algebra() -> Outcome {
    let cases = [
        (3.4866, Some(10.03), Some(10.01)),
        (3.4766, Some(10.08), None),
        (3.5620, Some(9.66), Some(9.85)),
    ];
    let mut detail = Vec::new();
    let mut ok = true;
    for (y, f_want, nf_want) in cases {
        let r = f_from_y_temps(y, 10_000.0, 1000.0, 290.0).map_err(e)?;
        if let Some(w) = f_want {
            ok &= (r.f - w).abs() <= 0.01;
        }
        if let Some(w) = nf_want {
            ok &= (r.nf_db - w).abs() <= 0.01;
        }
        detail.push(format!("Y={y} F={:.4} NF={:.4}", r.f, r.nf_db));
    }
    check(ok, detail.join("; "))
}

fn end_to_end_one_bit() -> Outcome {
    let base = ExperimentConfig::for_device(10_000.0, 1000.0, 10.0).map_err(e)?;
    let y_ideal = base.ideal_y();
    let mut within = 0;
    let mut errors = Vec::new();
    let mut nfs = Vec::new();
    for seed in 0..10 {
        let r = run_y_factor_experiment(&base.clone().with_seed(seed)).map_err(e)?;
        let y = r.y.ok_or("no Y estimate")?;
        errors.push((y - y_ideal).abs() / y_ideal);
        nfs.push(r.nf_db);
        if (r.nf_db - 10.0).abs() <= 0.5 {
            within += 1;
        }
    }
    let mean_err = errors.iter().sum::<f64>() / errors.len() as f64;
    let (lo, hi) = nfs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    check(
        within >= 8 && mean_err <= 0.05,
        format!("{within}/10 seeds within 10.0 +- 0.5 dB (NF {lo:.2}..{hi:.2}), mean ratio error {:.2}%", 100.0 * mean_err),
    )
}

fn arcsine_law() -> Outcome {
    // AR(1) input against an independent Gaussian dither of equal power:
    // the comparator sees rho(k) = 0.9^k / 2 for k >= 1
    let n = 1_000_000;
    let phi: f64 = 0.9;
    let drive = gaussian_noise(n, 1.0, (1.0 - phi * phi).sqrt(), 11).map_err(e)?;
    let mut x = Vec::with_capacity(n);
    let mut prev = 0.0;
    for (i, v) in drive.samples().iter().enumerate() {
        prev = if i == 0 { v / (1.0 - phi * phi).sqrt() } else { phi * prev + v };
        x.push(prev);
    }
    let x = SampledSignal::new(1.0, x).map_err(e)?;
    let dither = gaussian_noise(n, 1.0, 1.0, 12).map_err(e)?;
    let r = empirical_autocorr(&digitize(&x, &dither).map_err(e)?, 20).map_err(e)?;
    let mut worst: f64 = 0.0;
    for (lag, got) in r.iter().enumerate() {
        let rho = if lag == 0 { 1.0 } else { phi.powi(lag as i32) / 2.0 };
        worst = worst.max((got - arcsine_map(rho).map_err(e)?).abs());
    }
    check(worst <= 0.02, format!("max deviation {worst:.4} over lags 0-20"))
}

fn amplitude_u_curve() -> Outcome {
    let cfg = ExperimentConfig::for_device(10_000.0, 1000.0, 10.0).map_err(e)?;
    let fractions = [0.02, 0.1, 0.25, 0.4, 1.0, 1.5];
    let pts = sweep_reference_amplitude(&cfg, &fractions, 10).map_err(e)?;
    // a point with no surviving seed has infinite error
    let err = |i: usize| if pts[i].n_ok == 0 { f64::INFINITY } else { pts[i].mean_error };
    let mid = [1, 2, 3];
    let ok = mid.iter().all(|&i| err(i) < err(0) && err(i) < err(5));
    let row: Vec<String> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| format!("{}:{:.2}%", p.fraction, 100.0 * err(i)))
        .collect();
    check(ok, row.join(" "))
}

fn gain_contrast() -> Outcome {
    let cfg = ExperimentConfig::for_device(10_000.0, 1000.0, 10.0).map_err(e)?;
    let rows = gain_sensitivity_study(&cfg, &[10f64.powf(0.1)]).map_err(e)?;
    let bias = |m| rows.iter().find(|r| r.method == m).map(|r| r.nf_bias_db).ok_or("missing row");
    let direct = bias(GainStudyMethod::Direct)?;
    let yf = bias(GainStudyMethod::YFactor)?;
    check(
        (direct - 1.0).abs() <= 1e-9 && yf == 0.0,
        format!("direct bias {direct:.12} dB, Y-factor bias {yf:e} dB"),
    )
}

fn hot_temperature_error() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for f in [2.0, 10.0] {
        let cfg = ExperimentConfig::for_device(2900.0, 290.0, 10.0 * f64::log10(f)).map_err(e)?;
        for (err, d) in th_uncertainty_study(&cfg, &[-0.05, 0.05]).map_err(e)? {
            ok &= d.abs() <= 0.3;
            detail.push(format!("F={f} {:+}%: {d:+.4} dB", 100.0 * err));
        }
    }
    check(ok, detail.join("; "))
}

fn error_bound_property() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for nf in [3.7, 6.5, 10.1, 16.2] {
        let base = ExperimentConfig::for_device(2900.0, 290.0, nf).map_err(e)?;
        let mut w: f64 = 0.0;
        for seed in 0..10 {
            let r = run_y_factor_experiment(&base.clone().with_seed(seed)).map_err(e)?;
            let err = if r.nf_db.is_finite() { (r.nf_db - nf).abs() } else { f64::INFINITY };
            w = w.max(err);
        }
        detail.push(format!("NF {nf}: max |err| {w:.2} dB"));
        worst = worst.max(w);
    }
    check(worst <= 2.0, detail.join("; "))
}

fn numerical_hygiene() -> Outcome {
    let mut detail = Vec::new();

    let x = gaussian_noise(1_000_000, 50_000.0, 1.3, 21).map_err(e)?;
    let s = psd(&x, 10_000, Window::Rectangular, 0.0).map_err(e)?;
    let parseval = s.total_power() / x.power();
    let hann = psd(&x, 10_000, Window::Hann, 0.5).map_err(e)?.total_power() / x.power();
    let mut ok = (parseval - 1.0).abs() <= 0.01 && (hann - 1.0).abs() <= 0.01;
    detail.push(format!("Parseval rect {parseval:.5}, hann {hann:.5}"));

    let mut worst_nf: f64 = 0.0;
    let mut worst_y: f64 = 0.0;
    for i in 0..1000 {
        let f = 1.0 + i as f64 * 0.05;
        worst_nf = worst_nf.max((nf_to_f(f_to_nf(f).map_err(e)?) / f - 1.0).abs());
        let y = ideal_y(f, 10_000.0, 1000.0, 290.0);
        worst_y = worst_y.max((f_from_y_temps(y, 10_000.0, 1000.0, 290.0).map_err(e)?.f / f - 1.0).abs());
    }
    ok &= worst_nf <= 1e-12 && worst_y <= 1e-12;
    detail.push(format!("round trips {worst_nf:.1e}, {worst_y:.1e}"));

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    let mut lossless = true;
    for n in [1usize, 7, 8, 9, 1000, 123_457, 10_000_000] {
        let bits: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let b = BitStream::new(rng.random_range(1.0..1e9), bits).map_err(e)?;
        let mut buf = Vec::new();
        write_capture_to(&mut buf, &b).map_err(e)?;
        lossless &= decode_capture(&buf).map_err(e)? == b;
    }
    ok &= lossless;
    detail.push(format!("capture round trip lossless up to 1e7 bits: {lossless}"));
    check(ok, detail.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 Y-factor algebra", y_factor_algebra),
        ("2 end-to-end one-bit estimate", end_to_end_one_bit),
        ("3 arcsine law", arcsine_law),
        ("4 reference amplitude U-curve", amplitude_u_curve),
        ("5 gain sensitivity contrast", gain_contrast),
        ("6 hot temperature uncertainty", hot_temperature_error),
        ("7 2 dB error bound", error_bound_property),
        ("8 numerical hygiene", numerical_hygiene),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS  {name}: {d} ({secs:.1}s)"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d} ({secs:.1}s)");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
