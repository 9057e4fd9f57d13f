//! The `fit`, `verify-presets` and `detect-collisions` subcommands.

use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use qwalk_core::coin::{
    closed_form_coin, dft_coin, dft_prime_coin, fit_params, grover_coin, permute_lu, synthesize_coin, FitConfig,
    FitOutcome,
};
use qwalk_core::io::{params_to_string, parse_coin_json};
use qwalk_core::spectral::{detect_collisions, Frequency};
use qwalk_core::walk::Site;
use qwalk_core::{Coin, Params};

use crate::config::{ConfigError, Encoding};
use crate::{EXIT_COLLISION, EXIT_NOT_REACHABLE};

pub fn fit(
    target: &Path,
    out: &Path,
    seed: u64,
    starts: usize,
    max_iterations: usize,
    threshold: f64,
) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(target).with_context(|| format!("reading target {}", target.display()))?;
    let matrix: Coin = parse_coin_json(&text)?;
    if !(threshold >= 0.0) {
        return Err(ConfigError(format!("`threshold` (--threshold): {threshold} must be non-negative")).into());
    }
    let config = FitConfig { starts, max_iterations, success_threshold: threshold, seed };
    let outcome = fit_params(&matrix, &config)?;
    let report = outcome.report();
    let status = match outcome {
        FitOutcome::Converged(_) => "converged",
        FitOutcome::NotReachable(_) => "not-reachable",
    };
    let document = format!(
        "# status = {status}\n# residual = {:e}\n# best start = {}, starts run = {}\n{}",
        report.residual,
        report.start,
        report.starts_used,
        params_to_string(&report.params)
    );
    std::fs::write(out, document).with_context(|| format!("writing {}", out.display()))?;
    println!("status: {status}");
    println!("residual: {:e}", report.residual);
    println!("starts used: {} (best start {})", report.starts_used, report.start);
    println!("parameters written to {}", out.display());
    Ok(if outcome.is_converged() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NOT_REACHABLE) })
}

pub fn verify_presets() -> anyhow::Result<ExitCode> {
    const TOL: f64 = 1e-12;
    let grover = synthesize_coin(&Params::grover());
    let dft = synthesize_coin(&Params::dft());
    let variant = *synthesize_coin(&Params::grover_phi11_quarter_pi()).entry(0, 0);
    let checks = [
        ("grover parameters reproduce the Grover coin", grover.max_abs_diff(&grover_coin())),
        ("dft parameters reproduce the unswapped DFT coin", dft.max_abs_diff(&dft_prime_coin())),
        ("swapping l and u gives the DFT coin", permute_lu(&dft).max_abs_diff(&dft_coin())),
        ("closed form matches stage product (grover)", closed_form_coin(&Params::grover()).max_abs_diff(&grover)),
        ("closed form matches stage product (dft)", closed_form_coin(&Params::dft()).max_abs_diff(&dft)),
    ];
    let mut ok = true;
    for (label, err) in checks {
        let pass = err <= TOL;
        ok &= pass;
        println!("{} {label}: max deviation {err:.3e}", if pass { "PASS" } else { "FAIL" });
    }
    println!("note: phi11 = pi/4 instead of -pi/2 gives entry (1,1) = {variant:.6}, not -1/2");
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn pair_line((a, b): &(Site, Site)) -> String {
    format!("({}, {}) <-> ({}, {})", a.x, a.y, b.x, b.y)
}

pub fn print_pairs_to_stderr(pairs: &[(Site, Site)]) {
    for p in pairs {
        eprintln!("collision: {}", pair_line(p));
    }
}

fn report<F: Frequency>(enc: &qwalk_core::spectral::EncodingConfig<F>, extent: u32) -> ExitCode {
    let pairs = detect_collisions(enc, extent);
    if pairs.is_empty() {
        println!("no collisions for |x|, |y| <= {extent}");
        return ExitCode::SUCCESS;
    }
    for p in &pairs {
        println!("{}", pair_line(p));
    }
    println!("{} colliding pairs for |x|, |y| <= {extent}", pairs.len());
    ExitCode::from(EXIT_COLLISION)
}

pub fn detect(encoding: &Encoding, extent: u32) -> anyhow::Result<ExitCode> {
    Ok(match encoding {
        Encoding::Exact(enc) => report(enc, extent),
        Encoding::Decimal(enc) => report(enc, extent),
    })
}
