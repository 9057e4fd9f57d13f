//! The `run` subcommand.

use std::path::Path;

use anyhow::Context;
use qwalk_core::coin::{
    closed_form_coin, dft_coin, dft_prime_coin, grover_coin, permute_lu, synthesize_coin, CoinMatrix,
};
use qwalk_core::io::{
    coin_to_json, parse_coin_json, parse_params, parse_state, write_axis_csv, write_probability_csv,
    write_spectrum_csv, write_state,
};
use qwalk_core::spectral::{encode, Frequency, FREQUENCY_RTOL};
use qwalk_core::walk::{
    evolve, marginals, moments, probability, slices, Direction, Lattice, LatticeState, Mode, Site, WalkConfig,
    PRUNE_THRESHOLD,
};
use qwalk_core::{Coin, Params, Real, State};
use serde_json::json;

use crate::config::{sha256_hex, CoinSource, ConfigError, Encoding, InitialSource, RunConfig};

fn load_coin(cfg: &RunConfig) -> anyhow::Result<(Coin, Option<Params>)> {
    let (coin, params) = match &cfg.coin {
        CoinSource::Preset { name } => match name.as_str() {
            "grover" => (grover_coin(), None),
            "dft" => (dft_coin(), None),
            _ => (dft_prime_coin(), None),
        },
        CoinSource::MatrixFile { path, .. } => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading coin {}", path.display()))?;
            let coin = parse_coin_json(&text).map_err(|e| ConfigError(format!("`coin` ({}): {e}", path.display())))?;
            (coin, None)
        }
        CoinSource::ParamsPreset { name } => {
            let p = if name == "grover" { Params::grover() } else { Params::dft() };
            (synthesize_coin(&p), Some(p))
        }
        CoinSource::ParamsFile { path, .. } => {
            let text =
                std::fs::read_to_string(path).with_context(|| format!("reading coin_params {}", path.display()))?;
            let p: Params =
                parse_params(&text).map_err(|e| ConfigError(format!("`coin_params` ({}): {e}", path.display())))?;
            (synthesize_coin(&p), Some(p))
        }
    };
    let coin = if cfg.permute_lu { permute_lu(&coin) } else { coin };
    coin.ensure_unitary().map_err(|e| ConfigError(format!("`coin`: {e}")))?;
    Ok((coin, params))
}

fn load_initial(cfg: &RunConfig) -> anyhow::Result<State> {
    Ok(match &cfg.initial {
        InitialSource::Preset { name } => match name.as_str() {
            "symmetric" => LatticeState::symmetric_origin(),
            "r" => LatticeState::basis(Site::ORIGIN, Direction::R),
            "l" => LatticeState::basis(Site::ORIGIN, Direction::L),
            "u" => LatticeState::basis(Site::ORIGIN, Direction::U),
            _ => LatticeState::basis(Site::ORIGIN, Direction::D),
        },
        InitialSource::File { path, .. } => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading initial {}", path.display()))?;
            parse_state(&text).map_err(|e| ConfigError(format!("`initial` ({}): {e}", path.display())))?.0
        }
    })
}

fn print_verification(coin: &Coin, params: Option<&Params>) {
    println!("verify: unitarity defect {:.3e}", coin.unitarity_defect());
    if let Some(p) = params {
        println!("verify: closed form vs stage product {:.3e}", closed_form_coin(p).max_abs_diff(&synthesize_coin(p)));
    }
    let references: [(&str, CoinMatrix<f64>); 3] =
        [("grover", grover_coin()), ("dft", dft_coin()), ("dft-prime", dft_prime_coin())];
    for (name, reference) in references {
        println!("verify: max deviation from {name} {:.3e}", coin.max_abs_diff(&reference));
    }
}

fn spectrum_csv<F: Frequency>(state: &State, enc: &qwalk_core::spectral::EncodingConfig<F>) -> anyhow::Result<Vec<u8>> {
    let spectrum = encode(state, enc)?;
    let mut buf = Vec::new();
    write_spectrum_csv(&mut buf, &spectrum, F::is_exact())?;
    Ok(buf)
}

pub fn run(cfg: &RunConfig) -> anyhow::Result<()> {
    let encoding = cfg.encoding()?;
    let (coin, params) = load_coin(cfg)?;
    let initial = load_initial(cfg)?;
    let mode: Mode = cfg.mode.parse()?;
    let lattice = cfg.periodic.map_or(Lattice::Unbounded, |side| Lattice::Periodic { side });
    let walk = WalkConfig::new(coin, cfg.steps, initial)
        .and_then(|w| w.with_mode(mode))
        .and_then(|w| w.with_lattice(lattice))
        .map_err(|e| ConfigError(format!("walk configuration: {e}")))?;
    let state = evolve(&walk)?;
    let field = probability(&state);
    let m = moments(&field);

    let mut outputs: Vec<(String, Vec<u8>)> = Vec::new();
    for kind in &cfg.emit {
        let mut buf = Vec::new();
        let name = match kind.as_str() {
            "state" => {
                write_state(&mut buf, &state, mode)?;
                "state.csv"
            }
            "probability" => {
                write_probability_csv(&mut buf, &field)?;
                "probability.csv"
            }
            "marginals" => {
                let (x, y) = marginals(&field);
                write_axis_csv(&mut buf, &[("x", &x), ("y", &y)])?;
                "marginals.csv"
            }
            "slices" => {
                let (x, y) = slices(&field);
                write_axis_csv(&mut buf, &[("x", &x), ("y", &y)])?;
                "slices.csv"
            }
            "spectrum" => {
                buf = match &encoding {
                    Encoding::Exact(enc) => spectrum_csv(&state, enc)?,
                    Encoding::Decimal(enc) => spectrum_csv(&state, enc)?,
                };
                "spectrum.csv"
            }
            "moments" => {
                let value = json!({
                    "steps": state.step_count(),
                    "norm": state.norm_sqr(),
                    "support_size": state.support_size(),
                    "mean_x": m.mean_x,
                    "mean_y": m.mean_y,
                    "sigma_x": m.sigma_x,
                    "sigma_y": m.sigma_y,
                    "sigma": m.sigma,
                });
                buf = serde_json::to_vec_pretty(&value)?;
                buf.push(b'\n');
                "moments.json"
            }
            _ => {
                buf = coin_to_json(&coin).into_bytes();
                buf.push(b'\n');
                "coin.json"
            }
        };
        outputs.push((name.to_string(), buf));
    }

    write_outputs(&cfg.out_dir, cfg, &encoding, &outputs, &state, m.sigma)?;

    println!("coin: {}", coin_label(cfg));
    println!("steps: {}  mode: {}  lattice: {}", state.step_count(), mode.name(), lattice_label(lattice));
    println!("norm: {:.15}", state.norm_sqr());
    println!("sigma: {:.12} (sigma_x {:.12}, sigma_y {:.12})", m.sigma, m.sigma_x, m.sigma_y);
    println!("support size: {}", state.support_size());
    if cfg.verify {
        print_verification(&coin, params.as_ref());
    }
    let names: Vec<&str> = outputs.iter().map(|(n, _)| n.as_str()).chain(["run_manifest.json"]).collect();
    println!("wrote {} in {}", names.join(", "), cfg.out_dir.display());
    Ok(())
}

fn coin_label(cfg: &RunConfig) -> String {
    let base = match &cfg.coin {
        CoinSource::Preset { name } => name.clone(),
        CoinSource::MatrixFile { path, .. } => format!("matrix {}", path.display()),
        CoinSource::ParamsPreset { name } => format!("{name} optical parameters"),
        CoinSource::ParamsFile { path, .. } => format!("optical parameters {}", path.display()),
    };
    if cfg.permute_lu {
        format!("{base} (l and u swapped)")
    } else {
        base
    }
}

fn lattice_label(lattice: Lattice) -> String {
    match lattice {
        Lattice::Unbounded => "unbounded".into(),
        Lattice::Periodic { side } => format!("periodic {side}x{side}"),
    }
}

fn write_outputs(
    dir: &Path,
    cfg: &RunConfig,
    encoding: &Encoding,
    outputs: &[(String, Vec<u8>)],
    state: &State,
    sigma: f64,
) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = Vec::new();
    for (name, bytes) in outputs {
        let path = dir.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        files.push(json!({ "file": name, "sha256": sha256_hex(bytes) }));
    }
    let manifest = json!({
        "tool": "qwalk",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "config_sha256": cfg.hash(),
        "arithmetic": {
            "amplitudes": "f64",
            "frequencies": match encoding { Encoding::Exact(_) => "exact-rational", Encoding::Decimal(_) => "f64" },
        },
        "tolerances": {
            "unitarity": f64::UNITARITY_TOL,
            "norm": f64::NORM_TOL,
            "prune_threshold": PRUNE_THRESHOLD,
            "frequency_rtol": FREQUENCY_RTOL,
        },
        "summary": {
            "steps": state.step_count(),
            "norm": state.norm_sqr(),
            "sigma": sigma,
            "support_size": state.support_size(),
        },
        "outputs": files,
    });
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    let path = dir.join("run_manifest.json");
    std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
