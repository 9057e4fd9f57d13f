//! Text formats shared with the command-line front end.
//!
//! * optical parameters: `key = value` lines, keys [`PARAM_KEYS`], radians
//!   with 17 significant digits (valid TOML);
//! * matrices: JSON array of rows, each entry a `[re, im]` pair;
//! * lattice states: `# step_count=N mode=M` header, then one
//!   `x,y,r_re,r_im,l_re,l_im,u_re,u_im,d_re,d_im` record per site;
//! * probability fields: CSV `x,y,pr,pl,pu,pd,p`;
//! * axis distributions: CSV `axis,coord,p`;
//! * spectra: CSV `polarization,frequency,intensity`, frequencies as decimals
//!   or, in exact mode, as `numerator/denominator`.
//!
//! Floats are written in shortest round-trip scientific notation unless noted.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex;

use crate::coin::{CoinMatrix, OpticalCoinParams, DIM, PARAM_KEYS};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{Frequency, SpectrumModel};
use crate::walk::{AxisDistribution, CoinVector, LatticeState, Mode, ProbabilityField, Site, SiteProbability};

pub fn params_to_string<T: Real>(p: &OpticalCoinParams<T>) -> String {
    let mut out = String::new();
    for (key, v) in PARAM_KEYS.iter().zip(p.to_array()) {
        writeln!(out, "{key} = {:.16e}", v.to_f64_lossy()).expect("write to string");
    }
    out
}

/// Parses a parameter document. All sixteen keys are required exactly once;
/// blank lines and `#` comments are ignored.
pub fn parse_params<T: Real>(text: &str) -> Result<OpticalCoinParams<T>> {
    let mut values: [Option<T>; 16] = [None; 16];
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(n + 1, format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        let idx = PARAM_KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| Error::parse(n + 1, format!("unknown key `{key}`")))?;
        if values[idx].is_some() {
            return Err(Error::parse(n + 1, format!("duplicate key `{key}`")));
        }
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|e| Error::parse(n + 1, format!("bad value for `{key}`: {e}")))?;
        if !v.is_finite() {
            return Err(Error::parse(n + 1, format!("`{key}` is not finite")));
        }
        values[idx] = Some(T::lit(v));
    }
    let mut arr = [T::zero(); 16];
    for (i, v) in values.iter().enumerate() {
        arr[i] = v.ok_or_else(|| Error::parse(0, format!("missing key `{}`", PARAM_KEYS[i])))?;
    }
    Ok(OpticalCoinParams::from_array(&arr))
}

/// Square complex matrix as a JSON array of rows of `[re, im]` pairs.
pub fn matrix_to_json<T: Real>(rows: &[Vec<Complex<T>>]) -> String {
    let value: Vec<Vec<[f64; 2]>> = rows
        .iter()
        .map(|r| r.iter().map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()]).collect())
        .collect();
    serde_json::to_string(&value).expect("finite matrix serializes")
}

pub fn coin_to_json<T: Real>(c: &CoinMatrix<T>) -> String {
    let rows: Vec<Vec<Complex<T>>> = c.rows().iter().map(|r| r.to_vec()).collect();
    matrix_to_json(&rows)
}

/// Parses a square matrix of any dimension.
pub fn parse_matrix_json<T: Real>(text: &str) -> Result<Vec<Vec<Complex<T>>>> {
    let value: Vec<Vec<[f64; 2]>> =
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), format!("matrix JSON: {e}")))?;
    let n = value.len();
    if let Some(bad) = value.iter().position(|r| r.len() != n) {
        return Err(Error::parse(0, format!("row {} has {} entries, expected {n}", bad + 1, value[bad].len())));
    }
    Ok(value
        .into_iter()
        .map(|r| r.into_iter().map(|[re, im]| Complex::new(T::lit(re), T::lit(im))).collect())
        .collect())
}

/// Parses a 4×4 coin matrix. Unitarity is not checked here.
pub fn parse_coin_json<T: Real>(text: &str) -> Result<CoinMatrix<T>> {
    let rows = parse_matrix_json::<T>(text)?;
    if rows.len() != DIM {
        return Err(Error::parse(0, format!("coin matrix must be 4×4, got {0}×{0}", rows.len())));
    }
    Ok(CoinMatrix::from_fn(|i, j| rows[i][j]))
}

pub fn write_state<T: Real, W: Write>(mut w: W, state: &LatticeState<T>, mode: Mode) -> Result<()> {
    writeln!(w, "# step_count={} mode={}", state.step_count(), mode.name())?;
    for (site, v) in state.iter() {
        write!(w, "{},{}", site.x, site.y)?;
        for a in v {
            write!(w, ",{:e},{:e}", a.re, a.im)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Parses a state file and checks normalization.
pub fn parse_state<T: Real>(text: &str) -> Result<(LatticeState<T>, Mode)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty state file"))?;
    let header = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::parse(1, "missing `# step_count=N mode=M` header"))?;
    let mut step_count = None;
    let mut mode = None;
    for token in header.split_whitespace() {
        match token.split_once('=') {
            Some(("step_count", v)) => {
                step_count = Some(v.parse::<u64>().map_err(|e| Error::parse(1, format!("step_count: {e}")))?)
            }
            Some(("mode", v)) => mode = Some(v.parse::<Mode>().map_err(|e| Error::parse(1, e.to_string()))?),
            _ => return Err(Error::parse(1, format!("unexpected header token `{token}`"))),
        }
    }
    let step_count = step_count.ok_or_else(|| Error::parse(1, "header lacks step_count"))?;
    let mode = mode.ok_or_else(|| Error::parse(1, "header lacks mode"))?;

    let mut sites = Vec::new();
    for (n, line) in lines {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 10 {
            return Err(Error::parse(n + 1, format!("expected 10 fields, found {}", fields.len())));
        }
        let int = |s: &str| s.parse::<i64>().map_err(|e| Error::parse(n + 1, format!("coordinate `{s}`: {e}")));
        let real = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(T::lit)
                .ok_or_else(|| Error::parse(n + 1, format!("amplitude `{s}` is not a finite number")))
        };
        let site = Site::new(int(fields[0])?, int(fields[1])?);
        let mut v: CoinVector<T> = [Complex::new(T::zero(), T::zero()); 4];
        for (c, slot) in v.iter_mut().enumerate() {
            *slot = Complex::new(real(fields[2 + 2 * c])?, real(fields[3 + 2 * c])?);
        }
        sites.push((site, v));
    }
    Ok((LatticeState::from_sites(sites, step_count)?, mode))
}

pub fn write_probability_csv<T: Real, W: Write>(mut w: W, field: &ProbabilityField<T>) -> Result<()> {
    writeln!(w, "x,y,pr,pl,pu,pd,p")?;
    for r in field.records() {
        let [pr, pl, pu, pd] = r.components;
        writeln!(w, "{},{},{:e},{:e},{:e},{:e},{:e}", r.site.x, r.site.y, pr, pl, pu, pd, r.total)?;
    }
    Ok(())
}

pub fn parse_probability_csv<T: Real>(text: &str) -> Result<ProbabilityField<T>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "x,y,pr,pl,pu,pd,p" => {}
        _ => return Err(Error::parse(1, "expected header `x,y,pr,pl,pu,pd,p`")),
    }
    let mut records = Vec::new();
    for (n, line) in lines.filter(|(_, l)| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 7 {
            return Err(Error::parse(n + 1, format!("expected 7 fields, found {}", f.len())));
        }
        let bad = |s: &str| Error::parse(n + 1, format!("bad number `{s}`"));
        let x: i64 = f[0].parse().map_err(|_| bad(f[0]))?;
        let y: i64 = f[1].parse().map_err(|_| bad(f[1]))?;
        let mut vals = [T::zero(); 5];
        for (slot, s) in vals.iter_mut().zip(&f[2..]) {
            *slot = T::lit(s.parse::<f64>().map_err(|_| bad(s))?);
        }
        records.push(SiteProbability {
            site: Site::new(x, y),
            components: [vals[0], vals[1], vals[2], vals[3]],
            total: vals[4],
        });
    }
    Ok(ProbabilityField::from_records(records))
}

/// Writes one or more named axis distributions as `axis,coord,p`.
pub fn write_axis_csv<T: Real, W: Write>(mut w: W, series: &[(&str, &AxisDistribution<T>)]) -> Result<()> {
    writeln!(w, "axis,coord,p")?;
    for (name, dist) in series {
        for (coord, p) in &dist.points {
            writeln!(w, "{name},{coord},{p:e}")?;
        }
    }
    Ok(())
}

/// Reads `axis,coord,p` back into distributions keyed by axis name.
pub fn parse_axis_csv<T: Real>(text: &str) -> Result<BTreeMap<String, AxisDistribution<T>>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "axis,coord,p" => {}
        _ => return Err(Error::parse(1, "expected header `axis,coord,p`")),
    }
    let mut out: BTreeMap<String, AxisDistribution<T>> = BTreeMap::new();
    for (n, line) in lines.filter(|(_, l)| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 3 {
            return Err(Error::parse(n + 1, format!("expected 3 fields, found {}", f.len())));
        }
        let coord: i64 = f[1].parse().map_err(|_| Error::parse(n + 1, format!("bad coordinate `{}`", f[1])))?;
        let p: f64 = f[2].parse().map_err(|_| Error::parse(n + 1, format!("bad probability `{}`", f[2])))?;
        out.entry(f[0].to_string()).or_default().points.push((coord, T::lit(p)));
    }
    Ok(out)
}

/// Spectrum CSV. With `exact` the frequency column uses the type's own
/// `Display` (`n/d` for rationals); otherwise frequencies are decimal.
pub fn write_spectrum_csv<F: Frequency, T: Real, W: Write>(mut w: W, spectrum: &SpectrumModel<F, T>, exact: bool) -> Result<()> {
    writeln!(w, "polarization,frequency,intensity")?;
    for (pol, lines) in [("x", &spectrum.x_pol), ("y", &spectrum.y_pol)] {
        for line in lines {
            if exact {
                writeln!(w, "{pol},{},{:e}", line.frequency, line.intensity)?;
            } else {
                writeln!(w, "{pol},{:e},{:e}", line.frequency.to_f64(), line.intensity)?;
            }
        }
    }
    Ok(())
}

/// Reads a spectrum CSV back as `(polarization, frequency text, intensity)` rows.
pub fn parse_spectrum_csv(text: &str) -> Result<Vec<(String, String, f64)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "polarization,frequency,intensity" => {}
        _ => return Err(Error::parse(1, "expected header `polarization,frequency,intensity`")),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 3 || !matches!(f[0], "x" | "y") {
                return Err(Error::parse(n + 1, format!("malformed spectrum row `{line}`")));
            }
            let i: f64 = f[2].parse().map_err(|_| Error::parse(n + 1, format!("bad intensity `{}`", f[2])))?;
            Ok((f[0].to_string(), f[1].to_string(), i))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::{dft_coin, grover_coin};
    use crate::walk::{evolve, probability, WalkConfig};
    use proptest::prelude::*;

    #[test]
    fn params_text_has_all_keys_and_precision() {
        let text = params_to_string(&OpticalCoinParams::<f64>::grover());
        assert_eq!(text.lines().count(), 16);
        assert!(text.starts_with("theta11 = 7.8539816339744828e-1"), "{text}");
        let back: OpticalCoinParams<f64> = parse_params(&text).unwrap();
        assert_eq!(back, OpticalCoinParams::grover());
    }

    #[test]
    fn params_errors_name_the_key() {
        let text = params_to_string(&OpticalCoinParams::<f64>::dft());
        let missing: String = text.lines().filter(|l| !l.starts_with("phi23")).map(|l| format!("{l}\n")).collect();
        assert!(parse_params::<f64>(&missing).unwrap_err().to_string().contains("phi23"));
        let dup = format!("{text}phi11 = 0\n");
        assert!(parse_params::<f64>(&dup).unwrap_err().to_string().contains("duplicate key `phi11`"));
        let unknown = format!("{text}phi41 = 0\n");
        assert!(parse_params::<f64>(&unknown).unwrap_err().to_string().contains("phi41"));
    }

    #[test]
    fn coin_json_round_trip() {
        let c = dft_coin::<f64>();
        let text = coin_to_json(&c);
        assert_eq!(parse_coin_json::<f64>(&text).unwrap(), c);
        assert!(parse_coin_json::<f64>("[[[1,0]]]").is_err());
        assert!(parse_coin_json::<f64>("[[[1,0],[0,0]],[[0,0]]]").is_err());
    }

    #[test]
    fn state_round_trip_is_exact() {
        let cfg = WalkConfig::new(grover_coin(), 7, LatticeState::<f64>::symmetric_origin()).unwrap();
        let s = evolve(&cfg).unwrap();
        let mut buf = Vec::new();
        write_state(&mut buf, &s, Mode::Plane).unwrap();
        let (back, mode) = parse_state::<f64>(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(mode, Mode::Plane);
        assert_eq!(back, s);
    }

    #[test]
    fn state_parse_rejects_unnormalized() {
        let text = "# step_count=0 mode=plane\n0,0,1,0,1,0,0,0,0,0\n";
        assert!(matches!(parse_state::<f64>(text), Err(Error::NotNormalized { .. })));
        assert!(parse_state::<f64>("0,0,1,0,0,0,0,0,0,0\n").is_err());
    }

    #[test]
    fn probability_csv_round_trip() {
        let cfg = WalkConfig::new(grover_coin(), 5, LatticeState::<f64>::symmetric_origin()).unwrap();
        let field = probability(&evolve(&cfg).unwrap());
        let mut buf = Vec::new();
        write_probability_csv(&mut buf, &field).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,y,pr,pl,pu,pd,p\n"));
        assert_eq!(parse_probability_csv::<f64>(&text).unwrap(), field);
    }

    proptest! {
        #[test]
        fn params_text_round_trips(values in proptest::array::uniform16(-10.0f64..10.0)) {
            let p = OpticalCoinParams::from_array(&values);
            let back: OpticalCoinParams<f64> = parse_params(&params_to_string(&p)).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
