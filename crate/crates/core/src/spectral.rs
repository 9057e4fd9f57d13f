//! Frequency-lattice encoding of walker position and polarizer readout.
//!
//! Site `(x, y)` is carried by light at `ω0 + x·ωx + y·ωy`. Coin states `r`, `l`
//! ride the x polarization and `u`, `d` the y polarization. Readout is by
//! intensity, so phases are not recoverable.
//!
//! Frequencies are generic over [`Frequency`]: rationals compare exactly,
//! floating point values coincide within `1e-9·ωx`.

use std::collections::BTreeMap;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::walk::{self, AxisDistribution, LatticeState, ProbabilityField, Site};

/// Relative tolerance for floating point frequency comparisons, in units of ωx.
pub const FREQUENCY_RTOL: f64 = 1e-9;

/// Scalar used for optical frequencies.
pub trait Frequency:
    Clone
    + PartialOrd
    + Debug
    + Display
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_i64(v: i64) -> Self;

    /// Whether two frequencies are indistinguishable given the shift quantum `quantum`.
    fn coincides(&self, other: &Self, quantum: &Self) -> bool;

    /// `Some(n)` if `self / divisor` is the integer `n`.
    fn integer_ratio(&self, divisor: &Self) -> Option<i64>;

    fn to_f64(&self) -> f64;

    /// Whether values of this type are compared exactly.
    fn is_exact() -> bool;
}

macro_rules! float_frequency {
    ($t:ty) => {
        impl Frequency for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }

            fn coincides(&self, other: &Self, quantum: &Self) -> bool {
                ((*self - *other).abs() as f64) <= FREQUENCY_RTOL * (*quantum as f64).abs()
            }

            fn integer_ratio(&self, divisor: &Self) -> Option<i64> {
                let q = (*self as f64) / (*divisor as f64);
                let n = q.round();
                ((q - n).abs() <= FREQUENCY_RTOL && n.abs() < i64::MAX as f64).then_some(n as i64)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn is_exact() -> bool {
                false
            }
        }
    };
}

float_frequency!(f64);
float_frequency!(f32);

impl<I> Frequency for Ratio<I>
where
    I: Integer + Signed + Clone + Debug + Display + ToPrimitive + FromPrimitive,
{
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(I::from_i64(v).expect("integer fits"))
    }

    fn coincides(&self, other: &Self, _quantum: &Self) -> bool {
        self == other
    }

    fn integer_ratio(&self, divisor: &Self) -> Option<i64> {
        let q = self.clone() / divisor.clone();
        q.is_integer().then(|| q.to_integer().to_i64()).flatten()
    }

    fn to_f64(&self) -> f64 {
        self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        true
    }
}

/// Carrier and shift quanta of the frequency encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodingConfig<F> {
    pub omega0: F,
    pub omega_x: F,
    pub omega_y: F,
}

impl<F: Frequency> EncodingConfig<F> {
    pub fn new(omega0: F, omega_x: F, omega_y: F) -> Result<Self> {
        if !(omega_x > F::zero()) || !(omega_y > F::zero()) {
            return Err(Error::InvalidArgument(format!(
                "shift quanta must be positive (omega_x = {omega_x}, omega_y = {omega_y})"
            )));
        }
        Ok(Self { omega0, omega_x, omega_y })
    }

    /// Offset from the carrier for `site`.
    pub fn offset(&self, site: Site) -> F {
        F::from_i64(site.x) * self.omega_x.clone() + F::from_i64(site.y) * self.omega_y.clone()
    }

    pub fn frequency(&self, site: Site) -> F {
        self.omega0.clone() + self.offset(site)
    }
}

/// One spectral line.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralLine<F, T> {
    pub frequency: F,
    pub intensity: T,
}

/// Which polarization channel a line belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Polarization {
    /// Carries coin states `r` and `l`.
    X,
    /// Carries coin states `u` and `d`.
    Y,
}

impl Polarization {
    pub fn name(self) -> &'static str {
        match self {
            Polarization::X => "x",
            Polarization::Y => "y",
        }
    }
}

/// Output spectrum split by polarization, each sorted by ascending frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumModel<F, T> {
    pub x_pol: Vec<SpectralLine<F, T>>,
    pub y_pol: Vec<SpectralLine<F, T>>,
}

impl<F: Frequency, T: Real> SpectrumModel<F, T> {
    pub fn lines(&self, pol: Polarization) -> &[SpectralLine<F, T>] {
        match pol {
            Polarization::X => &self.x_pol,
            Polarization::Y => &self.y_pol,
        }
    }

    pub fn total_intensity(&self) -> T {
        total(&self.x_pol) + total(&self.y_pol)
    }
}

/// Sum of the intensities of `lines`.
pub fn total<F, T: Real>(lines: &[SpectralLine<F, T>]) -> T {
    lines.iter().fold(T::zero(), |acc, l| acc + l.intensity)
}

/// Groups of sites whose frequencies coincide. Each pair is reported once with
/// the smaller site (in `(x, y)` order) first; pairs are sorted.
fn colliding_pairs<F: Frequency>(cfg: &EncodingConfig<F>, sites: impl IntoIterator<Item = Site>) -> Vec<(Site, Site)> {
    let mut tagged: Vec<(F, Site)> = sites.into_iter().map(|s| (cfg.offset(s), s)).collect();
    tagged.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite frequencies").then(a.1.cmp(&b.1)));
    let mut pairs = Vec::new();
    for i in 0..tagged.len() {
        for j in i + 1..tagged.len() {
            if !tagged[i].0.coincides(&tagged[j].0, &cfg.omega_x) {
                break;
            }
            let (a, b) = (tagged[i].1, tagged[j].1);
            if a != b {
                pairs.push((a.min(b), a.max(b)));
            }
        }
    }
    pairs.sort();
    pairs.dedup();
    pairs
}

/// All pairs of distinct sites with `|x|, |y| <= extent` sharing a frequency.
pub fn detect_collisions<F: Frequency>(cfg: &EncodingConfig<F>, extent: u32) -> Vec<(Site, Site)> {
    let e = i64::from(extent);
    let sites = (-e..=e).flat_map(|x| (-e..=e).map(move |y| Site::new(x, y)));
    colliding_pairs(cfg, sites)
}

/// Spectrum emitted by `state`: `|c(x,y)|²` at `ω0 + x·ωx + y·ωy` on the
/// polarization carrying `c`.
///
/// Fails with [`Error::Collision`] if two occupied sites share a frequency.
pub fn encode<F: Frequency, T: Real>(state: &LatticeState<T>, cfg: &EncodingConfig<F>) -> Result<SpectrumModel<F, T>> {
    state.ensure_normalized()?;
    let pairs = colliding_pairs(cfg, state.sites());
    if !pairs.is_empty() {
        return Err(Error::Collision { pairs });
    }
    let mut x_pol = Vec::new();
    let mut y_pol = Vec::new();
    for (site, v) in state.iter() {
        let px = v[0].norm_sqr() + v[1].norm_sqr();
        let py = v[2].norm_sqr() + v[3].norm_sqr();
        if px > T::zero() {
            x_pol.push(SpectralLine { frequency: cfg.frequency(site), intensity: px });
        }
        if py > T::zero() {
            y_pol.push(SpectralLine { frequency: cfg.frequency(site), intensity: py });
        }
    }
    let by_freq = |a: &SpectralLine<F, T>, b: &SpectralLine<F, T>| a.frequency.partial_cmp(&b.frequency).expect("finite");
    x_pol.sort_by(by_freq);
    y_pol.sort_by(by_freq);
    Ok(SpectrumModel { x_pol, y_pol })
}

/// Field transmitted by a linear polarizer at 0° (x polarization) or 90° (y
/// polarization). Other angles are rejected.
pub fn polarizer<F: Frequency, T: Real>(spectrum: &SpectrumModel<F, T>, angle_degrees: f64) -> Result<Vec<SpectralLine<F, T>>> {
    polarization_for_angle(angle_degrees).map(|p| spectrum.lines(p).to_vec())
}

pub fn polarization_for_angle(angle_degrees: f64) -> Result<Polarization> {
    if angle_degrees == 0.0 {
        Ok(Polarization::X)
    } else if angle_degrees == 90.0 {
        Ok(Polarization::Y)
    } else {
        Err(Error::InvalidArgument(format!("polarizer angle {angle_degrees}° unsupported (0 or 90 only)")))
    }
}

/// How to map a frequency offset back to a site.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeAxis {
    /// Assume `y = 0`: `x = Δω / ωx`.
    X,
    /// Assume `x = 0`: `y = Δω / ωy`.
    Y,
    /// Solve `x·ωx + y·ωy = Δω` for `|x|, |y| <= extent`; requires a collision-free encoding there.
    Plane { extent: u32 },
}

/// Inverts the frequency map for one polarization's lines, returning the
/// intensity per site. Lines resolving to the same site are summed.
pub fn decode<F: Frequency, T: Real>(
    lines: &[SpectralLine<F, T>],
    cfg: &EncodingConfig<F>,
    axis: DecodeAxis,
) -> Result<BTreeMap<Site, T>> {
    if let DecodeAxis::Plane { extent } = axis {
        let pairs = detect_collisions(cfg, extent);
        if !pairs.is_empty() {
            return Err(Error::Collision { pairs });
        }
    }
    let mut out = BTreeMap::new();
    for line in lines {
        let delta = line.frequency.clone() - cfg.omega0.clone();
        let site = match axis {
            DecodeAxis::X => delta.integer_ratio(&cfg.omega_x).map(|x| Site::new(x, 0)),
            DecodeAxis::Y => delta.integer_ratio(&cfg.omega_y).map(|y| Site::new(0, y)),
            DecodeAxis::Plane { extent } => {
                let e = i64::from(extent);
                (-e..=e).find_map(|y| {
                    let rest = delta.clone() - F::from_i64(y) * cfg.omega_y.clone();
                    rest.integer_ratio(&cfg.omega_x).filter(|x| x.abs() <= e).map(|x| Site::new(x, y))
                })
            }
        };
        let site = site.ok_or_else(|| Error::Undecodable { frequency: line.frequency.to_string() })?;
        *out.entry(site).or_insert(T::zero()) += line.intensity;
    }
    Ok(out)
}

/// Candidate interpretations of a two-polarizer readout of `P(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutCandidates<T> {
    /// `P(x, 0)` and `P(0, y)`.
    pub slices: (AxisDistribution<T>, AxisDistribution<T>),
    /// `Σ_y P(x, y)` and `Σ_x P(x, y)`.
    pub marginals: (AxisDistribution<T>, AxisDistribution<T>),
    /// Per-site `P^r + P^l` and `P^u + P^d`, what the two polarizers actually transmit.
    pub component_sums: (BTreeMap<Site, T>, BTreeMap<Site, T>),
}

pub fn readout_candidates<T: Real>(field: &ProbabilityField<T>) -> ReadoutCandidates<T> {
    let mut xs = BTreeMap::new();
    let mut ys = BTreeMap::new();
    for r in field.records() {
        let px = r.components[0] + r.components[1];
        let py = r.components[2] + r.components[3];
        if px > T::zero() {
            xs.insert(r.site, px);
        }
        if py > T::zero() {
            ys.insert(r.site, py);
        }
    }
    ReadoutCandidates { slices: walk::slices(field), marginals: walk::marginals(field), component_sums: (xs, ys) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::Direction;
    use num_complex::Complex;

    type Q = Ratio<i64>;

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    #[test]
    fn encode_point_masses() {
        let cfg = EncodingConfig::new(5.0, 1.0, 100.0).unwrap();
        let s = encode(&LatticeState::<f64>::basis(Site::ORIGIN, Direction::R), &cfg).unwrap();
        assert_eq!(s.x_pol, vec![SpectralLine { frequency: 5.0, intensity: 1.0 }]);
        assert!(s.y_pol.is_empty());

        let cfg = EncodingConfig::new(q(0), q(1), q(10)).unwrap();
        let s = encode(&LatticeState::<f64>::basis(Site::new(2, -1), Direction::U), &cfg).unwrap();
        assert_eq!(s.y_pol, vec![SpectralLine { frequency: q(-8), intensity: 1.0 }]);
    }

    #[test]
    fn encode_reports_collision() {
        let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex::new(0.0, 0.0);
        let s = LatticeState::from_sites([(Site::new(1, 0), [h, z, z, z]), (Site::new(0, 1), [z, z, h, z])], 0).unwrap();
        let cfg = EncodingConfig::new(0.0, 1.0, 1.0).unwrap();
        match encode(&s, &cfg) {
            Err(Error::Collision { pairs }) => assert_eq!(pairs, vec![(Site::new(0, 1), Site::new(1, 0))]),
            other => panic!("expected collision, got {other:?}"),
        }
    }

    #[test]
    fn detect_collisions_small() {
        let cfg = EncodingConfig::new(q(0), q(1), q(1)).unwrap();
        let pairs = detect_collisions(&cfg, 1);
        assert!(pairs.contains(&(Site::new(0, 1), Site::new(1, 0))));
        // offsets -2..=2 over 9 sites: multiplicities 1,2,3,2,1
        assert_eq!(pairs.len(), 1 + 3 + 1);
        assert!(detect_collisions(&cfg, 0).is_empty());
    }

    #[test]
    fn float_tolerance() {
        let cfg = EncodingConfig::new(0.0, 1.0, 1.0 + 1e-12).unwrap();
        assert!(!detect_collisions(&cfg, 1).is_empty());
        let cfg = EncodingConfig::new(0.0, 1.0, 1.0 + 1e-6).unwrap();
        assert!(detect_collisions(&cfg, 1).is_empty());
    }

    #[test]
    fn polarizer_angles() {
        let cfg = EncodingConfig::new(0.0, 1.0, 100.0).unwrap();
        let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex::new(0.0, 0.0);
        let s = LatticeState::localized(Site::ORIGIN, [h, z, h, z]).unwrap();
        let spec = encode(&s, &cfg).unwrap();
        assert!((total(&polarizer(&spec, 0.0).unwrap()) - 0.5).abs() < 1e-15);
        assert!((total(&polarizer(&spec, 90.0).unwrap()) - 0.5).abs() < 1e-15);
        assert!(matches!(polarizer(&spec, 45.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn decode_single_line() {
        let cfg = EncodingConfig::new(q(7), q(1), q(1000)).unwrap();
        let line = SpectralLine { frequency: q(10), intensity: 1.0 };
        let out = decode(std::slice::from_ref(&line), &cfg, DecodeAxis::X).unwrap();
        assert_eq!(out.into_iter().collect::<Vec<_>>(), vec![(Site::new(3, 0), 1.0)]);
        let out = decode(&[line], &cfg, DecodeAxis::Plane { extent: 10 }).unwrap();
        assert_eq!(out.into_iter().collect::<Vec<_>>(), vec![(Site::new(3, 0), 1.0)]);
    }

    #[test]
    fn decode_degenerate_and_undecodable() {
        let cfg = EncodingConfig::new(0.0, 1.0, 1.0).unwrap();
        let line = SpectralLine { frequency: 1.0, intensity: 1.0 };
        assert!(matches!(decode(&[line], &cfg, DecodeAxis::Plane { extent: 2 }), Err(Error::Collision { .. })));
        let cfg = EncodingConfig::new(q(0), q(2), q(1000)).unwrap();
        let odd = SpectralLine { frequency: q(3), intensity: 1.0 };
        assert!(matches!(decode(&[odd], &cfg, DecodeAxis::X), Err(Error::Undecodable { .. })));
    }

    #[test]
    fn rejects_non_positive_quanta() {
        assert!(EncodingConfig::new(0.0, 0.0, 1.0).is_err());
        assert!(EncodingConfig::new(q(0), q(1), q(-1)).is_err());
    }

    #[test]
    fn integer_ratio() {
        assert_eq!(Q::new(9, 2).integer_ratio(&Q::new(3, 2)), Some(3));
        assert_eq!(Q::new(9, 2).integer_ratio(&Q::new(2, 1)), None);
        assert_eq!(6.0f64.integer_ratio(&2.0), Some(3));
        assert_eq!(6.5f64.integer_ratio(&2.0), None);
    }
}
