use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Amplitudes with magnitude below this may be dropped from storage.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// A lattice site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn offset(self, dx: i64, dy: i64) -> Self {
        Self { x: self.x + dx, y: self.y + dy }
    }

    /// L¹ distance.
    pub fn manhattan(self, other: Site) -> u64 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }
}

/// Coin basis state. The discriminant is the index into a coin vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    R = 0,
    L = 1,
    U = 2,
    D = 3,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::R, Direction::L, Direction::U, Direction::D];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Lattice displacement in the plane.
    pub fn shift(self) -> (i64, i64) {
        match self {
            Direction::R => (1, 0),
            Direction::L => (-1, 0),
            Direction::U => (0, 1),
            Direction::D => (0, -1),
        }
    }

    /// Displacement on the line when polarizations are not distinguished.
    pub fn line_shift(self) -> i64 {
        match self {
            Direction::R | Direction::U => 1,
            Direction::L | Direction::D => -1,
        }
    }

    pub fn label(self) -> char {
        ['r', 'l', 'u', 'd'][self.index()]
    }
}

pub type CoinVector<T> = [Complex<T>; 4];

/// Sparse walk state: site → `(r, l, u, d)` amplitudes, plus the step counter.
///
/// Sites whose four amplitudes are all below [`PRUNE_THRESHOLD`] are never
/// stored. Iteration is in `(x, y)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeState<T> {
    amplitudes: BTreeMap<Site, CoinVector<T>>,
    step_count: u64,
}

impl<T: Real> LatticeState<T> {
    /// Builds a state, rejecting it unless `Σ|a|² = 1` within [`Real::NORM_TOL`].
    /// Repeated sites are summed.
    pub fn from_sites(sites: impl IntoIterator<Item = (Site, CoinVector<T>)>, step_count: u64) -> Result<Self> {
        let state = Self::collect(sites, step_count);
        state.ensure_normalized()?;
        Ok(state)
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(sites: impl IntoIterator<Item = (Site, CoinVector<T>)>) -> Result<Self> {
        let mut state = Self::collect(sites, 0);
        let norm = state.norm_sqr().sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero or non-finite state".into()));
        }
        for v in state.amplitudes.values_mut() {
            for a in v.iter_mut() {
                *a /= norm;
            }
        }
        Ok(state)
    }

    /// Single site with the given coin vector (must be normalized).
    pub fn localized(site: Site, coin: CoinVector<T>) -> Result<Self> {
        Self::from_sites([(site, coin)], 0)
    }

    /// `|site⟩ ⊗ |direction⟩`.
    pub fn basis(site: Site, direction: Direction) -> Self {
        let mut v = [Complex::zero(); 4];
        v[direction.index()] = Complex::new(T::one(), T::zero());
        Self::collect([(site, v)], 0)
    }

    /// `|0,0⟩ ⊗ (|r⟩ + |l⟩ + |u⟩ + |d⟩) / 2`, four equal beams.
    pub fn symmetric_origin() -> Self {
        let half = Complex::new(T::lit(0.5), T::zero());
        Self::collect([(Site::ORIGIN, [half; 4])], 0)
    }

    pub(crate) fn collect(sites: impl IntoIterator<Item = (Site, CoinVector<T>)>, step_count: u64) -> Self {
        let mut amplitudes: BTreeMap<Site, CoinVector<T>> = BTreeMap::new();
        for (site, v) in sites {
            let slot = amplitudes.entry(site).or_insert([Complex::zero(); 4]);
            for (a, b) in slot.iter_mut().zip(v) {
                *a += b;
            }
        }
        let mut state = Self { amplitudes, step_count };
        state.prune();
        state
    }

    pub(crate) fn from_map(amplitudes: BTreeMap<Site, CoinVector<T>>, step_count: u64) -> Self {
        let mut state = Self { amplitudes, step_count };
        state.prune();
        state
    }

    pub(crate) fn prune(&mut self) {
        let threshold = T::lit(PRUNE_THRESHOLD);
        self.amplitudes.retain(|_, v| v.iter().any(|a| a.norm() >= threshold));
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - T::one()).abs() <= T::lit(T::NORM_TOL) {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm_sqr: n.to_f64_lossy() })
        }
    }

    /// `Σ |a|²`, summed in site order.
    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .values()
            .flat_map(|v| v.iter())
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn with_step_count(mut self, step_count: u64) -> Self {
        self.step_count = step_count;
        self
    }

    pub fn amplitude(&self, site: Site) -> Option<&CoinVector<T>> {
        self.amplitudes.get(&site)
    }

    /// Amplitude of one component, zero where nothing is stored.
    pub fn component(&self, site: Site, direction: Direction) -> Complex<T> {
        self.amplitudes.get(&site).map_or(Complex::zero(), |v| v[direction.index()])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, &CoinVector<T>)> + '_ {
        self.amplitudes.iter().map(|(s, v)| (*s, v))
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.amplitudes.keys().copied()
    }

    /// Number of stored sites.
    pub fn support_size(&self) -> usize {
        self.amplitudes.len()
    }

    /// Largest L¹ distance from `center` to a stored site.
    pub fn support_radius(&self, center: Site) -> u64 {
        self.sites().map(|s| s.manhattan(center)).max().unwrap_or(0)
    }

    /// Same amplitudes moved by `(dx, dy)`.
    pub fn translated(&self, dx: i64, dy: i64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|(s, v)| (s.offset(dx, dy), *v)).collect(),
            step_count: self.step_count,
        }
    }

    /// Max componentwise `|a - b|` over the union of both supports.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for site in self.sites().chain(other.sites()) {
            for d in Direction::ALL {
                worst = worst.max((self.component(site, d) - other.component(site, d)).norm());
            }
        }
        worst
    }

    pub(crate) fn map(&self) -> &BTreeMap<Site, CoinVector<T>> {
        &self.amplitudes
    }
}
