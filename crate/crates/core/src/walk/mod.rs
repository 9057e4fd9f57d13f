//! Sparse evolution of the two-dimensional coined walk.
//!
//! One step is `Ĉ·D̂`: the conditional displacement acts first and the coin
//! second. Many references use the opposite order; states produced here
//! differ from theirs by one trailing coin application.

mod probability;
mod state;

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;

use crate::coin::CoinMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub use probability::{marginals, moments, probability, slices, AxisDistribution, Moments, ProbabilityField, SiteProbability};
pub use state::{CoinVector, Direction, LatticeState, Site, PRUNE_THRESHOLD};

/// Which displacement rule a step uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// `r`/`l` move along x, `u`/`d` along y.
    #[default]
    Plane,
    /// Polarizations not distinguished: `r`, `u` move to x+1 and `l`, `d` to x-1.
    TwoCoinLine,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Plane => "plane",
            Mode::TwoCoinLine => "line-two-coins",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plane" => Ok(Mode::Plane),
            "line-two-coins" | "line" => Ok(Mode::TwoCoinLine),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}` (expected plane or line-two-coins)"))),
        }
    }
}

/// Boundary of the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Lattice {
    /// The infinite plane, stored sparsely.
    #[default]
    Unbounded,
    /// `side × side` torus with coordinates in `0..side`. Exists for comparison
    /// with the dense oracle.
    Periodic { side: usize },
}

impl Lattice {
    fn wrap(self, site: Site) -> Site {
        match self {
            Lattice::Unbounded => site,
            Lattice::Periodic { side } => {
                let l = side as i64;
                Site::new(site.x.rem_euclid(l), site.y.rem_euclid(l))
            }
        }
    }

    fn check(self, state: &LatticeState<impl Real>) -> Result<()> {
        if let Lattice::Periodic { side } = self {
            if side < 3 {
                return Err(Error::InvalidArgument(format!("periodic side {side} < 3")));
            }
            let l = side as i64;
            if let Some(site) = state.sites().find(|s| !(0..l).contains(&s.x) || !(0..l).contains(&s.y)) {
                return Err(Error::Support { site, reason: format!("outside the {side}×{side} periodic lattice") });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkConfig<T> {
    pub coin: CoinMatrix<T>,
    pub steps: u64,
    pub initial: LatticeState<T>,
    pub mode: Mode,
    pub lattice: Lattice,
}

impl<T: Real> WalkConfig<T> {
    /// Plane walk on the unbounded lattice. Fails for a non-unitary coin or an
    /// unnormalized initial state.
    pub fn new(coin: CoinMatrix<T>, steps: u64, initial: LatticeState<T>) -> Result<Self> {
        let config = Self { coin, steps, initial, mode: Mode::Plane, lattice: Lattice::Unbounded };
        config.validate()?;
        Ok(config)
    }

    pub fn with_mode(mut self, mode: Mode) -> Result<Self> {
        self.mode = mode;
        self.validate()?;
        Ok(self)
    }

    pub fn with_lattice(mut self, lattice: Lattice) -> Result<Self> {
        self.lattice = lattice;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.coin.ensure_unitary()?;
        self.initial.ensure_normalized()?;
        self.lattice.check(&self.initial)?;
        if self.mode == Mode::TwoCoinLine {
            ensure_on_line(&self.initial)?;
        }
        Ok(())
    }
}

fn shifted<T: Real>(state: &LatticeState<T>, target: impl Fn(Site, Direction) -> Site) -> LatticeState<T> {
    let mut out: BTreeMap<Site, CoinVector<T>> = BTreeMap::new();
    for (site, v) in state.iter() {
        for d in Direction::ALL {
            let a = v[d.index()];
            if a.is_zero() {
                continue;
            }
            out.entry(target(site, d)).or_insert([Complex::zero(); 4])[d.index()] = a;
        }
    }
    LatticeState::from_map(out, state.step_count())
}

/// Conditional displacement on the unbounded plane: `r` → x+1, `l` → x-1,
/// `u` → y+1, `d` → y-1. A pure relabeling of amplitudes.
pub fn displace<T: Real>(state: &LatticeState<T>) -> LatticeState<T> {
    displace_on(state, Lattice::Unbounded)
}

/// Conditional displacement with the given boundary.
pub fn displace_on<T: Real>(state: &LatticeState<T>, lattice: Lattice) -> LatticeState<T> {
    shifted(state, |s, d| {
        let (dx, dy) = d.shift();
        lattice.wrap(s.offset(dx, dy))
    })
}

fn coin_unchecked<T: Real>(state: &LatticeState<T>, coin: &CoinMatrix<T>) -> LatticeState<T> {
    let map = state.map().iter().map(|(s, v)| (*s, coin.apply(v))).collect();
    LatticeState::from_map(map, state.step_count())
}

/// Multiplies the coin vector at every occupied site by `coin`.
pub fn apply_coin<T: Real>(state: &LatticeState<T>, coin: &CoinMatrix<T>) -> Result<LatticeState<T>> {
    coin.ensure_unitary()?;
    Ok(coin_unchecked(state, coin))
}

/// One step `Ĉ·D̂` under the config's coin, mode and boundary. Increments the step count.
pub fn step<T: Real>(state: &LatticeState<T>, config: &WalkConfig<T>) -> Result<LatticeState<T>> {
    config.coin.ensure_unitary()?;
    config.lattice.check(state)?;
    if config.mode == Mode::TwoCoinLine {
        ensure_on_line(state)?;
    }
    Ok(step_unchecked(state, config))
}

fn step_unchecked<T: Real>(state: &LatticeState<T>, config: &WalkConfig<T>) -> LatticeState<T> {
    let moved = match config.mode {
        Mode::Plane => displace_on(state, config.lattice),
        Mode::TwoCoinLine => line_displace(state, config.lattice),
    };
    coin_unchecked(&moved, &config.coin).with_step_count(state.step_count() + 1)
}

/// `config.steps` applications of [`step`] to `config.initial`.
pub fn evolve<T: Real>(config: &WalkConfig<T>) -> Result<LatticeState<T>> {
    config.validate()?;
    let mut state = config.initial.clone();
    for _ in 0..config.steps {
        state = step_unchecked(&state, config);
    }
    Ok(state)
}

/// Like [`evolve`] but hands every intermediate state (including the initial one) to `visit`.
pub fn evolve_with<T: Real>(config: &WalkConfig<T>, mut visit: impl FnMut(&LatticeState<T>)) -> Result<LatticeState<T>> {
    config.validate()?;
    let mut state = config.initial.clone();
    visit(&state);
    for _ in 0..config.steps {
        state = step_unchecked(&state, config);
        visit(&state);
    }
    Ok(state)
}

fn ensure_on_line<T: Real>(state: &LatticeState<T>) -> Result<()> {
    match state.sites().find(|s| s.y != 0) {
        None => Ok(()),
        Some(site) => Err(Error::Support { site, reason: "line mode requires y = 0".into() }),
    }
}

fn line_displace<T: Real>(state: &LatticeState<T>, lattice: Lattice) -> LatticeState<T> {
    shifted(state, |s, d| lattice.wrap(s.offset(d.line_shift(), 0)))
}

/// One step of the walk on the line with two coins: `r`, `u` move to x+1,
/// `l`, `d` to x-1, then `coin` is applied.
pub fn two_coin_line_step<T: Real>(state: &LatticeState<T>, coin: &CoinMatrix<T>) -> Result<LatticeState<T>> {
    ensure_on_line(state)?;
    coin.ensure_unitary()?;
    Ok(coin_unchecked(&line_displace(state, Lattice::Unbounded), coin).with_step_count(state.step_count() + 1))
}
