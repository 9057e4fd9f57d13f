//! Simulation and optical synthesis toolkit for the two-dimensional coined
//! quantum walk.
//!
//! * [`coin`]: 4×4 coins, the five-stage phase-filter/beam-splitter
//!   decomposition, its closed form, presets and the inverse fit.
//! * [`walk`]: sparse evolution under `(Ĉ·D̂)^n`, probabilities and moments,
//!   and the two-coin walk on the line.
//! * [`spectral`]: frequency encoding of position, polarizer readout and decoding.
//! * [`dense`]: dense global-unitary reference on a periodic lattice.
//! * [`io`]: text formats for parameters, matrices, states and CSV outputs.
//!
//! Everything numeric is generic over [`Real`] (`f32`/`f64`); the exact coin
//! algebra also runs over rationals, and frequencies may be rational. The
//! aliases below fix the usual double-precision instantiation.

pub mod coin;
pub mod dense;
pub mod error;
pub mod io;
pub mod scalar;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Coin = coin::CoinMatrix<f64>;
pub type Coin32 = coin::CoinMatrix<f32>;
pub type Params = coin::OpticalCoinParams<f64>;
pub type Params32 = coin::OpticalCoinParams<f32>;
pub type State = walk::LatticeState<f64>;
pub type State32 = walk::LatticeState<f32>;
pub type Field = walk::ProbabilityField<f64>;
pub type Walk = walk::WalkConfig<f64>;
pub type Global = dense::GlobalUnitary<f64>;
/// Exact rational frequency.
pub type ExactFrequency = num_rational::Ratio<i128>;
pub type ExactEncoding = spectral::EncodingConfig<ExactFrequency>;
pub type DecimalEncoding = spectral::EncodingConfig<f64>;
