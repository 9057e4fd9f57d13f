//! The five optical stages and their product `F3·S2·F2·S1·F1`.

use num_complex::Complex;
use num_traits::Zero;

use super::{CoinMatrix, OpticalCoinParams, PhaseLedger};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Phase filter `j` (1, 2 or 3): `diag(e^{iφ_j1}, …, e^{iφ_j4})`.
pub fn phase_stage<T: Real>(j: usize, params: &OpticalCoinParams<T>) -> Result<CoinMatrix<T>> {
    if !(1..=3).contains(&j) {
        return Err(Error::InvalidArgument(format!("phase stage index {j} not in 1..=3")));
    }
    let phases = params.phi[j - 1];
    Ok(CoinMatrix::diagonal(phases.map(|p| Complex::from_polar(T::one(), p))))
}

/// First splitter stage: mixes channels (1,2) with angle θ11 and (3,4) with θ12.
pub fn splitter_stage_1<T: Real>(params: &OpticalCoinParams<T>) -> CoinMatrix<T> {
    let (c1, s1) = trig(params.theta(1, 1));
    let (c2, s2) = trig(params.theta(1, 2));
    let z = Complex::zero();
    CoinMatrix::from_rows([
        [c1, s1, z, z],
        [s1, c1, z, z],
        [z, z, c2, s2],
        [z, z, s2, c2],
    ])
}

/// Second splitter stage: inputs (1,3) feed outputs (1,2) with angle θ21 and
/// inputs (2,4) feed outputs (3,4) with angle θ22.
pub fn splitter_stage_2<T: Real>(params: &OpticalCoinParams<T>) -> CoinMatrix<T> {
    let (c1, s1) = trig(params.theta(2, 1));
    let (c2, s2) = trig(params.theta(2, 2));
    let z = Complex::zero();
    CoinMatrix::from_rows([
        [c1, z, s1, z],
        [s1, z, c1, z],
        [z, c2, z, s2],
        [z, s2, z, c2],
    ])
}

/// `(cos θ, i sin θ)`
fn trig<T: Real>(theta: T) -> (Complex<T>, Complex<T>) {
    (Complex::new(theta.cos(), T::zero()), Complex::new(T::zero(), theta.sin()))
}

/// Explicit product `F3·S2·F2·S1·F1`.
pub fn synthesize_coin<T: Real>(params: &OpticalCoinParams<T>) -> CoinMatrix<T> {
    let f = |j| phase_stage(j, params).expect("stage index in range");
    let s1 = splitter_stage_1(params);
    let s2 = splitter_stage_2(params);
    (((f(3) * s2) * f(2)) * s1) * f(1)
}

/// Entry-by-entry assembly `magnitude_ij · e^{iα_ij}` from the splitter
/// trigonometry and the phase ledger.
///
/// Entry (3,3) carries `-s12·s22`; a widely reproduced form of this matrix
/// has `s11·s22` there, which disagrees with the explicit product.
pub fn closed_form_coin<T: Real>(params: &OpticalCoinParams<T>) -> CoinMatrix<T> {
    let (s11, c11) = params.theta(1, 1).sin_cos();
    let (s12, c12) = params.theta(1, 2).sin_cos();
    let (s21, c21) = params.theta(2, 1).sin_cos();
    let (s22, c22) = params.theta(2, 2).sin_cos();
    let re = |v: T| Complex::new(v, T::zero());
    let im = |v: T| Complex::new(T::zero(), v);
    let magnitude = [
        [re(c11 * c21), im(s11 * c21), im(c12 * s21), re(-s12 * s21)],
        [im(c11 * s21), re(-s11 * s21), re(c12 * c21), im(s12 * c21)],
        [im(s11 * c22), re(c11 * c22), re(-s12 * s22), im(c12 * s22)],
        [re(-s11 * s22), im(c11 * s22), im(s12 * c22), re(c12 * c22)],
    ];
    let ledger = PhaseLedger::from_params(params);
    CoinMatrix::from_fn(|i, j| magnitude[i][j] * Complex::from_polar(T::one(), ledger.alpha[i][j]))
}
