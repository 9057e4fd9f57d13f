//! 4×4 coin unitaries and their five-stage optical decomposition.
//!
//! Basis order everywhere is `(r, l, u, d)`. The exact algebra on
//! [`CoinMatrix`] (products, adjoints, the fixed Grover and DFT coins, the
//! `l`/`u` exchange) only needs a numeric ring, so it also works over
//! rationals; everything touching trigonometry or tolerances needs [`Real`].

mod fit;
mod params;
mod stages;

use std::ops::{Mul, Neg};

use num_complex::Complex;
use num_traits::{Num, One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use fit::{fit_params, FitConfig, FitOutcome, FitReport};
pub use params::{OpticalCoinParams, PhaseLedger, PARAM_KEYS};
pub use stages::{closed_form_coin, phase_stage, splitter_stage_1, splitter_stage_2, synthesize_coin};

/// Dimension of the coin space.
pub const DIM: usize = 4;

/// A 4×4 complex matrix acting on coin vectors ordered `(r, l, u, d)`.
///
/// Unitarity is not enforced on construction because targets read from disk
/// may be invalid; operations that require it check [`CoinMatrix::unitarity_defect`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinMatrix<T> {
    entries: [[Complex<T>; DIM]; DIM],
}

impl<T> CoinMatrix<T> {
    pub const fn from_rows(entries: [[Complex<T>; DIM]; DIM]) -> Self {
        Self { entries }
    }

    pub fn rows(&self) -> &[[Complex<T>; DIM]; DIM] {
        &self.entries
    }

    /// Entry at zero-based `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> &Complex<T> {
        &self.entries[row][col]
    }
}

impl<T: Clone + Num> CoinMatrix<T> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        Self {
            entries: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))),
        }
    }

    pub fn zero() -> Self {
        Self::from_fn(|_, _| Complex::zero())
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn diagonal(diag: [Complex<T>; DIM]) -> Self {
        Self::from_fn(|i, j| if i == j { diag[i].clone() } else { Complex::zero() })
    }

    /// Left-multiplies a coin vector.
    pub fn apply(&self, v: &[Complex<T>; DIM]) -> [Complex<T>; DIM] {
        std::array::from_fn(|i| {
            self.entries[i]
                .iter()
                .zip(v)
                .fold(Complex::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
        })
    }

    pub fn scale(&self, factor: &Complex<T>) -> Self {
        Self::from_fn(|i, j| self.entries[i][j].clone() * factor.clone())
    }
}

impl<T: Clone + Num + Neg<Output = T>> CoinMatrix<T> {
    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.entries[j][i].conj())
    }
}

impl<T: Clone + Num> Mul for &CoinMatrix<T> {
    type Output = CoinMatrix<T>;

    fn mul(self, rhs: &CoinMatrix<T>) -> CoinMatrix<T> {
        CoinMatrix::from_fn(|i, j| {
            (0..DIM).fold(Complex::zero(), |acc, k| {
                acc + self.entries[i][k].clone() * rhs.entries[k][j].clone()
            })
        })
    }
}

impl<T: Clone + Num> Mul for CoinMatrix<T> {
    type Output = CoinMatrix<T>;

    fn mul(self, rhs: CoinMatrix<T>) -> CoinMatrix<T> {
        &self * &rhs
    }
}

fn half<T: Clone + Num>() -> T {
    T::one() / (T::one() + T::one())
}

/// The Grover (diffusion) coin: `(1/2)` times the all-ones matrix with `-1` on the diagonal.
pub fn grover_coin<T: Clone + Num + Neg<Output = T>>() -> CoinMatrix<T> {
    let h = half::<T>();
    CoinMatrix::from_fn(|i, j| {
        let v = if i == j { -h.clone() } else { h.clone() };
        Complex::new(v, T::zero())
    })
}

/// The four-point discrete Fourier transform coin, entry `(j, k) = i^(jk) / 2`.
pub fn dft_coin<T: Clone + Num + Neg<Output = T>>() -> CoinMatrix<T> {
    let h = half::<T>();
    let powers = [
        Complex::new(h.clone(), T::zero()),
        Complex::new(T::zero(), h.clone()),
        Complex::new(-h.clone(), T::zero()),
        Complex::new(T::zero(), -h),
    ];
    CoinMatrix::from_fn(|i, j| powers[(i * j) % 4].clone())
}

/// The DFT coin with channels `l` and `u` exchanged, which is what the optical
/// stages produce directly from the DFT preset.
pub fn dft_prime_coin<T: Clone + Num + Neg<Output = T>>() -> CoinMatrix<T> {
    permute_lu(&dft_coin())
}

/// Conjugates by the permutation exchanging basis indices 2 and 3 (channels `l` and `u`).
///
/// The permutation is its own inverse, so this is an involution.
pub fn permute_lu<T: Clone>(c: &CoinMatrix<T>) -> CoinMatrix<T> {
    const SWAP: [usize; DIM] = [0, 2, 1, 3];
    CoinMatrix {
        entries: std::array::from_fn(|i| std::array::from_fn(|j| c.entries[SWAP[i]][SWAP[j]].clone())),
    }
}

impl<T: Real> CoinMatrix<T> {
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Max-norm of `C†C - I`.
    pub fn unitarity_defect(&self) -> T {
        (&self.adjoint() * self).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Fails with [`Error::NotUnitary`] unless the defect is within the scalar's default tolerance.
    pub fn ensure_unitary(&self) -> Result<()> {
        let defect = self.unitarity_defect();
        if defect <= T::lit(T::UNITARITY_TOL) {
            Ok(())
        } else {
            Err(Error::NotUnitary { defect: defect.to_f64_lossy() })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `Σ |a_ij|²`.
    pub fn frobenius_sqr(&self) -> T {
        self.entries.iter().flatten().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    /// `Σ conj(self_ij) · other_ij`, the Hilbert–Schmidt inner product.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// `min_λ Σ |self - λ·target|²` over unit complex `λ`.
    ///
    /// The optimum is `λ = ⟨target, self⟩ / |⟨target, self⟩|`; the sum is then
    /// taken directly, since the expanded form cancels catastrophically near zero.
    pub fn phase_free_residual(&self, target: &Self) -> T {
        let overlap = target.inner(self);
        let lambda = if overlap.norm() > T::zero() { overlap / overlap.norm() } else { Complex::one() };
        self.entries
            .iter()
            .flatten()
            .zip(target.entries.iter().flatten())
            .map(|(a, b)| (a - b * lambda).norm_sqr())
            .fold(T::zero(), |x, y| x + y)
    }

    pub fn cast<U: Real>(&self) -> CoinMatrix<U> {
        CoinMatrix::from_fn(|i, j| {
            let z = self.entries[i][j];
            Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy()))
        })
    }

    /// Haar-distributed random unitary, from Gram–Schmidt on a complex Gaussian matrix.
    pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut cols: [[Complex<T>; DIM]; DIM] = std::array::from_fn(|_| {
                std::array::from_fn(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex::new(T::lit(re), T::lit(im))
                })
            });
            let mut degenerate = false;
            for j in 0..DIM {
                for k in 0..j {
                    let proj = (0..DIM).fold(Complex::zero(), |acc, i| acc + cols[k][i].conj() * cols[j][i]);
                    for i in 0..DIM {
                        let sub = cols[k][i] * proj;
                        cols[j][i] -= sub;
                    }
                }
                let norm = cols[j].iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
                if norm < T::lit(1e-6) {
                    degenerate = true;
                    break;
                }
                for z in cols[j].iter_mut() {
                    *z /= norm;
                }
            }
            if !degenerate {
                return Self::from_fn(|i, j| cols[j][i]);
            }
        }
    }
}

/// True iff some unit complex `λ` gives `max |a - λ·b| <= tol`.
///
/// `λ` is taken from the largest-magnitude entry of `b` and the matching entry of `a`.
pub fn equal_up_to_global_phase<T: Real>(a: &CoinMatrix<T>, b: &CoinMatrix<T>, tol: T) -> bool {
    let (mut bi, mut bj, mut best) = (0, 0, T::zero());
    for i in 0..DIM {
        for j in 0..DIM {
            let m = b.entries[i][j].norm();
            if m > best {
                best = m;
                bi = i;
                bj = j;
            }
        }
    }
    let ratio = a.entries[bi][bj] * b.entries[bi][bj].conj();
    let lambda = if ratio.norm() > T::zero() {
        ratio / ratio.norm()
    } else {
        Complex::one()
    };
    a.max_abs_diff(&b.scale(&lambda)) <= tol
}
