//! Brute-force reference: the whole step operator as one dense matrix on a
//! small periodic lattice.
//!
//! Index layout is site-major with the coin index last:
//! `index = 4·(side·y + x) + c`, `c ∈ {0: r, 1: l, 2: u, 3: d}`.

use num_complex::Complex;
use num_traits::Zero;

use crate::coin::CoinMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::walk::{CoinVector, Direction, LatticeState, Site};

/// Dense `4·side² × 4·side²` matrix of `(coin ⊗ 1)·D_periodic`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalUnitary<T> {
    side: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> GlobalUnitary<T> {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn dimension(&self) -> usize {
        4 * self.side * self.side
    }

    pub fn index(&self, site: Site, direction: Direction) -> usize {
        4 * (self.side * site.y as usize + site.x as usize) + direction.index()
    }

    /// Inverse of [`GlobalUnitary::index`].
    pub fn basis_of(&self, index: usize) -> (Site, Direction) {
        let cell = index / 4;
        let site = Site::new((cell % self.side) as i64, (cell / self.side) as i64);
        (site, Direction::ALL[index % 4])
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dimension() + col]
    }

    /// Max-norm of `U†U - I`.
    pub fn unitarity_defect(&self) -> T {
        let n = self.dimension();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::zero();
                for k in 0..n {
                    acc += self.entries[k * n + i].conj() * self.entries[k * n + j];
                }
                if i == j {
                    acc -= Complex::new(T::one(), T::zero());
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dimension();
        (0..n)
            .map(|i| {
                self.entries[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Rows of the matrix, for dumping in the shared matrix format.
    pub fn to_rows(&self) -> Vec<Vec<Complex<T>>> {
        self.entries.chunks(self.dimension()).map(<[_]>::to_vec).collect()
    }
}

/// Builds the one-step operator on a `side × side` torus.
pub fn build_global<T: Real>(coin: &CoinMatrix<T>, side: usize) -> Result<GlobalUnitary<T>> {
    if side < 3 {
        return Err(Error::InvalidArgument(format!("lattice side {side} < 3")));
    }
    let n = 4 * side * side;
    let mut u = GlobalUnitary { side, entries: vec![Complex::zero(); n * n] };
    let l = side as i64;
    for y in 0..l {
        for x in 0..l {
            for d in Direction::ALL {
                let col = u.index(Site::new(x, y), d);
                let (dx, dy) = d.shift();
                let target = Site::new((x + dx).rem_euclid(l), (y + dy).rem_euclid(l));
                for out in Direction::ALL {
                    let row = u.index(target, out);
                    u.entries[row * n + col] = *coin.entry(out.index(), d.index());
                }
            }
        }
    }
    Ok(u)
}

/// Applies `u` to the flattened `initial` state `steps` times.
pub fn evolve_dense<T: Real>(u: &GlobalUnitary<T>, initial: &LatticeState<T>, steps: u64) -> Result<LatticeState<T>> {
    let l = u.side as i64;
    let mut v = vec![Complex::zero(); u.dimension()];
    for (site, amps) in initial.iter() {
        if !(0..l).contains(&site.x) || !(0..l).contains(&site.y) {
            return Err(Error::Support { site, reason: format!("outside the {l}×{l} dense lattice") });
        }
        for d in Direction::ALL {
            v[u.index(site, d)] = amps[d.index()];
        }
    }
    for _ in 0..steps {
        v = u.apply(&v);
    }
    let sites = v.chunks(4).enumerate().map(|(cell, c)| {
        let (site, _) = u.basis_of(4 * cell);
        let amps: CoinVector<T> = [c[0], c[1], c[2], c[3]];
        (site, amps)
    });
    Ok(LatticeState::collect(sites, initial.step_count() + steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::grover_coin;

    #[test]
    fn identity_coin_is_permutation() {
        let u = build_global(&CoinMatrix::<f64>::identity(), 3).unwrap();
        let n = u.dimension();
        assert_eq!(n, 36);
        for col in 0..n {
            let nz: Vec<_> = (0..n).filter(|&r| u.entry(r, col) != Complex::zero()).collect();
            assert_eq!(nz.len(), 1);
            assert_eq!(u.entry(nz[0], col), Complex::new(1.0, 0.0));
        }
        for row in 0..n {
            assert_eq!((0..n).filter(|&c| u.entry(row, c) != Complex::zero()).count(), 1);
        }
    }

    #[test]
    fn grover_global_is_unitary() {
        let u = build_global(&grover_coin::<f64>(), 3).unwrap();
        assert!(u.unitarity_defect() <= 1e-13);
    }

    #[test]
    fn origin_r_column_lands_on_site_one_zero() {
        let u = build_global(&grover_coin::<f64>(), 3).unwrap();
        let col = u.index(Site::ORIGIN, Direction::R);
        for row in 0..u.dimension() {
            if u.entry(row, col) != Complex::zero() {
                assert_eq!(u.basis_of(row).0, Site::new(1, 0));
            }
        }
    }

    #[test]
    fn index_layout_is_bijective() {
        let u = build_global(&CoinMatrix::<f64>::identity(), 5).unwrap();
        for i in 0..u.dimension() {
            let (s, d) = u.basis_of(i);
            assert_eq!(u.index(s, d), i);
        }
        assert_eq!(u.index(Site::new(1, 2), Direction::U), 4 * (5 * 2 + 1) + 2);
    }

    #[test]
    fn rejects_small_side_and_outside_support() {
        assert!(build_global(&CoinMatrix::<f64>::identity(), 2).is_err());
        let u = build_global(&CoinMatrix::<f64>::identity(), 3).unwrap();
        let s = LatticeState::basis(Site::new(3, 0), Direction::R);
        assert!(matches!(evolve_dense(&u, &s, 1), Err(Error::Support { .. })));
    }

    #[test]
    fn full_period_returns_initial() {
        let u = build_global(&CoinMatrix::<f64>::identity(), 5).unwrap();
        let s = LatticeState::<f64>::symmetric_origin();
        assert_eq!(evolve_dense(&u, &s, 0).unwrap(), s);
        let back = evolve_dense(&u, &s, 5).unwrap();
        assert!(back.max_abs_diff(&s) < 1e-15);
        assert_eq!(back.step_count(), 5);
    }
}
