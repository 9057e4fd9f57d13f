//! Inverse problem: find optical parameters reproducing a target coin up to a
//! global phase.
//!
//! Multi-start Levenberg–Marquardt on the 32 real residuals `C(p) - target`.
//! A global phase on the target is absorbed exactly by the first phase
//! filter, so the plain least-squares cost already reaches zero whenever the
//! target is reachable up to phase. The reported residual is the phase-free
//! `min_λ Σ |C(p) - λ·target|²`.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{phase_stage, splitter_stage_1, splitter_stage_2, CoinMatrix, OpticalCoinParams, DIM};
use crate::error::{Error, Result};
use crate::scalar::Real;

const NPARAM: usize = 16;
const NRES: usize = 2 * DIM * DIM;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig<T> {
    /// Number of random initial points.
    pub starts: usize,
    /// Iteration cap for each local refinement.
    pub max_iterations: usize,
    /// Phase-free residual at or below which a fit counts as converged.
    pub success_threshold: T,
    pub seed: u64,
}

impl<T: Real> Default for FitConfig<T> {
    fn default() -> Self {
        Self {
            starts: 64,
            max_iterations: 2000,
            success_threshold: T::lit(T::FIT_THRESHOLD),
            seed: 0x005e_ed0f_c01d,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitReport<T> {
    /// Best parameters found, in canonical ranges.
    pub params: OpticalCoinParams<T>,
    /// Phase-free residual of `params` against the target.
    pub residual: T,
    /// Index of the start that produced `params`.
    pub start: usize,
    /// Starts actually run (the search stops at the first converged one).
    pub starts_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FitOutcome<T> {
    Converged(FitReport<T>),
    /// Budget exhausted above the success threshold; carries the best attempt.
    NotReachable(FitReport<T>),
}

impl<T> FitOutcome<T> {
    pub fn report(&self) -> &FitReport<T> {
        match self {
            FitOutcome::Converged(r) | FitOutcome::NotReachable(r) => r,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, FitOutcome::Converged(_))
    }
}

/// Fits optical parameters to a unitary `target`.
///
/// Starts are drawn from a ChaCha stream seeded with `config.seed` and run in
/// index order; the lowest residual wins, earlier index on ties.
pub fn fit_params<T: Real>(target: &CoinMatrix<T>, config: &FitConfig<T>) -> Result<FitOutcome<T>> {
    if !target.is_finite() {
        return Err(Error::InvalidArgument("target matrix has non-finite entries".into()));
    }
    target.ensure_unitary()?;
    if config.starts == 0 {
        return Err(Error::InvalidArgument("fit needs at least one start".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<FitReport<T>> = None;
    let mut runs = 0;
    for start in 0..config.starts {
        runs += 1;
        let p0 = random_params::<T, _>(&mut rng);
        let p = refine(target, p0, config.max_iterations, config.success_threshold);
        let residual = super::synthesize_coin(&p).phase_free_residual(target);
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(FitReport { params: p.normalized(), residual, start, starts_used: 0 });
        }
        if residual <= config.success_threshold {
            break;
        }
    }
    let mut report = best.expect("at least one start");
    report.starts_used = runs;
    if report.residual <= config.success_threshold {
        Ok(FitOutcome::Converged(report))
    } else {
        Ok(FitOutcome::NotReachable(report))
    }
}

fn random_params<T: Real, R: Rng>(rng: &mut R) -> OpticalCoinParams<T> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let mut v = [T::zero(); NPARAM];
    for (i, x) in v.iter_mut().enumerate() {
        *x = T::lit(if i < 4 { rng.random_range(0.0..=FRAC_PI_2) } else { rng.random_range(-PI..PI) });
    }
    OpticalCoinParams::from_array(&v)
}

/// Residual vector `vec(C(p) - target)` split into real and imaginary parts,
/// and its Jacobian `J[r][k] = ∂res_r/∂p_k`.
fn residual_and_jacobian<T: Real>(
    p: &OpticalCoinParams<T>,
    target: &CoinMatrix<T>,
) -> ([T; NRES], Box<[[T; NPARAM]; NRES]>) {
    let f1 = phase_stage(1, p).expect("stage 1");
    let f2 = phase_stage(2, p).expect("stage 2");
    let f3 = phase_stage(3, p).expect("stage 3");
    let s1 = splitter_stage_1(p);
    let s2 = splitter_stage_2(p);

    let right = (f2 * s1) * f1; // F2 S1 F1
    let left = f3 * s2; // F3 S2
    let c = left * right;

    let i_unit = Complex::new(T::zero(), T::one());
    let mut derivs = [CoinMatrix::<T>::zero(); NPARAM];

    // splitter angles
    let upper = (f3 * s2) * f2;
    let d_block = |theta: T, stage2: bool, block: usize| -> CoinMatrix<T> {
        let (s, co) = theta.sin_cos();
        let ds = Complex::new(-s, T::zero());
        let dc = Complex::new(T::zero(), co);
        let (ins, outs) = match (stage2, block) {
            (false, 0) => ([0, 1], [0, 1]),
            (false, _) => ([2, 3], [2, 3]),
            (true, 0) => ([0, 2], [0, 1]),
            (true, _) => ([1, 3], [2, 3]),
        };
        let mut rows = *CoinMatrix::zero().rows();
        rows[outs[0]][ins[0]] = ds;
        rows[outs[0]][ins[1]] = dc;
        rows[outs[1]][ins[0]] = dc;
        rows[outs[1]][ins[1]] = ds;
        CoinMatrix::from_rows(rows)
    };
    derivs[0] = (upper * d_block(p.theta[0], false, 0)) * f1;
    derivs[1] = (upper * d_block(p.theta[1], false, 1)) * f1;
    derivs[2] = ((f3 * d_block(p.theta[2], true, 0)) * f2) * (s1 * f1);
    derivs[3] = ((f3 * d_block(p.theta[3], true, 1)) * f2) * (s1 * f1);

    // phases: filter 1 scales a column of C, filter 3 a row, filter 2 an outer product
    let pre_f2 = s1 * f1;
    for k in 0..DIM {
        derivs[4 + k] = CoinMatrix::from_fn(|a, b| if b == k { c.entry(a, b) * i_unit } else { Complex::zero() });
        derivs[8 + k] = CoinMatrix::from_fn(|a, b| {
            left.entry(a, k) * f2.entry(k, k) * pre_f2.entry(k, b) * i_unit
        });
        derivs[12 + k] = CoinMatrix::from_fn(|a, b| if a == k { c.entry(a, b) * i_unit } else { Complex::zero() });
    }

    let mut res = [T::zero(); NRES];
    let mut jac = Box::new([[T::zero(); NPARAM]; NRES]);
    for a in 0..DIM {
        for b in 0..DIM {
            let r = 2 * (DIM * a + b);
            let d = c.entry(a, b) - target.entry(a, b);
            res[r] = d.re;
            res[r + 1] = d.im;
            for (k, dk) in derivs.iter().enumerate() {
                let z = dk.entry(a, b);
                jac[r][k] = z.re;
                jac[r + 1][k] = z.im;
            }
        }
    }
    (res, jac)
}

fn cost<T: Real>(p: &OpticalCoinParams<T>, target: &CoinMatrix<T>) -> T {
    let c = super::synthesize_coin(p);
    c.rows()
        .iter()
        .flatten()
        .zip(target.rows().iter().flatten())
        .map(|(a, b)| (a - b).norm_sqr())
        .fold(T::zero(), |x, y| x + y)
}

/// One Levenberg–Marquardt descent with Nielsen's damping update.
fn refine<T: Real>(
    target: &CoinMatrix<T>,
    start: OpticalCoinParams<T>,
    max_iterations: usize,
    threshold: T,
) -> OpticalCoinParams<T> {
    let stop_cost = threshold * T::lit(1e-6);
    let mut p = start.to_array();
    let mut current = cost(&OpticalCoinParams::from_array(&p), target);
    let mut mu = T::lit(1e-3);
    let mut nu = T::lit(2.0);
    let mut fresh = true;
    let (mut res, mut jac) = ([T::zero(); NRES], Box::new([[T::zero(); NPARAM]; NRES]));

    for _ in 0..max_iterations {
        if current <= stop_cost {
            break;
        }
        if fresh {
            (res, jac) = residual_and_jacobian(&OpticalCoinParams::from_array(&p), target);
        }
        let mut normal = [[T::zero(); NPARAM]; NPARAM];
        let mut grad = [T::zero(); NPARAM];
        for r in 0..NRES {
            for k in 0..NPARAM {
                grad[k] += jac[r][k] * res[r];
                for l in k..NPARAM {
                    normal[k][l] += jac[r][k] * jac[r][l];
                }
            }
        }
        for k in 0..NPARAM {
            for l in 0..k {
                normal[k][l] = normal[l][k];
            }
        }
        let gmax = grad.iter().fold(T::zero(), |m, g| m.max(g.abs()));
        if gmax <= T::epsilon() * T::epsilon() {
            break;
        }

        let mut damped = normal;
        for (k, row) in damped.iter_mut().enumerate() {
            row[k] += mu * normal[k][k].max(T::lit(1e-9));
        }
        let neg_grad = grad.map(|g| -g);
        let Some(step) = cholesky_solve(&damped, &neg_grad) else {
            mu *= nu;
            nu += nu;
            fresh = false;
            continue;
        };

        let mut trial = p;
        for k in 0..NPARAM {
            trial[k] += step[k];
        }
        let trial_cost = cost(&OpticalCoinParams::from_array(&trial), target);
        // predicted decrease of ½|r|² is ½ δ·(μ D δ - g)
        let mut predicted = T::zero();
        for k in 0..NPARAM {
            predicted += step[k] * (mu * normal[k][k].max(T::lit(1e-9)) * step[k] - grad[k]);
        }
        let half = T::lit(0.5);
        let actual = half * (current - trial_cost);
        let rho = if predicted > T::zero() { actual / (half * predicted) } else { -T::one() };

        if rho > T::zero() && trial_cost.is_finite() {
            let step_norm = step.iter().fold(T::zero(), |m, s| m.max(s.abs()));
            p = trial;
            current = trial_cost;
            let t = T::lit(2.0) * rho - T::one();
            mu *= T::lit(1.0 / 3.0).max(T::one() - t * t * t);
            nu = T::lit(2.0);
            fresh = true;
            if step_norm <= T::epsilon() {
                break;
            }
        } else {
            mu *= nu;
            nu += nu;
            fresh = false;
            if mu > T::lit(1e30) {
                break;
            }
        }
    }
    OpticalCoinParams::from_array(&p)
}

/// Solves `a·x = b` for symmetric positive definite `a`.
fn cholesky_solve<T: Real>(a: &[[T; NPARAM]; NPARAM], b: &[T; NPARAM]) -> Option<[T; NPARAM]> {
    let mut l = [[T::zero(); NPARAM]; NPARAM];
    for i in 0..NPARAM {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= T::zero() || !sum.is_finite() {
                    return None;
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    let mut y = [T::zero(); NPARAM];
    for i in 0..NPARAM {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i][k] * y[k];
        }
        y[i] = sum / l[i][i];
    }
    let mut x = [T::zero(); NPARAM];
    for i in (0..NPARAM).rev() {
        let mut sum = y[i];
        for k in i + 1..NPARAM {
            sum -= l[k][i] * x[k];
        }
        x[i] = sum / l[i][i];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}
