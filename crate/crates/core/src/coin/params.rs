use crate::error::{Error, Result};
use crate::scalar::Real;

/// Serialization keys in storage order: the four splitter angles, then the
/// phase filters stage by stage.
pub const PARAM_KEYS: [&str; 16] = [
    "theta11", "theta12", "theta21", "theta22", //
    "phi11", "phi12", "phi13", "phi14", //
    "phi21", "phi22", "phi23", "phi24", //
    "phi31", "phi32", "phi33", "phi34",
];

/// The sixteen real parameters of one realizable coin.
///
/// `theta = [θ11, θ12, θ21, θ22]`: first-stage splitters mix channels (1,2) and
/// (3,4); second-stage splitters mix (1,3) and (2,4).
/// `phi[j][k]` is the phase added to channel `k + 1` by filter stage `j + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct OpticalCoinParams<T> {
    pub theta: [T; 4],
    pub phi: [[T; 4]; 3],
}

impl<T: Real> OpticalCoinParams<T> {
    pub fn zero() -> Self {
        Self { theta: [T::zero(); 4], phi: [[T::zero(); 4]; 3] }
    }

    /// Splitter angle `θ_{stage,block}` with one-based indices.
    pub fn theta(&self, stage: usize, block: usize) -> T {
        self.theta[2 * (stage - 1) + (block - 1)]
    }

    /// Phase `φ_{stage,channel}` with one-based indices.
    pub fn phi(&self, stage: usize, channel: usize) -> T {
        self.phi[stage - 1][channel - 1]
    }

    /// Flattens in [`PARAM_KEYS`] order.
    pub fn to_array(&self) -> [T; 16] {
        let mut out = [T::zero(); 16];
        out[..4].copy_from_slice(&self.theta);
        for (j, stage) in self.phi.iter().enumerate() {
            out[4 + 4 * j..8 + 4 * j].copy_from_slice(stage);
        }
        out
    }

    pub fn from_array(v: &[T; 16]) -> Self {
        let mut p = Self::zero();
        p.theta.copy_from_slice(&v[..4]);
        for (j, stage) in p.phi.iter_mut().enumerate() {
            stage.copy_from_slice(&v[4 + 4 * j..8 + 4 * j]);
        }
        p
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<()> {
        match self.to_array().iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(i) => Err(Error::InvalidArgument(format!("{} is not finite", PARAM_KEYS[i]))),
        }
    }

    /// Splitter angles all π/4 with the Grover phase set, φ11 set to -π/2.
    ///
    /// The commonly quoted value φ11 = π/4 ([`Self::grover_phi11_quarter_pi`]) multiplies
    /// the first column by `e^{-3iπ/4}` and so does not give the Grover coin.
    pub fn grover() -> Self {
        let mut p = Self::grover_phi11_quarter_pi();
        p.phi[0][0] = -T::FRAC_PI_2();
        p
    }

    /// Grover phase set with φ11 = π/4. Only the first column differs from the Grover coin.
    pub fn grover_phi11_quarter_pi() -> Self {
        let (q, h, pi, z) = (T::FRAC_PI_4(), T::FRAC_PI_2(), T::PI(), T::zero());
        Self {
            theta: [q; 4],
            phi: [[q, z, h, z], [-h, -h, pi, pi], [z, h, h, z]],
        }
    }

    /// Splitter angles all π/4 with the DFT phase set. Synthesizes the DFT coin
    /// with channels `l` and `u` exchanged.
    pub fn dft() -> Self {
        let (q, h, pi, z) = (T::FRAC_PI_4(), T::FRAC_PI_2(), T::PI(), T::zero());
        Self {
            theta: [q; 4],
            phi: [[z, -h, z, -h], [h, z, z, z], [-h, -pi, -h, -pi]],
        }
    }

    /// Rewrites into the canonical ranges θ ∈ [0, π/2], φ ∈ (-π, π] while
    /// keeping the synthesized matrix fixed.
    ///
    /// Each splitter block `B(θ) = [[cos θ, i sin θ], [i sin θ, cos θ]]` obeys
    /// * `B(θ + π) = -B(θ)`: add π to the phases of both block outputs;
    /// * `B(-θ) = D·B(θ)·D` with `D = diag(1, -1)`: add π to the phase of the
    ///   block's second input and of its second output.
    ///
    /// θ is first reduced mod 2π, the first rule brings it into [0, π), and
    /// `B(θ) = -D·B(π - θ)·D` folds (π/2, π) onto [0, π/2). Output phases of a
    /// stage-1 block live in filter 2 and its input phases in filter 1; for
    /// stage-2 blocks they live in filters 3 and 2. Phases are wrapped last.
    pub fn normalized(&self) -> Self {
        let pi = T::PI();
        let two_pi = pi + pi;
        let mut p = *self;
        // (stage-major angle index, input filter, output filter, block inputs, block outputs)
        let blocks: [(usize, usize, usize, [usize; 2], [usize; 2]); 4] = [
            (0, 0, 1, [0, 1], [0, 1]),
            (1, 0, 1, [2, 3], [2, 3]),
            (2, 1, 2, [0, 2], [0, 1]),
            (3, 1, 2, [1, 3], [2, 3]),
        ];
        for (idx, fin, fout, ins, outs) in blocks {
            let mut t = p.theta[idx] % two_pi;
            if t < T::zero() {
                t += two_pi;
            }
            if t >= pi {
                t -= pi;
                p.phi[fout][outs[0]] += pi;
                p.phi[fout][outs[1]] += pi;
            }
            if t > T::FRAC_PI_2() {
                t = pi - t;
                // -D·B·D: sign on both outputs, then D on second input and second output
                p.phi[fout][outs[0]] += pi;
                p.phi[fin][ins[1]] += pi;
            }
            p.theta[idx] = t;
        }
        for stage in p.phi.iter_mut() {
            for v in stage.iter_mut() {
                *v = wrap_phase(*v);
            }
        }
        p
    }

    pub fn is_canonical(&self) -> bool {
        let pi = T::PI();
        self.theta.iter().all(|&t| t >= T::zero() && t <= T::FRAC_PI_2())
            && self.phi.iter().flatten().all(|&v| v > -pi && v <= pi)
    }
}

/// Wraps into (-π, π].
pub fn wrap_phase<T: Real>(v: T) -> T {
    let pi = T::PI();
    let two_pi = pi + pi;
    let mut w = v % two_pi;
    if w <= -pi {
        w += two_pi;
    } else if w > pi {
        w -= two_pi;
    }
    w
}

/// Index of the second-filter channel feeding entry `(row, col)` (zero-based):
/// rows 1–2 draw on channels 1/3 and rows 3–4 on channels 2/4, split by column pair.
const MIDDLE_CHANNEL: [[usize; 4]; 4] = [
    [0, 0, 2, 2],
    [0, 0, 2, 2],
    [1, 1, 3, 3],
    [1, 1, 3, 3],
];

/// The sixteen accumulated phases `α_ij = φ1_j + φ2_m(i,j) + φ3_i` carried by
/// the entries of a synthesized coin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseLedger<T> {
    pub alpha: [[T; 4]; 4],
}

impl<T: Real> PhaseLedger<T> {
    pub fn from_params(p: &OpticalCoinParams<T>) -> Self {
        Self {
            alpha: std::array::from_fn(|i| {
                std::array::from_fn(|j| p.phi[0][j] + p.phi[1][MIDDLE_CHANNEL[i][j]] + p.phi[2][i])
            }),
        }
    }

    /// The `(φ1, φ2, φ3)` channel triple (one-based) summed into `α_{row,col}` (one-based).
    pub fn sources(row: usize, col: usize) -> (usize, usize, usize) {
        (col, MIDDLE_CHANNEL[row - 1][col - 1] + 1, row)
    }
}
