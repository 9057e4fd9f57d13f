//! Scalar abstraction shared by the coin, walk and oracle modules.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point scalar the simulation core is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Largest tolerated max-norm of `C†C - I` when a coin is required to be unitary.
    const UNITARITY_TOL: f64;
    /// Largest tolerated deviation of a state's squared norm from one.
    const NORM_TOL: f64;
    /// Default success threshold of the coin fitting residual.
    const FIT_THRESHOLD: f64;

    /// Converts an `f64` literal. Panics only for values the type cannot represent.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const UNITARITY_TOL: f64 = 1e-10;
    const NORM_TOL: f64 = 1e-10;
    const FIT_THRESHOLD: f64 = 1e-16;
}

impl Real for f32 {
    const UNITARITY_TOL: f64 = 1e-5;
    const NORM_TOL: f64 = 1e-5;
    const FIT_THRESHOLD: f64 = 1e-8;
}
