//! Scalar abstraction so the whole pipeline can run on `f32` or `f64`.
//!
//! Everything numeric in this crate (feature values, gradient sums, gains,
//! attack objectives) is generic over [`Scalar`]. The crate root exposes
//! `f64`-backed type aliases, which is what the CLI and the reference
//! experiments use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar usable throughout the crate.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Convert from `f64`, rounding if the target type is narrower.
    fn cast_from(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 must convert to scalar")
    }

    /// Widen to `f64` (exact for f32 and f64).
    fn cast_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Compensated (Kahan) running sum with exact add/remove pairing.
///
/// Split statistics are updated incrementally thousands of times per node;
/// plain accumulation drifts enough to flip gain comparisons on large nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KahanSum<S> {
    sum: S,
    comp: S,
}

impl<S: Scalar> KahanSum<S> {
    pub fn new() -> Self {
        KahanSum {
            sum: S::zero(),
            comp: S::zero(),
        }
    }

    pub fn add(&mut self, v: S) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn remove(&mut self, v: S) {
        self.add(-v);
    }

    pub fn value(&self) -> S {
        self.sum
    }
}
