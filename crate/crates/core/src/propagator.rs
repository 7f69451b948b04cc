use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64 as C64;

use crate::error::Result;

/// Linear map from the initial upper-level amplitudes `(c₃, c₂)` to
/// `(A₃(t), A₂(t))`. Column `k` is the response to the `k`-th basis state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub t: f64,
    pub m: Matrix2<C64>,
}

impl Propagator {
    pub fn identity(t: f64) -> Self {
        Self {
            t,
            m: Matrix2::identity(),
        }
    }

    pub fn apply(&self, c3: C64, c2: C64) -> (C64, C64) {
        let a = self.m * Vector2::new(c3, c2);
        (a[0], a[1])
    }

    /// Largest entry of `|m - I|`.
    pub fn identity_defect(&self) -> f64 {
        (self.m - Matrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn column_norms(&self) -> [f64; 2] {
        [self.m.column(0).norm(), self.m.column(1).norm()]
    }
}

/// Anything that can produce the propagator at an arbitrary time.
pub trait PropagatorSource: Sync {
    fn propagator(&self, t: f64) -> Result<Propagator>;
}

impl<F> PropagatorSource for F
where
    F: Fn(f64) -> Result<Propagator> + Sync,
{
    fn propagator(&self, t: f64) -> Result<Propagator> {
        self(t)
    }
}
