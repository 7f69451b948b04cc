//! Closed-form propagator of the atom in free space.
//!
//! The amplitudes obey
//! `A₃' = -γ₃₁A₃ - γ̄ e^{iω₃₂t} A₂`, `A₂' = -γ₂₁A₂ - γ̄ e^{-iω₃₂t} A₃`
//! with `γ̄ = √(γ₃₁γ₂₁)`. Writing `A₃ = e^{-γ₃₁t} Σ C_j e^{q_j t}` and
//! `A₂ = e^{-(γ₃₁+iω₃₂)t} Σ B_j e^{q_j t}` gives
//! `q² - λq - γ̄² = 0`, `λ = γ₃₁ - γ₂₁ + iω₃₂`, and `B_j = -q_j C_j / γ̄`.

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};
use crate::propagator::{Propagator, PropagatorSource};

/// Below this `γ̄` the levels are treated as decoupled.
pub const DEGENERATE_COUPLING: f64 = 1e-8;
/// Below this `|q₁ - q₂|` the double-root form is used.
pub const CONFLUENT_GAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeParams {
    gamma31: f64,
    gamma21: f64,
    omega32: f64,
}

impl FreeParams {
    pub fn new(gamma31: f64, gamma21: f64, omega32: f64) -> Result<Self> {
        if !(gamma31 > 0.0 && gamma31.is_finite()) {
            return invalid(format!(
                "gamma31 must be positive and finite, got {gamma31}"
            ));
        }
        if !(gamma21 >= 0.0 && gamma21.is_finite()) {
            return invalid(format!(
                "gamma21 must be nonnegative and finite, got {gamma21}"
            ));
        }
        if !omega32.is_finite() {
            return invalid(format!("omega32 must be finite, got {omega32}"));
        }
        Ok(Self {
            gamma31,
            gamma21,
            omega32,
        })
    }

    pub fn gamma31(&self) -> f64 {
        self.gamma31
    }

    pub fn gamma21(&self) -> f64 {
        self.gamma21
    }

    pub fn omega32(&self) -> f64 {
        self.omega32
    }

    /// Cross-damping `γ̄ = √(γ₃₁γ₂₁)`.
    pub fn gamma_bar(&self) -> f64 {
        (self.gamma31 * self.gamma21).sqrt()
    }

    /// `λ = γ₃₁ - γ₂₁ + iω₃₂`.
    pub fn lambda(&self) -> C64 {
        C64::new(self.gamma31 - self.gamma21, self.omega32)
    }

    /// Exponents `(q₁, q₂) = λ/2 ± √((λ/2)² + γ̄²)`; the smaller one is formed
    /// from the product `q₁q₂ = -γ̄²` to avoid cancellation.
    pub fn exponents(&self) -> (C64, C64) {
        let mu = self.lambda() / 2.0;
        let gb2 = self.gamma31 * self.gamma21;
        let disc = (mu * mu + gb2).sqrt();
        let (plus, minus) = (mu + disc, mu - disc);
        if plus.norm() >= minus.norm() {
            let small = if plus.norm() > 0.0 {
                -gb2 / plus
            } else {
                minus
            };
            (plus, small)
        } else {
            let small = if minus.norm() > 0.0 {
                -gb2 / minus
            } else {
                plus
            };
            (small, minus)
        }
    }
}

pub fn propagator_free(t: f64, p: &FreeParams) -> Result<Propagator> {
    if !(t >= 0.0) || !t.is_finite() {
        return invalid(format!("time must be finite and nonnegative, got {t}"));
    }
    let gb = p.gamma_bar();
    if gb < DEGENERATE_COUPLING {
        let m = Matrix2::new(
            C64::new((-p.gamma31 * t).exp(), 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new((-p.gamma21 * t).exp(), 0.0),
        );
        return Ok(Propagator { t, m });
    }
    let d3 = C64::new(-p.gamma31 * t, 0.0).exp();
    let d2 = C64::new(-p.gamma31 * t, -p.omega32 * t).exp();
    let (q1, q2) = p.exponents();
    let mut m = Matrix2::<C64>::zeros();
    for (col, (c3, c2)) in [(1.0, 0.0), (0.0, 1.0)].into_iter().enumerate() {
        let (x, y) = if (q1 - q2).norm() < CONFLUENT_GAP {
            let mu = (q1 + q2) / 2.0;
            let e = (mu * t).exp();
            let x = e * (c3 + t * (-mu * c3 - gb * c2));
            let y = e * (c2 + t * (-gb * c3 + (p.lambda() - mu) * c2));
            (x, y)
        } else {
            let dq = q1 - q2;
            let k1 = (-gb * c2 - q2 * c3) / dq;
            let k2 = (q1 * c3 + gb * c2) / dq;
            let (e1, e2) = ((q1 * t).exp(), (q2 * t).exp());
            let x = k1 * e1 + k2 * e2;
            let y = -(q1 * k1 * e1 + q2 * k2 * e2) / gb;
            (x, y)
        };
        m[(0, col)] = d3 * x;
        m[(1, col)] = d2 * y;
    }
    Ok(Propagator { t, m })
}

impl PropagatorSource for FreeParams {
    fn propagator(&self, t: f64) -> Result<Propagator> {
        propagator_free(t, self)
    }
}
