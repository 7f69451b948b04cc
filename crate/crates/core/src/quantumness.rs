//! Coherence and the Hilbert–Schmidt-speed witness of information backflow.

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};
use crate::numerics::derivative_on_grid;
use crate::state::DensityMatrix3;

/// l1-norm coherence: sum of the moduli of the six off-diagonal elements.
pub fn coherence_l1(rho: &DensityMatrix3) -> f64 {
    let r = rho.matrix();
    let mut s = 0.0;
    for j in 0..3 {
        for k in 0..3 {
            if j != k {
                s += r[(j, k)].norm();
            }
        }
    }
    s
}

/// `√(½ tr[(dρ/dφ)²])`; for a Hermitian argument the trace is the sum of
/// squared moduli of the entries.
pub fn hss(drho_phi: &Matrix3<C64>) -> f64 {
    (0.5 * drho_phi.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

/// A named real series on a uniform time grid starting at `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableTrack {
    pub name: String,
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl ObservableTrack {
    pub fn new(name: impl Into<String>, t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return invalid(format!(
                "track grid needs finite t0 and dt > 0, got t0 = {t0}, dt = {dt}"
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return invalid(format!("track values must be finite, found {v}"));
        }
        Ok(Self {
            name: name.into(),
            t0,
            dt,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.time(k))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// `χ(t) = dHSS/dt`.
    pub chi: ObservableTrack,
    /// `∫ max(χ, 0) dt` by the trapezoidal rule (summary extension).
    pub backflow: f64,
}

pub fn hss_witness(track: &ObservableTrack) -> Result<Witness> {
    let chi = derivative_on_grid(&track.values, track.dt)?;
    let backflow = chi
        .windows(2)
        .map(|w| 0.5 * (w[0].max(0.0) + w[1].max(0.0)) * track.dt)
        .sum();
    Ok(Witness {
        chi: ObservableTrack::new("chi", track.t0, track.dt, chi)?,
        backflow,
    })
}
