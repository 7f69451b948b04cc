//! Initial states, the reduced atomic density matrix and its exact parameter
//! derivatives. Basis order is `(|a₃⟩, |a₂⟩, |a₁⟩)`.

use std::f64::consts::{PI, TAU};

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};
use crate::numerics::{eigh3, EigenSystem3};
use crate::propagator::Propagator;

/// Initial-state family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    /// `cos(θ/2)|a₃⟩ + e^{iφ} sin(θ/2)|a₂⟩`.
    TwoLevel,
    /// `(|a₃⟩ + e^{iφ}|a₂⟩ + |a₁⟩)/√3`; θ is fixed by the equal weights.
    QutritHss,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialAmplitudes {
    pub c3: C64,
    pub c2: C64,
    pub c1: C64,
    pub kind: StateKind,
}

impl InitialAmplitudes {
    pub fn norm_sqr(&self) -> f64 {
        self.c3.norm_sqr() + self.c2.norm_sqr() + self.c1.norm_sqr()
    }
}

/// Parameter derivatives of the initial amplitudes; `c1` stays constant
/// under time evolution and so does its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeDerivative {
    pub c3: C64,
    pub c2: C64,
    pub c1: C64,
}

impl AmplitudeDerivative {
    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        Self {
            c3: z,
            c2: z,
            c1: z,
        }
    }
}

fn check_angles(theta: f64, phi: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return invalid(format!("theta must lie in [0, π], got {theta}"));
    }
    if !(0.0..TAU).contains(&phi) {
        return invalid(format!("phi must lie in [0, 2π), got {phi}"));
    }
    Ok(())
}

pub fn initial_amplitudes(theta: f64, phi: f64, kind: StateKind) -> Result<InitialAmplitudes> {
    check_angles(theta, phi)?;
    let e = C64::from_polar(1.0, phi);
    Ok(match kind {
        StateKind::TwoLevel => InitialAmplitudes {
            c3: C64::new((theta / 2.0).cos(), 0.0),
            c2: e * (theta / 2.0).sin(),
            c1: C64::new(0.0, 0.0),
            kind,
        },
        StateKind::QutritHss => {
            let s = 1.0 / 3f64.sqrt();
            InitialAmplitudes {
                c3: C64::new(s, 0.0),
                c2: e * s,
                c1: C64::new(s, 0.0),
                kind,
            }
        }
    })
}

/// Derivatives of the initial amplitudes with respect to θ and φ.
pub fn amplitude_derivatives(
    c: &InitialAmplitudes,
    theta: f64,
    phi: f64,
) -> (AmplitudeDerivative, AmplitudeDerivative) {
    let e = C64::from_polar(1.0, phi);
    let z = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match c.kind {
        StateKind::TwoLevel => (
            AmplitudeDerivative {
                c3: C64::new(-(theta / 2.0).sin() / 2.0, 0.0),
                c2: e * (theta / 2.0).cos() / 2.0,
                c1: z,
            },
            AmplitudeDerivative {
                c3: z,
                c2: i * e * (theta / 2.0).sin(),
                c1: z,
            },
        ),
        StateKind::QutritHss => (
            AmplitudeDerivative::zero(),
            AmplitudeDerivative {
                c3: z,
                c2: i * e / 3f64.sqrt(),
                c1: z,
            },
        ),
    }
}

/// Reduced 3×3 atomic state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3(pub Matrix3<C64>);

impl DensityMatrix3 {
    pub fn matrix(&self) -> &Matrix3<C64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn eigen(&self) -> Result<EigenSystem3> {
        eigh3(&self.0)
    }

    /// Populations of the upper levels, `|A₃|² + |A₂|²`.
    pub fn excited_population(&self) -> f64 {
        self.0[(0, 0)].re + self.0[(1, 1)].re
    }
}

/// Builds `ρ` from the evolved upper-level amplitudes. The ground-state
/// population is fixed by the trace; coherences with `|a₁⟩` carry the
/// constant amplitude `c₁`.
pub fn density_matrix(m: &Propagator, c: &InitialAmplitudes) -> DensityMatrix3 {
    let (a3, a2) = m.apply(c.c3, c.c2);
    let a = [a3, a2];
    let mut r = Matrix3::<C64>::zeros();
    for j in 0..2 {
        for k in 0..2 {
            r[(j, k)] = a[j] * a[k].conj();
        }
        r[(j, 2)] = a[j] * c.c1.conj();
        r[(2, j)] = r[(j, 2)].conj();
    }
    r[(2, 2)] = C64::new(1.0 - a3.norm_sqr() - a2.norm_sqr(), 0.0);
    DensityMatrix3(r)
}

/// Exact derivative of `density_matrix` with respect to a parameter of the
/// initial state, by the product rule on the linear amplitude map.
pub fn drho_dparam(
    m: &Propagator,
    c: &InitialAmplitudes,
    dc: &AmplitudeDerivative,
) -> Matrix3<C64> {
    let (a3, a2) = m.apply(c.c3, c.c2);
    let (d3, d2) = m.apply(dc.c3, dc.c2);
    let a = [a3, a2, c.c1];
    let d = [d3, d2, dc.c1];
    let mut r = Matrix3::<C64>::zeros();
    for j in 0..3 {
        for k in 0..3 {
            if j == 2 && k == 2 {
                continue;
            }
            r[(j, k)] = d[j] * a[k].conj() + a[j] * d[k].conj();
        }
    }
    r[(2, 2)] = -(r[(0, 0)] + r[(1, 1)]);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::{propagator_free, FreeParams};
    use crate::pbg::{PbgParams, PbgPropagator};
    use crate::propagator::PropagatorSource;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn max_abs(m: &Matrix3<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn initial_amplitude_examples() {
        let a = initial_amplitudes(0.0, 1.0, StateKind::TwoLevel).unwrap();
        assert!(close(a.c3, c(1.0), 1e-15) && close(a.c2, c(0.0), 1e-15) && a.c1 == c(0.0));
        let a = initial_amplitudes(PI / 2.0, PI, StateKind::TwoLevel).unwrap();
        assert!(close(a.c3, c(FRAC_1_SQRT_2), 1e-15) && close(a.c2, c(-FRAC_1_SQRT_2), 1e-15));
        let a = initial_amplitudes(PI / 2.0, 0.0, StateKind::QutritHss).unwrap();
        let s = c(1.0 / 3f64.sqrt());
        assert!(close(a.c3, s, 1e-15) && close(a.c2, s, 1e-15) && close(a.c1, s, 1e-15));
        for kind in [StateKind::TwoLevel, StateKind::QutritHss] {
            assert!((initial_amplitudes(1.1, 4.0, kind).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn angles_out_of_range() {
        assert!(initial_amplitudes(-0.1, 0.0, StateKind::TwoLevel).is_err());
        assert!(initial_amplitudes(4.0, 0.0, StateKind::TwoLevel).is_err());
        assert!(initial_amplitudes(1.0, TAU, StateKind::TwoLevel).is_err());
        assert!(initial_amplitudes(1.0, -0.1, StateKind::QutritHss).is_err());
    }

    #[test]
    fn derivative_examples() {
        let a = initial_amplitudes(PI / 2.0, 0.0, StateKind::TwoLevel).unwrap();
        let (dt, _) = amplitude_derivatives(&a, PI / 2.0, 0.0);
        let h = 1.0 / (2.0 * 2f64.sqrt());
        assert!(close(dt.c3, c(-h), 1e-15) && close(dt.c2, c(h), 1e-15));
        for theta in [0.3, 1.0, 2.5] {
            let a = initial_amplitudes(theta, 0.7, StateKind::TwoLevel).unwrap();
            let (_, dp) = amplitude_derivatives(&a, theta, 0.7);
            let n = (dp.c3.norm_sqr() + dp.c2.norm_sqr() + dp.c1.norm_sqr()).sqrt();
            assert!((n - (theta / 2.0).sin()).abs() < 1e-15);
        }
        let q = initial_amplitudes(PI / 2.0, 0.7, StateKind::QutritHss).unwrap();
        let (dt, _) = amplitude_derivatives(&q, PI / 2.0, 0.7);
        assert_eq!(dt, AmplitudeDerivative::zero());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        let (theta, phi) = (1.2, 2.1);
        for kind in [StateKind::TwoLevel, StateKind::QutritHss] {
            let a = initial_amplitudes(theta, phi, kind).unwrap();
            let (dt, dp) = amplitude_derivatives(&a, theta, phi);
            let fd = |ap: InitialAmplitudes, am: InitialAmplitudes| {
                [
                    (ap.c3 - am.c3) / (2.0 * h),
                    (ap.c2 - am.c2) / (2.0 * h),
                    (ap.c1 - am.c1) / (2.0 * h),
                ]
            };
            let fp = fd(
                initial_amplitudes(theta, phi + h, kind).unwrap(),
                initial_amplitudes(theta, phi - h, kind).unwrap(),
            );
            for (x, y) in fp.iter().zip([dp.c3, dp.c2, dp.c1]) {
                assert!(close(*x, y, 1e-9));
            }
            if kind == StateKind::TwoLevel {
                let ft = fd(
                    initial_amplitudes(theta + h, phi, kind).unwrap(),
                    initial_amplitudes(theta - h, phi, kind).unwrap(),
                );
                for (x, y) in ft.iter().zip([dt.c3, dt.c2, dt.c1]) {
                    assert!(close(*x, y, 1e-9));
                }
            }
        }
    }

    #[test]
    fn density_at_time_zero() {
        let m = Propagator::identity(0.0);
        let a = initial_amplitudes(PI / 2.0, 0.0, StateKind::TwoLevel).unwrap();
        let r = density_matrix(&m, &a).0;
        for (j, k) in [(0, 0), (1, 1), (0, 1), (1, 0)] {
            assert!(close(r[(j, k)], c(0.5), 1e-15));
        }
        assert!(r[(2, 2)].norm() < 1e-15);
        let q = initial_amplitudes(PI / 2.0, 0.0, StateKind::QutritHss).unwrap();
        let r = density_matrix(&m, &q).0;
        assert!(r.iter().all(|z| close(*z, c(1.0 / 3.0), 1e-15)));
    }

    #[test]
    fn free_space_full_decay() {
        let p = FreeParams::new(1.0, 1.0, 5.0).unwrap();
        let m = propagator_free(30.0, &p).unwrap();
        let a = initial_amplitudes(PI / 2.0, 0.3, StateKind::TwoLevel).unwrap();
        let r = density_matrix(&m, &a).0;
        let mut target = Matrix3::zeros();
        target[(2, 2)] = c(1.0);
        assert!(max_abs(&(r - target)) < 1e-10);
    }

    #[test]
    fn zero_variation_gives_zero_derivative() {
        let m = propagator_free(1.0, &FreeParams::new(1.0, 0.5, 1.0).unwrap()).unwrap();
        let a = initial_amplitudes(1.0, 1.0, StateKind::QutritHss).unwrap();
        assert_eq!(
            max_abs(&drho_dparam(&m, &a, &AmplitudeDerivative::zero())),
            0.0
        );
    }

    #[test]
    fn pbg_state_invariants_and_finite_difference() {
        let prop = PbgPropagator::new(PbgParams::new(0.1, -1.0).unwrap()).unwrap();
        let m = prop.propagator(2.0).unwrap();
        let (theta, phi, h) = (1.1, 0.4, 1e-6);
        for kind in [StateKind::TwoLevel, StateKind::QutritHss] {
            let a = initial_amplitudes(theta, phi, kind).unwrap();
            let r = density_matrix(&m, &a);
            assert!((r.trace() - 1.0).abs() < 1e-10);
            assert!(max_abs(&(r.0 - r.0.adjoint())) < 1e-12);
            assert!(r.eigen().unwrap().eigenvalues[0] > -1e-9);
            let (dt, dp) = amplitude_derivatives(&a, theta, phi);
            for d in [dt, dp] {
                let dr = drho_dparam(&m, &a, &d);
                assert!(dr.trace().norm() < 1e-12);
                assert!(max_abs(&(dr - dr.adjoint())) < 1e-12);
            }
            if kind == StateKind::TwoLevel {
                assert!(r.0[(0, 2)].norm() == 0.0 && r.0[(1, 2)].norm() == 0.0);
                let block = r.0[(0, 0)] * r.0[(1, 1)] - r.0[(0, 1)] * r.0[(1, 0)];
                assert!(block.norm() < 1e-10);
                let rp = density_matrix(&m, &initial_amplitudes(theta + h, phi, kind).unwrap()).0;
                let rm = density_matrix(&m, &initial_amplitudes(theta - h, phi, kind).unwrap()).0;
                let fd = (rp - rm) / c(2.0 * h);
                assert!(max_abs(&(fd - drho_dparam(&m, &a, &dt))) < 1e-8);
            }
        }
    }
}
