//! Symmetric logarithmic derivatives, the quantum Fisher information matrix
//! over `(θ, φ)`, and the derived Cramér–Rao bounds.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numerics::eigh3;
use crate::state::DensityMatrix3;

/// Default threshold on `λ_j + λ_k` below which SLD components are dropped.
pub const RANK_TOL: f64 = 1e-12;
/// Largest accepted defect of the defining equation on the support of ρ.
pub const SLD_CONSISTENCY_TOL: f64 = 1e-6;
/// Determinant below which the Fisher matrix is treated as singular.
pub const SINGULAR_DET: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SldOperator {
    pub l: Matrix3<C64>,
    /// `‖∂ρ - (ρL + Lρ)/2‖` restricted to the support of ρ.
    pub residual: f64,
}

/// Solves `∂ρ = (ρL + Lρ)/2` by the spectral formula. Components whose
/// eigenvalue sum is at most `rank_tol` (kernel–kernel block) are set to zero.
pub fn sld(rho: &DensityMatrix3, drho: &Matrix3<C64>, rank_tol: f64) -> Result<SldOperator> {
    let es = eigh3(rho.matrix())?;
    let u = es.eigenvectors;
    let d = u.adjoint() * drho * u;
    let lam = es.eigenvalues;
    let mut l_eig = Matrix3::<C64>::zeros();
    let mut kept = [[false; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            let s = lam[j] + lam[k];
            if s > rank_tol {
                l_eig[(j, k)] = d[(j, k)] * (2.0 / s);
                kept[j][k] = true;
            }
        }
    }
    // Residual of the defining equation in the eigenbasis, where ρ is
    // diagonal and the anticommutator is elementwise.
    let mut residual: f64 = 0.0;
    for j in 0..3 {
        for k in 0..3 {
            if kept[j][k] {
                let lhs = l_eig[(j, k)] * ((lam[j] + lam[k]) / 2.0);
                residual = residual.max((d[(j, k)] - lhs).norm());
            }
        }
    }
    if residual > SLD_CONSISTENCY_TOL {
        return Err(Error::SldInconsistency(residual));
    }
    let l = u * l_eig * u.adjoint();
    let l = (l + l.adjoint()) * C64::new(0.5, 0.0);
    Ok(SldOperator { l, residual })
}

/// Symmetric Fisher matrix over the index pair `(θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiMatrix {
    pub f_tt: f64,
    pub f_tp: f64,
    pub f_pp: f64,
}

impl QfiMatrix {
    pub fn new(f_tt: f64, f_tp: f64, f_pp: f64) -> Self {
        Self { f_tt, f_tp, f_pp }
    }

    pub fn as_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.f_tt, self.f_tp, self.f_tp, self.f_pp)
    }

    pub fn determinant(&self) -> f64 {
        self.f_tt * self.f_pp - self.f_tp * self.f_tp
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let ev = SymmetricEigen::new(self.as_matrix()).eigenvalues;
        let (a, b) = (ev[0], ev[1]);
        if a <= b {
            [a, b]
        } else {
            [b, a]
        }
    }
}

/// `F_ij = ½ tr(ρ{L_i, L_j})`; the pure-state single-parameter value is
/// `4(⟨∂ψ|∂ψ⟩ - |⟨ψ|∂ψ⟩|²)`.
pub fn qfim(
    rho: &DensityMatrix3,
    drho_theta: &Matrix3<C64>,
    drho_phi: &Matrix3<C64>,
) -> Result<QfiMatrix> {
    let lt = sld(rho, drho_theta, RANK_TOL)?.l;
    let lp = sld(rho, drho_phi, RANK_TOL)?.l;
    let r = rho.matrix();
    let entry = |a: &Matrix3<C64>, b: &Matrix3<C64>| (r * (a * b + b * a)).trace().re / 2.0;
    Ok(QfiMatrix::new(
        entry(&lt, &lt),
        entry(&lt, &lp),
        entry(&lp, &lp),
    ))
}

/// Single-parameter bounds `(Δθ, Δφ) = (1/√F_θθ, 1/√F_φφ)`; a parameter with
/// no information gets `∞`.
pub fn cramer_rao_single(f: &QfiMatrix) -> (f64, f64) {
    let bound = |x: f64| {
        if x > 0.0 {
            1.0 / x.sqrt()
        } else {
            f64::INFINITY
        }
    };
    (bound(f.f_tt), bound(f.f_pp))
}

/// Simultaneous-estimation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaMin {
    /// `tr F⁻¹`, the bound on the total variance.
    pub trace: f64,
    /// Smallest eigenvalue of `F⁻¹`.
    pub min_eigenvalue: f64,
}

pub fn sigma_min(f: &QfiMatrix) -> Result<SigmaMin> {
    let det = f.determinant();
    if !(det > SINGULAR_DET) {
        return Err(Error::SingularFisher(det));
    }
    let trace = (f.f_tt + f.f_pp) / det;
    let [_, largest] = f.eigenvalues();
    Ok(SigmaMin {
        trace,
        min_eigenvalue: 1.0 / largest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::Propagator;
    use crate::state::{
        amplitude_derivatives, density_matrix, drho_dparam, initial_amplitudes, StateKind,
    };
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn max_abs(m: &Matrix3<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn t0_qfim(theta: f64, phi: f64) -> QfiMatrix {
        let m = Propagator::identity(0.0);
        let a = initial_amplitudes(theta, phi, StateKind::TwoLevel).unwrap();
        let (dt, dp) = amplitude_derivatives(&a, theta, phi);
        let r = density_matrix(&m, &a);
        qfim(&r, &drho_dparam(&m, &a, &dt), &drho_dparam(&m, &a, &dp)).unwrap()
    }

    #[test]
    fn sld_of_maximally_mixed_state() {
        let rho = DensityMatrix3(Matrix3::identity() * c(1.0 / 3.0));
        let d = Matrix3::from_diagonal(&nalgebra::Vector3::new(c(0.1), c(-0.3), c(0.2)));
        let l = sld(&rho, &d, RANK_TOL).unwrap();
        assert!(max_abs(&(l.l - d * c(3.0))) < 1e-12);
    }

    #[test]
    fn sld_of_pure_state() {
        let psi = nalgebra::Vector3::new(c(0.6), C64::new(0.0, 0.48), c(0.64));
        let raw = nalgebra::Vector3::new(C64::new(0.1, 0.2), c(-0.3), C64::new(0.05, -0.1));
        // Norm preservation forces Re⟨ψ|∂ψ⟩ = 0.
        let dpsi = raw - psi * c(psi.dotc(&raw).re);
        let rho = DensityMatrix3(psi * psi.adjoint());
        let drho = dpsi * psi.adjoint() + psi * dpsi.adjoint();
        let l = sld(&rho, &drho, RANK_TOL).unwrap();
        assert!(l.residual < 1e-10);
        // On the support the SLD acts as 2∂ρ.
        let on_support = (l.l - drho * c(2.0)) * psi;
        assert!(on_support.norm() < 1e-10);
    }

    #[test]
    fn sld_of_zero_derivative() {
        let rho = DensityMatrix3(Matrix3::from_diagonal(&nalgebra::Vector3::new(
            c(0.5),
            c(0.5),
            c(0.0),
        )));
        let l = sld(&rho, &Matrix3::zeros(), RANK_TOL).unwrap();
        assert_eq!(max_abs(&l.l), 0.0);
    }

    #[test]
    fn rank_deficient_state_drops_kernel_block() {
        let rho = DensityMatrix3(Matrix3::from_diagonal(&nalgebra::Vector3::new(
            c(0.5),
            c(0.5),
            c(0.0),
        )));
        let mut d = Matrix3::zeros();
        d[(0, 2)] = c(0.1);
        d[(2, 0)] = c(0.1);
        d[(2, 2)] = c(0.3);
        let l = sld(&rho, &d, RANK_TOL).unwrap();
        assert!(l.residual < 1e-14);
        assert!((l.l[(0, 2)] - c(0.4)).norm() < 1e-14);
        assert_eq!(l.l[(2, 2)], c(0.0));
    }

    #[test]
    fn time_zero_closed_forms() {
        for theta in [PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0] {
            for phi in [0.0, 1.0, 4.0] {
                let f = t0_qfim(theta, phi);
                assert!((f.f_tt - 1.0).abs() < 1e-9);
                assert!((f.f_pp - theta.sin().powi(2)).abs() < 1e-9);
                assert!(f.f_tp.abs() < 1e-9);
            }
        }
        let f = t0_qfim(PI / 2.0, 0.0);
        let s = sigma_min(&f).unwrap();
        assert!((s.trace - 2.0).abs() < 1e-9 && (s.min_eigenvalue - 1.0).abs() < 1e-9);
        let (_, dphi) = cramer_rao_single(&t0_qfim(PI / 3.0, 0.0));
        assert!((dphi - 1.0 / (PI / 3.0).sin()).abs() < 1e-9);
    }

    #[test]
    fn parameter_without_effect_has_zero_row() {
        let m = Propagator::identity(0.0);
        let a = initial_amplitudes(PI / 2.0, 0.0, StateKind::QutritHss).unwrap();
        let (dt, dp) = amplitude_derivatives(&a, PI / 2.0, 0.0);
        let r = density_matrix(&m, &a);
        let f = qfim(&r, &drho_dparam(&m, &a, &dt), &drho_dparam(&m, &a, &dp)).unwrap();
        assert_eq!((f.f_tt, f.f_tp), (0.0, 0.0));
        assert!(f.f_pp > 0.0);
        assert!(matches!(sigma_min(&f), Err(Error::SingularFisher(_))));
    }

    #[test]
    fn bounds_arithmetic() {
        assert_eq!(
            cramer_rao_single(&QfiMatrix::new(1.0, 0.0, 1.0)),
            (1.0, 1.0)
        );
        assert_eq!(
            cramer_rao_single(&QfiMatrix::new(1.0, 0.0, 0.0)).1,
            f64::INFINITY
        );
        assert!((sigma_min(&QfiMatrix::new(1.0, 0.0, 1.0)).unwrap().trace - 2.0).abs() < 1e-15);
        let s = sigma_min(&QfiMatrix::new(4.0, 0.0, 1.0)).unwrap();
        assert!((s.trace - 1.25).abs() < 1e-15 && (s.min_eigenvalue - 0.25).abs() < 1e-15);
    }

    #[test]
    fn mixed_state_qfi_against_brute_force() {
        // Classical mixture of diagonal states: F = Σ (∂p)²/p.
        let p = [0.5, 0.3, 0.2];
        let dp = [0.1, -0.04, -0.06];
        let rho = DensityMatrix3(Matrix3::from_diagonal(&nalgebra::Vector3::new(
            c(p[0]),
            c(p[1]),
            c(p[2]),
        )));
        let d = Matrix3::from_diagonal(&nalgebra::Vector3::new(c(dp[0]), c(dp[1]), c(dp[2])));
        let f = qfim(&rho, &d, &d).unwrap();
        let expected: f64 = p.iter().zip(dp).map(|(p, d)| d * d / p).sum();
        assert!((f.f_tt - expected).abs() < 1e-12 && (f.f_pp - expected).abs() < 1e-12);
    }
}
