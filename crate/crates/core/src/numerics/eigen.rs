use nalgebra::Matrix3;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};

/// Largest accepted Frobenius norm of `H - H†`.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Spectral decomposition of a 3×3 Hermitian matrix; eigenvalues ascending,
/// eigenvectors stored as the matching columns of a unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem3 {
    pub eigenvalues: [f64; 3],
    pub eigenvectors: Matrix3<C64>,
}

impl EigenSystem3 {
    pub fn reconstruct(&self) -> Matrix3<C64> {
        let d = Matrix3::from_diagonal(&nalgebra::Vector3::from_iterator(
            self.eigenvalues.iter().map(|&l| C64::new(l, 0.0)),
        ));
        self.eigenvectors * d * self.eigenvectors.adjoint()
    }
}

pub fn hermiticity_defect(h: &Matrix3<C64>) -> f64 {
    (h - h.adjoint()).norm()
}

/// Eigendecomposition of a Hermitian 3×3 matrix by cyclic complex Jacobi
/// rotations. The input is symmetrized before rotating.
pub fn eigh3(h: &Matrix3<C64>) -> Result<EigenSystem3> {
    let defect = hermiticity_defect(h);
    if !(defect <= HERMITICITY_TOL) {
        return invalid(format!("matrix is not Hermitian (defect {defect:.3e})"));
    }
    let mut a = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let mut v = Matrix3::<C64>::identity();
    let scale = a.norm();

    for _sweep in 0..64 {
        let off = off_diagonal_norm(&a);
        if off <= 1e-17 * scale || off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            let g = apq.norm();
            if g <= 1e-300 {
                continue;
            }
            // Phase on column q makes the (p, q) entry real, then a real
            // Jacobi rotation annihilates it.
            let phase = (apq / g).conj();
            let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut u = Matrix3::<C64>::identity();
            u[(p, p)] = C64::new(c, 0.0);
            u[(p, q)] = C64::new(s, 0.0);
            u[(q, p)] = phase * (-s);
            u[(q, q)] = phase * c;
            a = u.adjoint() * a * u;
            a[(p, q)] = C64::new(0.0, 0.0);
            a[(q, p)] = C64::new(0.0, 0.0);
            v *= u;
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.map(|i| a[(i, i)].re);
    let eigenvectors = Matrix3::from_columns(&order.map(|i| v.column(i).into_owned()));
    Ok(EigenSystem3 {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &Matrix3<C64>) -> f64 {
    (a[(0, 1)].norm_sqr() + a[(0, 2)].norm_sqr() + a[(1, 2)].norm_sqr()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn real_diag(d: [f64; 3]) -> Matrix3<C64> {
        Matrix3::from_diagonal(&nalgebra::Vector3::new(
            C64::new(d[0], 0.0),
            C64::new(d[1], 0.0),
            C64::new(d[2], 0.0),
        ))
    }

    fn random_hermitian(rng: &mut impl Rng) -> Matrix3<C64> {
        let a =
            Matrix3::from_fn(|_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (a + a.adjoint()) * C64::new(0.5, 0.0)
    }

    /// Eigenvalues from the trigonometric solution of the characteristic cubic.
    fn cubic_eigenvalues(h: &Matrix3<C64>) -> [f64; 3] {
        let tr = h.trace().re;
        let m2 = (h * h).trace().re;
        let det = h.determinant().re;
        // λ³ - tr λ² + c1 λ - det = 0
        let c1 = 0.5 * (tr * tr - m2);
        let shift = tr / 3.0;
        let p = c1 - tr * tr / 3.0;
        let q = -2.0 * tr.powi(3) / 27.0 + tr * c1 / 3.0 - det;
        // t³ + p t + q = 0 with three real roots (p ≤ 0)
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = if r == 0.0 {
            0.0
        } else {
            (3.0 * q / (p * r)).clamp(-1.0, 1.0)
        };
        let phi = arg.acos() / 3.0;
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = shift + r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
        }
        out.sort_by(f64::total_cmp);
        out
    }

    #[test]
    fn identity_and_diagonal() {
        let e = eigh3(&Matrix3::identity()).unwrap();
        assert_eq!(e.eigenvalues.map(|l| (l - 1.0).abs() < 1e-15), [true; 3]);
        let e = eigh3(&real_diag([0.5, 0.2, 0.3])).unwrap();
        for (l, want) in e.eigenvalues.iter().zip([0.2, 0.3, 0.5]) {
            assert!((l - want).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut h = Matrix3::<C64>::identity();
        h[(0, 1)] = C64::new(1e-6, 0.0);
        assert!(eigh3(&h).is_err());
    }

    #[test]
    fn matches_characteristic_polynomial() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let h = random_hermitian(&mut rng);
            let e = eigh3(&h).unwrap();
            let oracle = cubic_eigenvalues(&h);
            for (a, b) in e.eigenvalues.iter().zip(oracle) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn reconstruction_unitarity_and_trace() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..200 {
            let h = random_hermitian(&mut rng);
            let scale = h.norm();
            let e = eigh3(&h).unwrap();
            let rec = (e.reconstruct() - h).norm();
            assert!(rec <= 1e-12 * scale.max(1.0), "reconstruction {rec}");
            let u = &e.eigenvectors;
            let unit = (u.adjoint() * u - Matrix3::identity()).norm();
            assert!(unit <= 1e-12, "unitarity {unit}");
            let sum: f64 = e.eigenvalues.iter().sum();
            assert!((sum - h.trace().re).abs() <= 1e-12 * scale.max(1.0));
            assert!(e.eigenvalues[0] <= e.eigenvalues[1] && e.eigenvalues[1] <= e.eigenvalues[2]);
        }
    }

    #[test]
    fn eigenvalues_continuous_under_perturbation() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        for _ in 0..50 {
            let h = random_hermitian(&mut rng);
            let dh = random_hermitian(&mut rng) * C64::new(1e-8, 0.0);
            let a = eigh3(&h).unwrap();
            let b = eigh3(&(h + dh)).unwrap();
            for (x, y) in a.eigenvalues.iter().zip(b.eigenvalues) {
                assert!((x - y).abs() <= dh.norm() + 1e-14);
            }
        }
    }
}
