//! Complex polynomials and their roots.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};

/// Largest degree accepted by [`solve_polynomial`].
pub const MAX_DEGREE: usize = 16;

/// Polynomial with complex coefficients stored in ascending degree order.
///
/// Trailing (highest-degree) zero coefficients are trimmed on construction, so
/// the last stored coefficient is always nonzero unless the polynomial is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coefficients: Vec<C64>,
}

impl ComplexPolynomial {
    pub fn new(mut coefficients: Vec<C64>) -> Self {
        while coefficients
            .last()
            .is_some_and(|c| *c == C64::new(0.0, 0.0))
        {
            coefficients.pop();
        }
        Self { coefficients }
    }

    /// Monic polynomial with the given roots, `∏ (y - r)`.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut coefficients = vec![C64::new(1.0, 0.0)];
        for &r in roots {
            coefficients = mul_coefficients(&coefficients, &[-r, C64::new(1.0, 0.0)]);
        }
        Self::new(coefficients)
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn eval(&self, y: C64) -> C64 {
        self.coefficients
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * y + c)
    }

    /// Value and first derivative by a single Horner sweep.
    pub fn eval_with_derivative(&self, y: C64) -> (C64, C64) {
        let zero = C64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coefficients.iter().rev() {
            dp = dp * y + p;
            p = p * y + c;
        }
        (p, dp)
    }

    pub fn max_coefficient_magnitude(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(mul_coefficients(&self.coefficients, &other.coefficients))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coefficients.len().max(other.coefficients.len());
        let zero = C64::new(0.0, 0.0);
        let coefficients = (0..n)
            .map(|i| {
                self.coefficients.get(i).copied().unwrap_or(zero)
                    + other.coefficients.get(i).copied().unwrap_or(zero)
            })
            .collect();
        Self::new(coefficients)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coefficients.iter().map(|&c| c * s).collect())
    }
}

fn mul_coefficients(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// All roots of `p`, repeated according to multiplicity.
///
/// Roots are the eigenvalues of the companion matrix of the monic-normalized
/// polynomial, each followed by one Newton step on the original coefficients.
pub fn solve_polynomial(p: &ComplexPolynomial) -> Result<Vec<C64>> {
    let degree = match p.degree() {
        None => return invalid("zero polynomial has no well-defined roots"),
        Some(0) => return invalid("constant polynomial has no roots"),
        Some(d) if d > MAX_DEGREE => {
            return invalid(format!(
                "degree {d} exceeds the supported maximum {MAX_DEGREE}"
            ))
        }
        Some(d) => d,
    };
    let c = p.coefficients();
    let lead = c[degree];

    let roots: Vec<C64> = if degree == 1 {
        vec![-c[0] / lead]
    } else {
        // Companion matrix with the normalized coefficients in the last column.
        let mut companion = DMatrix::<C64>::zeros(degree, degree);
        for i in 1..degree {
            companion[(i, i - 1)] = C64::new(1.0, 0.0);
        }
        for i in 0..degree {
            companion[(i, degree - 1)] = -c[i] / lead;
        }
        companion
            .schur()
            .eigenvalues()
            .ok_or_else(|| {
                crate::error::Error::InvalidInput(
                    "companion matrix Schur form is not triangular".into(),
                )
            })?
            .iter()
            .copied()
            .collect()
    };

    Ok(roots.into_iter().map(|r| newton_polish(p, r)).collect())
}

fn newton_polish(p: &ComplexPolynomial, r: C64) -> C64 {
    let (v, dv) = p.eval_with_derivative(r);
    if dv.norm() == 0.0 || !dv.is_finite() {
        return r;
    }
    let polished = r - v / dv;
    // A multiple root can push the Newton step outward; keep the better point.
    if polished.is_finite() && p.eval(polished).norm() <= v.norm() {
        polished
    } else {
        r
    }
}
