//! Atom in an isotropic photonic band gap reservoir.
//!
//! Units: the coupling constant β is fixed to one, so frequencies are in
//! units of β and times in units of 1/β.
//!
//! The amplitudes are obtained by inverting their Laplace transforms. With `x`
//! the Laplace variable, the memory kernel contributes `β^{3/2} / √(ix + ω₃c)`
//! and the transformed amplitudes share the denominator
//! `D(x) = x(x - iω₃₂) + (2x - iω₃₂) β^{3/2} / y`, `y² = ix + ω₃c`.
//! On the principal square-root branch `D` is `H(x)`; on the opposite branch it
//! is `Z(x)`. The inverse transform is evaluated with a branch cut running
//! horizontally from the branch point `x = iω₃c` towards `-∞`, so the
//! physical sheet is the principal one except in the quadrant
//! `Re x < 0, Im x > ω₃c`, where the sign of the root flips. Every pole of the
//! physical sheet contributes `N(x_j) / D'(x_j) e^{x_j t}`, and the
//! discontinuity across the cut gives the integrals `R₃(t)`, `R₂(t)`.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::numerics::{
    integrate_semi_infinite_with, solve_polynomial, CVec, ComplexPolynomial, QuadratureOptions,
};
use crate::propagator::{Propagator, PropagatorSource};

/// `β^{3/2}` in the β = 1 unit system.
pub const BETA_3_2: f64 = 1.0;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbgParams {
    omega32: f64,
    omega3c: f64,
}

impl PbgParams {
    /// `omega32`: splitting of the upper levels; `omega3c`: detuning of level
    /// `|a₃⟩` from the band edge. Both in units of β.
    pub fn new(omega32: f64, omega3c: f64) -> Result<Self> {
        if !omega32.is_finite() || !omega3c.is_finite() {
            return invalid(format!("non-finite PBG parameters ({omega32}, {omega3c})"));
        }
        Ok(Self { omega32, omega3c })
    }

    pub fn omega32(&self) -> f64 {
        self.omega32
    }

    pub fn omega3c(&self) -> f64 {
        self.omega3c
    }

    pub fn omega2c(&self) -> f64 {
        self.omega3c - self.omega32
    }

    /// Branch point of the kernel, `x = iω₃c`.
    pub fn branch_point(&self) -> C64 {
        I * self.omega3c
    }
}

/// Principal `√(ix + ω₃c)`, with nonnegative real part.
pub fn sqrt_shifted(x: C64, p: &PbgParams) -> C64 {
    (I * x + p.omega3c).sqrt()
}

/// Which sign of the radical a root or evaluation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sheet {
    /// `Z(x) = x(x - iω₃₂) - (2x - iω₃₂) β^{3/2} / √(ix + ω₃c)`
    Z,
    /// `H(x) = x(x - iω₃₂) + (2x - iω₃₂) β^{3/2} / √(ix + ω₃c)`
    H,
}

impl Sheet {
    fn sign(self) -> f64 {
        match self {
            Sheet::Z => -1.0,
            Sheet::H => 1.0,
        }
    }
}

/// `Z(x)` or `H(x)` and its derivative, using the principal root.
pub fn eval_zh(x: C64, sheet: Sheet, p: &PbgParams) -> Result<(C64, C64)> {
    let s = sqrt_shifted(x, p);
    if s.norm() == 0.0 {
        return Err(Error::SingularPoint(x));
    }
    // H is the denominator written with y = s, Z the same with y = -s.
    let y = s * sheet.sign();
    Ok((denominator(x, y, p), denominator_derivative(x, y, p)))
}

/// `D = x(x - iω₃₂) + (2x - iω₃₂) β^{3/2} / y` for an explicit root `y`.
fn denominator(x: C64, y: C64, p: &PbgParams) -> C64 {
    x * (x - I * p.omega32) + (2.0 * x - I * p.omega32) * BETA_3_2 / y
}

/// `dD/dx` with `dy/dx = i / (2y)`.
fn denominator_derivative(x: C64, y: C64, p: &PbgParams) -> C64 {
    let kappa = 2.0 * x - I * p.omega32;
    kappa + 2.0 * BETA_3_2 / y - I * kappa * BETA_3_2 / (2.0 * y * y * y)
}

/// Which poles are kept in the residue sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegionRule {
    /// Poles on the sheet reached by continuation from `Re x > 0` across the
    /// horizontal cut: `H` roots outside the quadrant `Re x < 0, Im x > ω₃c`
    /// and `Z` roots inside it.
    #[default]
    Continuation,
    /// `Z` roots with `Im x > ω₃c` or `Re x > 0`, `H` roots with `Im x < ω₃c`
    /// and `Re x < 0`. Kept for comparison; it violates the `t = 0`
    /// completeness identity.
    Literal,
}

/// A pole of the transformed amplitudes together with the root `y` that
/// defines its sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub x: C64,
    pub y: C64,
    pub sheet: Sheet,
}

impl Pole {
    pub fn derivative(&self, p: &PbgParams) -> C64 {
        denominator_derivative(self.x, self.y, p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeRoots {
    pub z_roots: Vec<C64>,
    pub h_roots: Vec<C64>,
    /// Accepted poles in the order they were found.
    pub poles: Vec<Pole>,
    /// Every root `y` of the cleared quintic, before filtering.
    pub quintic_roots: Vec<C64>,
    pub rule: RegionRule,
}

/// Quintic in `y = √(ix + ω₃c)` obtained by substituting `x = i(ω₃c - y²)`
/// into `x(x - iω₃₂) y + (2x - iω₃₂) β^{3/2} = 0`.
///
/// A root with `Re y > 0` is a root of `H`, one with `Re y < 0` a root of `Z`.
pub fn mode_polynomial(p: &PbgParams) -> ComplexPolynomial {
    let x = ComplexPolynomial::new(vec![I * p.omega3c, c(0.0), -I]);
    let x_minus = x.add(&ComplexPolynomial::new(vec![-I * p.omega32]));
    let alpha = x.mul(&x_minus);
    let kappa = x
        .scale(c(2.0))
        .add(&ComplexPolynomial::new(vec![-I * p.omega32]));
    let y = ComplexPolynomial::new(vec![c(0.0), c(1.0)]);
    alpha.mul(&y).add(&kappa.scale(c(BETA_3_2)))
}

fn x_of_y(y: C64, p: &PbgParams) -> C64 {
    I * (p.omega3c - y * y)
}

/// `y` lies on the physical sheet iff `arg y ∈ (-π/4, 3π/4)`.
fn on_physical_sheet(y: C64) -> bool {
    (y * C64::from_polar(1.0, -FRAC_PI_4)).re > 0.0
}

pub fn find_mode_roots(p: &PbgParams) -> Result<ModeRoots> {
    find_mode_roots_with(p, RegionRule::Continuation)
}

pub fn find_mode_roots_with(p: &PbgParams, rule: RegionRule) -> Result<ModeRoots> {
    let poly = mode_polynomial(p);
    let quintic_roots = solve_polynomial(&poly)?;
    let mut roots = ModeRoots {
        z_roots: Vec::new(),
        h_roots: Vec::new(),
        poles: Vec::new(),
        quintic_roots: quintic_roots.clone(),
        rule,
    };
    for y0 in quintic_roots {
        let y = polish(&poly, y0);
        // y = 0 is the branch point itself, never a pole.
        if y.norm() < 1e-10 {
            continue;
        }
        let x = x_of_y(y, p);
        // Label by the principal root at the polished x so that eval_zh
        // reproduces the zero.
        let principal = sqrt_shifted(x, p);
        let sheet = if (principal - y).norm() <= (principal + y).norm() {
            Sheet::H
        } else {
            Sheet::Z
        };
        let keep = match rule {
            RegionRule::Continuation => on_physical_sheet(y),
            RegionRule::Literal => match sheet {
                Sheet::Z => x.im > p.omega3c || x.re > 0.0,
                Sheet::H => x.im < p.omega3c && x.re < 0.0,
            },
        };
        if !keep {
            continue;
        }
        match sheet {
            Sheet::Z => roots.z_roots.push(x),
            Sheet::H => roots.h_roots.push(x),
        }
        roots.poles.push(Pole { x, y, sheet });
    }
    Ok(roots)
}

/// Newton iterations on the quintic until the residual stops improving.
fn polish(poly: &ComplexPolynomial, mut y: C64) -> C64 {
    let mut best = poly.eval(y).norm();
    for _ in 0..8 {
        let (v, dv) = poly.eval_with_derivative(y);
        if dv.norm() == 0.0 {
            break;
        }
        let next = y - v / dv;
        let r = poly.eval(next).norm();
        if !(r < best) {
            break;
        }
        best = r;
        y = next;
    }
    y
}

/// Residue part of the propagator at time `t`: rows `(A₃, A₂)`, columns the
/// two basis initial states. The `e^{-iω₃₂t}` factor is already applied to
/// the second row.
pub fn residue_sum(t: f64, p: &PbgParams, roots: &ModeRoots) -> Matrix2<C64> {
    let mut m = Matrix2::<C64>::zeros();
    for pole in &roots.poles {
        let (x, y) = (pole.x, pole.y);
        let weight = (x * t).exp() / pole.derivative(p);
        let g = BETA_3_2 / y;
        // Numerators of A₃(x) and of the transform of e^{iω₃₂t}A₂(t) for the
        // basis states (c₃, c₂) = (1, 0) and (0, 1).
        m[(0, 0)] += (x - I * p.omega32 + g) * weight;
        m[(0, 1)] += -g * weight;
        m[(1, 0)] += -g * weight;
        m[(1, 1)] += (x + g) * weight;
    }
    let phase = C64::from_polar(1.0, -p.omega32 * t);
    m[(1, 0)] *= phase;
    m[(1, 1)] *= phase;
    m
}

/// Branch-cut matrix `R(t)`: column 1 holds `(R₃, R₂)` for the initial state
/// `(1, 0)`, column 2 for `(0, 1)`.
pub fn branch_cut_columns(t: f64, p: &PbgParams) -> Result<Matrix2<C64>> {
    branch_cut_columns_with(t, p, &QuadratureOptions::default())
}

pub fn branch_cut_columns_with(
    t: f64,
    p: &PbgParams,
    opts: &QuadratureOptions,
) -> Result<Matrix2<C64>> {
    if !(t >= 0.0) {
        return invalid(format!("time must be nonnegative, got {t}"));
    }
    let w3c = p.omega3c;
    let w2c = p.omega2c();
    let integrand = |x: f64| {
        let a = C64::new(x, -w2c);
        let b = C64::new(x, -w3c);
        let q = C64::new(2.0 * x, -(w3c + w2c));
        let den = x * b * b * a * a - I * q * q * BETA_3_2 * BETA_3_2;
        let sx = x.sqrt();
        let eb = C64::from_polar((-x * t).exp(), w3c * t) * sx / den;
        let ea = C64::from_polar((-x * t).exp(), w2c * t) * sx / den;
        CVec([eb * a * a, eb * a * b, ea * b * a, ea * b * b])
    };
    let r = integrate_semi_infinite_with(integrand, t, opts).map_err(|e| match e {
        Error::QuadratureFailure {
            context,
            best,
            error,
        } => Error::QuadratureFailure {
            context: format!("branch-cut integrals R3/R2 at t = {t}: {context}"),
            best,
            error,
        },
        other => other,
    })?;
    let pre = BETA_3_2 / (PI * C64::from_polar(1.0, FRAC_PI_4));
    let v = r.value.0;
    Ok(Matrix2::new(v[0] * pre, v[1] * pre, v[2] * pre, v[3] * pre))
}

pub fn propagator_pbg(t: f64, p: &PbgParams, roots: &ModeRoots) -> Result<Propagator> {
    propagator_pbg_with(t, p, roots, &QuadratureOptions::default())
}

pub fn propagator_pbg_with(
    t: f64,
    p: &PbgParams,
    roots: &ModeRoots,
    opts: &QuadratureOptions,
) -> Result<Propagator> {
    let r = branch_cut_columns_with(t, p, opts)?;
    Ok(Propagator {
        t,
        m: residue_sum(t, p, roots) - r,
    })
}

/// `max |Σ residues(0) - R(0) - I|`; zero when roots and cut integrals are
/// mutually consistent.
pub fn completeness_defect(p: &PbgParams, roots: &ModeRoots) -> Result<f64> {
    let m = residue_sum(0.0, p, roots)
        - branch_cut_columns_with(0.0, p, &QuadratureOptions::with_tol(1e-11))?;
    Ok((m - Matrix2::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Parameters, cached roots and quadrature settings bundled for repeated
/// evaluation over a time grid.
#[derive(Debug, Clone)]
pub struct PbgPropagator {
    pub params: PbgParams,
    pub roots: ModeRoots,
    pub quadrature: QuadratureOptions,
}

impl PbgPropagator {
    pub fn new(params: PbgParams) -> Result<Self> {
        Ok(Self {
            params,
            roots: find_mode_roots(&params)?,
            quadrature: QuadratureOptions::default(),
        })
    }
}

impl PropagatorSource for PbgPropagator {
    fn propagator(&self, t: f64) -> Result<Propagator> {
        propagator_pbg_with(t, &self.params, &self.roots, &self.quadrature)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(w32: f64, w3c: f64) -> PbgParams {
        PbgParams::new(w32, w3c).unwrap()
    }

    #[test]
    fn sqrt_branch_point_and_real_axis() {
        let p = params(0.1, 4.0);
        assert!((sqrt_shifted(C64::new(0.0, 0.0), &p) - c(2.0)).norm() < 1e-15);
        assert!(sqrt_shifted(p.branch_point(), &p).norm() < 1e-15);
    }

    #[test]
    fn sqrt_square_back() {
        let p = params(0.1, -1.0);
        let s = sqrt_shifted(C64::new(1.0, 2.0), &p);
        assert!((s * s - C64::new(-3.0, 1.0)).norm() < 1e-14);
        assert!(s.re >= 0.0);
    }

    #[test]
    fn degenerate_splitting_root_at_origin() {
        let p = params(0.0, -1.0);
        for sheet in [Sheet::Z, Sheet::H] {
            let (v, _) = eval_zh(c(0.0), sheet, &p).unwrap();
            assert!(v.norm() < 1e-15);
        }
    }

    #[test]
    fn sheet_sum_identity() {
        let p = params(0.3, 0.7);
        for x in [C64::new(0.2, -0.4), C64::new(-1.5, 2.0), C64::new(3.0, 0.1)] {
            let (z, _) = eval_zh(x, Sheet::Z, &p).unwrap();
            let (h, _) = eval_zh(x, Sheet::H, &p).unwrap();
            let expected = 2.0 * x * (x - I * p.omega32());
            assert!((z + h - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn branch_point_is_singular() {
        let p = params(0.1, -1.0);
        assert!(matches!(
            eval_zh(p.branch_point(), Sheet::Z, &p),
            Err(Error::SingularPoint(_))
        ));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = params(0.1, -1.0);
        let x = C64::new(0.3, 0.4);
        let h = 1e-6;
        for sheet in [Sheet::Z, Sheet::H] {
            let (_, d) = eval_zh(x, sheet, &p).unwrap();
            let fd = (eval_zh(x + h, sheet, &p).unwrap().0 - eval_zh(x - h, sheet, &p).unwrap().0)
                / (2.0 * h);
            assert!((d - fd).norm() <= 1e-6 * d.norm(), "{d} vs {fd}");
        }
    }

    #[test]
    fn quintic_has_five_roots() {
        for w3c in [-1.0, 0.2, 0.9, 100.0] {
            let roots = find_mode_roots(&params(0.1, w3c)).unwrap();
            assert_eq!(roots.quintic_roots.len(), 5);
        }
    }

    #[test]
    fn accepted_roots_have_small_residuals() {
        for (w32, w3c) in [(0.1, -1.0), (0.1, 0.2), (0.1, 0.9), (0.0, -1.0), (0.5, 2.0)] {
            let p = params(w32, w3c);
            let roots = find_mode_roots(&p).unwrap();
            assert!(!roots.poles.is_empty());
            for (list, sheet) in [(&roots.z_roots, Sheet::Z), (&roots.h_roots, Sheet::H)] {
                for &x in list {
                    let (v, _) = eval_zh(x, sheet, &p).unwrap();
                    assert!(
                        v.norm() <= 1e-10 * x.norm_sqr().max(1.0),
                        "{sheet:?} root {x}: {v}"
                    );
                }
            }
        }
    }

    #[test]
    fn roots_are_not_double_counted() {
        let p = params(0.1, -1.0);
        let roots = find_mode_roots(&p).unwrap();
        for &x in &roots.z_roots {
            assert!(eval_zh(x, Sheet::H, &p).unwrap().0.norm() > 1e-6);
        }
        for &x in &roots.h_roots {
            assert!(eval_zh(x, Sheet::Z, &p).unwrap().0.norm() > 1e-6);
        }
    }

    #[test]
    fn poles_respect_continuation_regions() {
        for w3c in [-1.0, 0.2, 0.9] {
            let p = params(0.1, w3c);
            let roots = find_mode_roots(&p).unwrap();
            let tol = 1e-9;
            for &x in &roots.z_roots {
                assert!(x.re < tol && x.im > w3c - tol, "z root {x}");
            }
            for &x in &roots.h_roots {
                assert!(x.im < w3c + tol || x.re > -tol, "h root {x}");
            }
            // No amplitude growth.
            for pole in &roots.poles {
                assert!(pole.x.re <= 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_splitting_keeps_dark_state_pole() {
        let p = params(0.0, -1.0);
        let roots = find_mode_roots(&p).unwrap();
        assert!(roots.poles.iter().any(|pole| pole.x.norm() < 1e-10));
        assert!(completeness_defect(&p, &roots).unwrap() < 1e-6);
        // The antisymmetric combination is decoupled and never decays.
        let m = propagator_pbg(7.0, &p, &roots).unwrap();
        let (a3, a2) = m.apply(c(0.5f64.sqrt()), c(-(0.5f64.sqrt())));
        assert!((a3 - c(0.5f64.sqrt())).norm() < 1e-7);
        assert!((a2 + c(0.5f64.sqrt())).norm() < 1e-7);
    }

    #[test]
    fn cut_denominator_is_z_times_h() {
        // On the cut x = iω₃c - r the printed denominator equals r Z(x) H(x).
        let p = params(0.1, -1.0);
        for r in [0.05, 0.7, 3.0, 40.0] {
            let x = p.branch_point() - r;
            let a = C64::new(r, -p.omega2c());
            let b = C64::new(r, -p.omega3c());
            let q = C64::new(2.0 * r, -(p.omega3c() + p.omega2c()));
            let den = r * b * b * a * a - I * q * q;
            let z = eval_zh(x, Sheet::Z, &p).unwrap().0;
            let h = eval_zh(x, Sheet::H, &p).unwrap().0;
            assert!((den - r * z * h).norm() <= 1e-12 * den.norm(), "r = {r}");
        }
    }

    #[test]
    fn completeness_at_t0() {
        for w3c in [-1.0, 0.2, 0.9] {
            let p = params(0.1, w3c);
            let roots = find_mode_roots(&p).unwrap();
            let defect = completeness_defect(&p, &roots).unwrap();
            assert!(defect < 1e-6, "ω3c = {w3c}: {defect}");
        }
    }

    #[test]
    fn literal_region_rule_breaks_completeness() {
        let p = params(0.1, -1.0);
        let roots = find_mode_roots_with(&p, RegionRule::Literal).unwrap();
        assert!(completeness_defect(&p, &roots).unwrap() > 0.1);
    }

    #[test]
    fn branch_cut_decays() {
        let p = params(0.1, -1.0);
        let r5 = branch_cut_columns(5.0, &p).unwrap().norm();
        let r50 = branch_cut_columns(50.0, &p).unwrap().norm();
        assert!(r50 < r5);
    }

    #[test]
    fn branch_cut_stable_under_refinement() {
        let p = params(0.1, -1.0);
        let base = QuadratureOptions::with_tol(1e-11);
        let fine = QuadratureOptions {
            initial_refinement: 2,
            ..base
        };
        let a = branch_cut_columns_with(1.0, &p, &base).unwrap();
        let b = branch_cut_columns_with(1.0, &p, &fine).unwrap();
        assert!((a[(0, 0)] - b[(0, 0)]).norm() < 1e-8);
    }

    #[test]
    fn identity_at_t0_and_bounded_columns() {
        for w3c in [-1.0, 0.2, 0.9] {
            let prop = PbgPropagator::new(params(0.1, w3c)).unwrap();
            let m0 = prop.propagator(0.0).unwrap();
            assert!((m0.m - Matrix2::identity()).norm() < 1e-9);
            for k in 1..=40 {
                let m = prop.propagator(0.5 * k as f64).unwrap();
                for n in m.column_norms() {
                    assert!(n <= 1.0 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn negative_time_rejected() {
        let p = params(0.1, -1.0);
        assert!(branch_cut_columns(-1.0, &p).is_err());
    }
}
