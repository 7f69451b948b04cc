//! Independent checks of the closed-form propagators.
//!
//! * [`check_kernel_consistency`] inserts a propagator track into the
//!   time-domain amplitude equations with memory kernels and reports the
//!   residual.
//! * [`mode_sum_evolve`] integrates the Schrödinger equation of the atom
//!   coupled to a finite set of reservoir modes.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::free::FreeParams;
use crate::pbg::{PbgParams, BETA_3_2};
use crate::propagator::PropagatorSource;

/// Coarsest grid accepted by the kernel check.
pub const MAX_KERNEL_DT: f64 = 0.01;

/// Reservoir seen by the atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Environment {
    /// Isotropic band gap; `kernel_scale` multiplies the memory kernel
    /// (1 for the physical model, tiny values give a free-evolution limit).
    Pbg {
        params: PbgParams,
        kernel_scale: f64,
    },
    Free(FreeParams),
}

impl Environment {
    pub fn pbg(params: PbgParams) -> Self {
        Environment::Pbg {
            params,
            kernel_scale: 1.0,
        }
    }

    pub fn omega32(&self) -> f64 {
        match self {
            Environment::Pbg { params, .. } => params.omega32(),
            Environment::Free(p) => p.omega32(),
        }
    }
}

/// Form of the cross-kernel term in the equation for `A₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelForm {
    /// `-e^{-iω₃₂t} ∫ G₃(t-t′) A₃(t′) dt′`, the mirror image of the `A₃`
    /// equation.
    #[default]
    Symmetric,
    /// `-e^{-iω₃₂t} ∫ G₃(t-t′) A₂(t′) dt′`.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelResidual {
    /// Largest residual of the `A₃` and `A₂` equations divided by `scale`.
    pub relative: f64,
    pub sup_eq_a3: f64,
    pub sup_eq_a2: f64,
    /// `max(sup |A′|, sup |A| / t_max)`.
    pub scale: f64,
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];
/// Width of the Gauss–Legendre panels in `u = √(t - t′)`.
const PANEL_WIDTH: f64 = 0.05;

/// Four-point Lagrange interpolation of a uniformly sampled matrix track.
fn interpolate(track: &[Matrix2<C64>], dt: f64, s: f64) -> Matrix2<C64> {
    let n = track.len();
    let x = (s / dt).clamp(0.0, (n - 1) as f64);
    let k = (x.floor() as isize).clamp(1, n as isize - 3) - 1;
    let k = k.max(0) as usize;
    let mut out = Matrix2::zeros();
    for j in 0..4 {
        let mut w = 1.0;
        for m in 0..4 {
            if m != j {
                w *= (x - (k + m) as f64) / (j as f64 - m as f64);
            }
        }
        out += track[k + j] * C64::new(w, 0.0);
    }
    out
}

/// `∫₀ᵗ G(t-t′) A(t′) dt′` with `G(τ) = s e^{i(ωτ - π/4)}/√(πτ)`, evaluated
/// after substituting `u = √(t - t′)`, which removes the singularity.
fn memory_integral(
    track: &[Matrix2<C64>],
    dt: f64,
    t: f64,
    omega: f64,
    scale: f64,
) -> Matrix2<C64> {
    let upper = t.sqrt();
    let panels = (upper / PANEL_WIDTH).ceil().max(1.0) as usize;
    let width = upper / panels as f64;
    let mut acc = Matrix2::zeros();
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        for (node, weight) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
            for sign in [-1.0, 1.0] {
                let u = mid + sign * node * width / 2.0;
                let kernel = C64::from_polar(2.0 / PI.sqrt(), omega * u * u - FRAC_PI_4);
                acc += interpolate(track, dt, t - u * u) * (kernel * weight * width / 2.0);
            }
        }
    }
    acc * C64::new(scale, 0.0)
}

/// Richardson-extrapolated central difference of the propagator at `t`.
fn derivative(source: &dyn PropagatorSource, t: f64, h: f64) -> Result<Matrix2<C64>> {
    let central = |h: f64| -> Result<Matrix2<C64>> {
        let plus = source.propagator(t + h)?.m;
        let minus = source.propagator(t - h)?.m;
        Ok((plus - minus) / C64::new(2.0 * h, 0.0))
    };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    Ok((fine * C64::new(4.0, 0.0) - coarse) / C64::new(3.0, 0.0))
}

/// Relative sup-norm residual of the amplitude equations over
/// `t ∈ [dt, t_max]` for both propagator columns. `t = 0` is excluded: the
/// memory term makes `A′` behave like `√t` there, so no difference quotient
/// is meaningful at the origin.
pub fn check_kernel_consistency(
    source: &dyn PropagatorSource,
    env: &Environment,
    t_max: f64,
    dt: f64,
    form: KernelForm,
) -> Result<KernelResidual> {
    if !(dt > 0.0) || dt > MAX_KERNEL_DT {
        return invalid(format!(
            "kernel check needs 0 < dt ≤ {MAX_KERNEL_DT}, got {dt}"
        ));
    }
    if !(t_max >= 10.0 * dt) || !t_max.is_finite() {
        return invalid(format!("kernel check needs t_max ≥ 10·dt, got {t_max}"));
    }
    let n = (t_max / dt).round() as usize;
    let track: Vec<Matrix2<C64>> = (0..=n)
        .map(|k| source.propagator(k as f64 * dt).map(|p| p.m))
        .collect::<Result<_>>()?;
    let w32 = env.omega32();
    let (mut sup3, mut sup2, mut sup_deriv, mut sup_amp) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (k, m) in track.iter().enumerate() {
        sup_amp = sup_amp.max(m.iter().map(|z| z.norm()).fold(0.0, f64::max));
        if k == 0 {
            continue;
        }
        let t = k as f64 * dt;
        let d = derivative(source, t, (dt / 2.0).min(t / 4.0))?;
        let forward = C64::from_polar(1.0, w32 * t);
        // Terms acting on (row of A₃, row of A₂); each is a row vector over
        // the two columns.
        let (rhs3, rhs2) = match env {
            Environment::Pbg {
                params,
                kernel_scale,
            } => {
                let s = kernel_scale * BETA_3_2;
                let g3 = memory_integral(&track, dt, t, params.omega3c(), s);
                let g2 = memory_integral(&track, dt, t, params.omega2c(), s);
                let rhs3 = -g3.row(0) - g2.row(1) * forward;
                let cross = match form {
                    KernelForm::Symmetric => g3.row(0),
                    KernelForm::AsPrinted => g3.row(1),
                };
                let rhs2 = -g2.row(1) - cross * forward.conj();
                (rhs3, rhs2)
            }
            Environment::Free(p) => {
                let gb = C64::new(p.gamma_bar(), 0.0);
                let rhs3 = -m.row(0) * C64::new(p.gamma31(), 0.0) - m.row(1) * gb * forward;
                let cross = match form {
                    KernelForm::Symmetric => m.row(0),
                    KernelForm::AsPrinted => m.row(1),
                };
                let rhs2 = -m.row(1) * C64::new(p.gamma21(), 0.0) - cross * gb * forward.conj();
                (rhs3, rhs2)
            }
        };
        sup3 = sup3.max(
            (d.row(0) - rhs3)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        );
        sup2 = sup2.max(
            (d.row(1) - rhs2)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        );
        sup_deriv = sup_deriv.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let scale = sup_deriv.max(sup_amp / t_max);
    Ok(KernelResidual {
        relative: sup3.max(sup2) / scale,
        sup_eq_a3: sup3,
        sup_eq_a2: sup2,
        scale,
    })
}

/// One discretized reservoir mode. Frequencies are measured in the frame
/// rotating at `ω₃₁`, so level `|a₃⟩` sits at 0 and `|a₂⟩` at `-ω₃₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirMode {
    pub omega_k: f64,
    /// Coupling to the `|a₃⟩ ↔ |a₁⟩` transition.
    pub g31: f64,
    /// Coupling to the `|a₂⟩ ↔ |a₁⟩` transition.
    pub g21: f64,
}

/// A finite reservoir together with the static level shift produced by the
/// modes left out above the band, `H_eff = shift` on `(|a₃⟩, |a₂⟩)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteReservoir {
    pub modes: Vec<ReservoirMode>,
    pub shift: Matrix2<f64>,
}

/// Free space: flat density over `±band_halfwidth` around the midpoint of the
/// two transitions, `g² = γΔω/π`. PBG: modes uniform in `v = √(ω - ω_c)` on
/// `(0, √band_halfwidth]` with `g² = (2/π)β^{3/2}Δv`, which reproduces the
/// band-edge kernel; the truncated tail is folded into a static shift.
pub fn reservoir_modes(
    env: &Environment,
    n_modes: usize,
    band_halfwidth: f64,
) -> Result<DiscreteReservoir> {
    if n_modes < 500 {
        return invalid(format!("mode sum needs at least 500 modes, got {n_modes}"));
    }
    if !(band_halfwidth > 0.0) || !band_halfwidth.is_finite() {
        return invalid(format!(
            "band half-width must be positive, got {band_halfwidth}"
        ));
    }
    let n = n_modes as f64;
    match env {
        Environment::Free(p) => {
            let center = -p.omega32() / 2.0;
            let dw = 2.0 * band_halfwidth / n;
            let modes = (0..n_modes)
                .map(|k| ReservoirMode {
                    omega_k: center - band_halfwidth + (k as f64 + 0.5) * dw,
                    g31: (p.gamma31() * dw / PI).sqrt(),
                    g21: (p.gamma21() * dw / PI).sqrt(),
                })
                .collect();
            Ok(DiscreteReservoir {
                modes,
                shift: Matrix2::zeros(),
            })
        }
        Environment::Pbg {
            params,
            kernel_scale,
        } => {
            let v_max = band_halfwidth.sqrt();
            let dv = v_max / n;
            let strength = kernel_scale * BETA_3_2;
            let g = (2.0 * strength * dv / PI).sqrt();
            let modes = (0..n_modes)
                .map(|k| {
                    let v = (k as f64 + 0.5) * dv;
                    ReservoirMode {
                        omega_k: v * v - params.omega3c(),
                        g31: g,
                        g21: g,
                    }
                })
                .collect();
            // Far-detuned modes above the band: adiabatic elimination gives
            // H_eff = -(2/π) ∫_V^∞ dv / (v² - ω₃c) on every element.
            let a = params.omega3c();
            let tail = if a > 0.0 {
                let r = a.sqrt();
                ((v_max + r) / (v_max - r)).ln() / (2.0 * r)
            } else if a < 0.0 {
                let r = (-a).sqrt();
                (PI / 2.0 - (v_max / r).atan()) / r
            } else {
                1.0 / v_max
            };
            let s = -2.0 * strength * tail / PI;
            Ok(DiscreteReservoir {
                modes,
                shift: Matrix2::new(s, s, s, s),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSumTrack {
    pub times: Vec<f64>,
    /// `(A₃, A₂)` at each time.
    pub amplitudes: Vec<(C64, C64)>,
    /// Largest deviation of the full-system norm from its initial value.
    pub max_norm_defect: f64,
}

/// Tolerated growth of the full-system norm before the run is declared
/// unstable.
pub const NORM_GROWTH_LIMIT: f64 = 1e-6;

/// Integrates the atom plus discretized reservoir with classical RK4 and
/// returns the upper-level amplitudes on `t_grid` (ascending, starting at
/// or after 0).
pub fn mode_sum_evolve(
    env: &Environment,
    initial: (C64, C64),
    n_modes: usize,
    band_halfwidth: f64,
    t_grid: &[f64],
) -> Result<ModeSumTrack> {
    let reservoir = reservoir_modes(env, n_modes, band_halfwidth)?;
    if t_grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite())
        || t_grid.windows(2).any(|w| w[1] < w[0])
    {
        return invalid("time grid must be finite, nonnegative and ascending");
    }
    let w32 = env.omega32();
    let modes = &reservoir.modes;
    let h = reservoir.shift;
    let omega: Vec<f64> = modes.iter().map(|m| m.omega_k).collect();
    let g3: Vec<f64> = modes.iter().map(|m| m.g31).collect();
    let g2: Vec<f64> = modes.iter().map(|m| m.g21).collect();
    // Spectral radius bound of the generator sets the step.
    let collective =
        (g3.iter().map(|g| g * g).sum::<f64>() + g2.iter().map(|g| g * g).sum::<f64>()).sqrt();
    let w_max = omega.iter().fold(w32.abs(), |a, w| a.max(w.abs())) + collective + h.abs().max();
    let h_max = 0.02 / w_max;

    let i = C64::new(0.0, 1.0);
    let nk = modes.len();
    let rhs = |b3: C64, b2: C64, bk: &[C64], d: &mut (C64, C64, Vec<C64>)| {
        let (mut s3, mut s2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for k in 0..nk {
            s3 += bk[k] * g3[k];
            s2 += bk[k] * g2[k];
            d.2[k] = -i * omega[k] * bk[k] + b3 * g3[k] + b2 * g2[k];
        }
        d.0 = -s3 - i * (b3 * h[(0, 0)] + b2 * h[(0, 1)]);
        d.1 = -s2 - i * (b2 * (h[(1, 1)] - w32) + b3 * h[(1, 0)]);
    };

    let (mut b3, mut b2) = initial;
    let mut bk = vec![C64::new(0.0, 0.0); nk];
    let norm0 = b3.norm_sqr() + b2.norm_sqr();
    let mut k1 = (C64::default(), C64::default(), vec![C64::default(); nk]);
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = vec![C64::default(); nk];
    let mut t = 0.0;
    let mut out = ModeSumTrack {
        times: Vec::new(),
        amplitudes: Vec::new(),
        max_norm_defect: 0.0,
    };
    for &target in t_grid {
        let span = target - t;
        let steps = (span / h_max).ceil() as usize;
        let step = if steps > 0 { span / steps as f64 } else { 0.0 };
        for _ in 0..steps {
            rhs(b3, b2, &bk, &mut k1);
            for k in 0..nk {
                tmp[k] = bk[k] + k1.2[k] * (step / 2.0);
            }
            rhs(
                b3 + k1.0 * (step / 2.0),
                b2 + k1.1 * (step / 2.0),
                &tmp,
                &mut k2,
            );
            for k in 0..nk {
                tmp[k] = bk[k] + k2.2[k] * (step / 2.0);
            }
            rhs(
                b3 + k2.0 * (step / 2.0),
                b2 + k2.1 * (step / 2.0),
                &tmp,
                &mut k3,
            );
            for k in 0..nk {
                tmp[k] = bk[k] + k3.2[k] * step;
            }
            rhs(b3 + k3.0 * step, b2 + k3.1 * step, &tmp, &mut k4);
            let c = step / 6.0;
            b3 += (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0) * c;
            b2 += (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1) * c;
            for k in 0..nk {
                bk[k] += (k1.2[k] + k2.2[k] * 2.0 + k3.2[k] * 2.0 + k4.2[k]) * c;
            }
        }
        t = target;
        let norm = b3.norm_sqr() + b2.norm_sqr() + bk.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let defect = norm - norm0;
        if defect > NORM_GROWTH_LIMIT {
            return Err(Error::Integration(format!(
                "norm grew by {defect:e} at t = {t}"
            )));
        }
        out.max_norm_defect = out.max_norm_defect.max(defect.abs());
        out.times.push(t);
        // Back to the slowly varying amplitudes: A₂ = b₂ e^{-iω₃₂t}.
        out.amplitudes
            .push((b3, b2 * C64::from_polar(1.0, -w32 * t)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::propagator_free;
    use crate::pbg::PbgPropagator;
    use crate::propagator::Propagator;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn interpolation_is_exact_for_cubics() {
        let dt = 0.1;
        let f = |s: f64| c(1.0 + s - 2.0 * s * s + 0.5 * s * s * s);
        let track: Vec<_> = (0..20)
            .map(|k| Matrix2::from_element(f(k as f64 * dt)))
            .collect();
        for s in [0.0, 0.05, 0.37, 1.0, 1.85, 1.9] {
            assert!((interpolate(&track, dt, s)[(0, 0)] - f(s)).norm() < 1e-12);
        }
    }

    #[test]
    fn memory_integral_of_constant() {
        // ∫₀ᵗ e^{-iπ/4}/√(πτ) dτ = 2 e^{-iπ/4} √(t/π) for ω = 0.
        let track = vec![Matrix2::identity(); 201];
        let t = 1.7;
        let v = memory_integral(&track, 0.01, t, 0.0, 1.0)[(0, 0)];
        let expected = C64::from_polar(2.0 * (t / PI).sqrt(), -FRAC_PI_4);
        assert!((v - expected).norm() < 1e-12);
    }

    #[test]
    fn free_single_level_residual() {
        let p = FreeParams::new(1.0, 0.0, 0.5).unwrap();
        let r =
            check_kernel_consistency(&p, &Environment::Free(p), 10.0, 0.01, KernelForm::Symmetric)
                .unwrap();
        assert!(r.relative < 1e-6, "{r:?}");
    }

    #[test]
    fn free_coupled_residual() {
        let p = FreeParams::new(1.0, 0.7, 0.5).unwrap();
        let r =
            check_kernel_consistency(&p, &Environment::Free(p), 5.0, 0.01, KernelForm::Symmetric)
                .unwrap();
        assert!(r.relative < 1e-6, "{r:?}");
        let printed =
            check_kernel_consistency(&p, &Environment::Free(p), 5.0, 0.01, KernelForm::AsPrinted)
                .unwrap();
        assert!(printed.relative > 1e-2);
    }

    #[test]
    fn weak_coupling_constant_amplitudes() {
        let params = PbgParams::new(0.1, -1.0).unwrap();
        let env = Environment::Pbg {
            params,
            kernel_scale: 1e-12,
        };
        let constant = |t: f64| Ok(Propagator::identity(t));
        let r =
            check_kernel_consistency(&constant, &env, 10.0, 0.01, KernelForm::Symmetric).unwrap();
        assert!(r.relative <= 1e-9, "{r:?}");
    }

    #[test]
    fn coarse_grid_rejected() {
        let p = FreeParams::new(1.0, 0.0, 0.5).unwrap();
        assert!(check_kernel_consistency(
            &p,
            &Environment::Free(p),
            10.0,
            0.05,
            KernelForm::Symmetric
        )
        .is_err());
    }

    #[test]
    fn pbg_short_window_residual() {
        let params = PbgParams::new(0.1, -1.0).unwrap();
        let prop = PbgPropagator::new(params).unwrap();
        let r = check_kernel_consistency(
            &prop,
            &Environment::pbg(params),
            1.0,
            0.01,
            KernelForm::Symmetric,
        )
        .unwrap();
        assert!(r.relative < 1e-3, "{r:?}");
    }

    #[test]
    fn mode_sum_initial_state_and_norm() {
        let p = FreeParams::new(1.0, 1.0, 0.5).unwrap();
        let init = (c(0.6), C64::new(0.0, 0.8));
        let r = mode_sum_evolve(&Environment::Free(p), init, 500, 10.0, &[0.0, 0.5]).unwrap();
        assert_eq!(r.amplitudes[0], init);
        assert!(r.max_norm_defect < 1e-8);
    }

    #[test]
    fn mode_sum_single_level_decay() {
        let p = FreeParams::new(1.0, 0.0, 0.5).unwrap();
        let times = [0.5, 1.0, 2.0];
        let r =
            mode_sum_evolve(&Environment::Free(p), (c(1.0), c(0.0)), 1000, 20.0, &times).unwrap();
        for (t, (a3, _)) in times.iter().zip(&r.amplitudes) {
            let exact = propagator_free(*t, &p).unwrap().m[(0, 0)];
            assert!((a3 - exact).norm() < 2e-2);
        }
    }

    #[test]
    fn mode_sum_argument_checks() {
        let p = FreeParams::new(1.0, 0.0, 0.5).unwrap();
        let env = Environment::Free(p);
        assert!(mode_sum_evolve(&env, (c(1.0), c(0.0)), 100, 10.0, &[0.0]).is_err());
        assert!(mode_sum_evolve(&env, (c(1.0), c(0.0)), 500, -1.0, &[0.0]).is_err());
        assert!(mode_sum_evolve(&env, (c(1.0), c(0.0)), 500, 10.0, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn pbg_tail_shift_is_negative_and_small() {
        let params = PbgParams::new(0.1, -1.0).unwrap();
        let res = reservoir_modes(&Environment::pbg(params), 1000, 400.0).unwrap();
        let s = res.shift[(0, 0)];
        assert!(s < 0.0 && s > -0.05);
    }
}
