//! Oracle suite behind `vatom verify`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use vatom_core::free::{propagator_free, FreeParams};
use vatom_core::oracle::{check_kernel_consistency, mode_sum_evolve, Environment, KernelForm};
use vatom_core::pbg::{completeness_defect, PbgParams, PbgPropagator};
use vatom_core::{PropagatorSource, Result};

use crate::scenarios::DETUNINGS;

/// Band-gap splitting used by the suite (units of β).
pub const PBG_OMEGA32: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    /// `None` marks an informational line that cannot fail.
    pub threshold: Option<f64>,
}

impl CheckLine {
    fn new(name: impl Into<String>, value: f64, threshold: Option<f64>) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
        }
    }

    pub fn passed(&self) -> bool {
        self.threshold.is_none_or(|th| self.value <= th)
    }

    pub fn render(&self) -> String {
        match self.threshold {
            Some(th) => format!(
                "{:<5} {:<52} {:>11.3e}  (≤ {:.0e})",
                if self.passed() { "PASS" } else { "FAIL" },
                self.name,
                self.value,
                th
            ),
            None => format!("{:<5} {:<52} {:>11.3e}", "INFO", self.name, self.value),
        }
    }
}

/// Largest deviation between a mode-sum run and the closed form, over both
/// basis initial states.
fn mode_sum_deviation(
    env: &Environment,
    source: &dyn PropagatorSource,
    n_modes: usize,
    band: f64,
    times: &[f64],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (c3, c2) in [(1.0, 0.0), (0.0, 1.0)] {
        let init = (C64::new(c3, 0.0), C64::new(c2, 0.0));
        let track = mode_sum_evolve(env, init, n_modes, band, times)?;
        for (t, (a3, a2)) in times.iter().zip(&track.amplitudes) {
            let (e3, e2) = source.propagator(*t)?.apply(init.0, init.1);
            worst = worst.max((a3 - e3).norm()).max((a2 - e2).norm());
        }
    }
    Ok(worst)
}

fn pbg_checks() -> Result<Vec<CheckLine>> {
    let per_detuning: Vec<Vec<CheckLine>> = DETUNINGS
        .par_iter()
        .map(|&w3c| -> Result<Vec<CheckLine>> {
            let params = PbgParams::new(PBG_OMEGA32, w3c)?;
            let prop = PbgPropagator::new(params)?;
            let env = Environment::pbg(params);
            let tag = format!("pbg ω3c={w3c}");
            let identity = prop.propagator(0.0)?.identity_defect();
            let completeness = completeness_defect(&params, &prop.roots)?;
            let kernel = check_kernel_consistency(&prop, &env, 10.0, 0.01, KernelForm::Symmetric)?;
            let printed = check_kernel_consistency(&prop, &env, 10.0, 0.01, KernelForm::AsPrinted)?;
            let times: Vec<f64> = (0..=10).map(|k| 0.5 * k as f64).collect();
            let modes = mode_sum_deviation(&env, &prop, 2000, 400.0, &times)?;
            Ok(vec![
                CheckLine::new(format!("{tag}: identity at t=0"), identity, Some(1e-9)),
                CheckLine::new(
                    format!("{tag}: completeness at t=0"),
                    completeness,
                    Some(1e-6),
                ),
                CheckLine::new(
                    format!("{tag}: kernel residual, t∈[0,10]"),
                    kernel.relative,
                    Some(1e-3),
                ),
                CheckLine::new(
                    format!("{tag}: kernel residual, A2-kernel variant"),
                    printed.relative,
                    None,
                ),
                CheckLine::new(
                    format!("{tag}: mode sum (2000 modes), t≤5"),
                    modes,
                    Some(1e-2),
                ),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(per_detuning.into_iter().flatten().collect())
}

fn free_checks() -> Result<Vec<CheckLine>> {
    let single = FreeParams::new(1.0, 0.0, 0.5)?;
    let coupled = FreeParams::new(1.0, 1.0, 0.5)?;
    let mut ww: f64 = 0.0;
    for k in 0..=1000 {
        let t = 0.01 * k as f64;
        let m = propagator_free(t, &single)?.m;
        ww = ww.max((m[(0, 0)].norm() - (-t).exp()).abs());
    }
    let identity = propagator_free(0.0, &coupled)?.identity_defect();
    let kernel_single = check_kernel_consistency(
        &single,
        &Environment::Free(single),
        10.0,
        0.01,
        KernelForm::Symmetric,
    )?;
    let kernel = check_kernel_consistency(
        &coupled,
        &Environment::Free(coupled),
        10.0,
        0.01,
        KernelForm::Symmetric,
    )?;
    let times: Vec<f64> = (0..=30).map(|k| 0.1 * k as f64).collect();
    let modes = mode_sum_deviation(&Environment::Free(coupled), &coupled, 2000, 40.0, &times)?;
    Ok(vec![
        CheckLine::new("free: identity at t=0", identity, Some(1e-9)),
        CheckLine::new("free γ21=0: |A3| vs e^{-γ31 t}, t∈[0,10]", ww, Some(1e-9)),
        CheckLine::new(
            "free γ21=0: equation residual",
            kernel_single.relative,
            Some(1e-6),
        ),
        CheckLine::new(
            "free γ21=γ31: equation residual",
            kernel.relative,
            Some(1e-6),
        ),
        CheckLine::new(
            "free γ21=γ31, ω32=0.5: mode sum (2000 modes), t≤3",
            modes,
            Some(1e-2),
        ),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Pbg,
    Free,
    All,
}

pub fn run(suite: Suite) -> Result<Vec<CheckLine>> {
    let (pbg, free) = rayon::join(
        || {
            if suite != Suite::Free {
                pbg_checks()
            } else {
                Ok(Vec::new())
            }
        },
        || {
            if suite != Suite::Pbg {
                free_checks()
            } else {
                Ok(Vec::new())
            }
        },
    );
    let mut lines = pbg?;
    lines.extend(free?);
    Ok(lines)
}
