//! Evaluates one panel: propagator on the time grid, state assembly and all
//! observables, for every sweep value.

use rayon::prelude::*;
use serde::Serialize;
use vatom_core::free::FreeParams;
use vatom_core::metrology::{qfim, sigma_min};
use vatom_core::pbg::{PbgParams, PbgPropagator};
use vatom_core::quantumness::{coherence_l1, hss, hss_witness, ObservableTrack};
use vatom_core::state::{
    amplitude_derivatives, density_matrix, drho_dparam, initial_amplitudes, StateKind,
};
use vatom_core::{Error, PropagatorSource};

use crate::config::{EnvironmentConfig, ScenarioConfig, StateKindName, SweepParam};
use crate::error::CliError;

/// All observables at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Row {
    pub t: f64,
    pub qfi_theta: f64,
    pub qfi_phi: f64,
    /// `tr F⁻¹`, `∞` when the Fisher matrix is singular.
    pub sigma_min: f64,
    /// Smallest eigenvalue of `F⁻¹`, `∞` when singular.
    pub sigma_min_eig: f64,
    pub coherence: f64,
    pub hss: f64,
    pub chi: f64,
}

/// State-validity diagnostics accumulated along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Validity {
    pub max_trace_defect: f64,
    pub min_eigenvalue: f64,
    pub max_excited_population: f64,
    pub max_sld_residual: f64,
    pub singular_fisher_points: usize,
}

impl Validity {
    fn new() -> Self {
        Self {
            max_trace_defect: 0.0,
            min_eigenvalue: f64::INFINITY,
            max_excited_population: 0.0,
            max_sld_residual: 0.0,
            singular_fisher_points: 0,
        }
    }

    fn merge(self, o: Validity) -> Self {
        Self {
            max_trace_defect: self.max_trace_defect.max(o.max_trace_defect),
            min_eigenvalue: self.min_eigenvalue.min(o.min_eigenvalue),
            max_excited_population: self.max_excited_population.max(o.max_excited_population),
            max_sld_residual: self.max_sld_residual.max(o.max_sld_residual),
            singular_fisher_points: self.singular_fisher_points + o.singular_fisher_points,
        }
    }

    /// Trace within 1e-10, eigenvalues ≥ -1e-9, `|A₃|² + |A₂|² ≤ 1 + 1e-9`.
    pub fn is_physical(&self) -> bool {
        self.max_trace_defect <= 1e-10
            && self.min_eigenvalue >= -1e-9
            && self.max_excited_population <= 1.0 + 1e-9
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Value of the swept parameter, if any.
    pub value: Option<f64>,
    pub theta: f64,
    pub phi: f64,
    pub omega3c: Option<f64>,
    #[serde(skip)]
    pub rows: Vec<Row>,
    pub validity: Validity,
    /// `∫ max(χ, 0) dt` (extension; the witness itself is `χ`).
    pub backflow: f64,
}

impl SweepResult {
    pub fn column(&self, f: impl Fn(&Row) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }
}

enum Source {
    Pbg(PbgPropagator),
    Free(FreeParams),
}

impl Source {
    fn get(&self) -> &dyn PropagatorSource {
        match self {
            Source::Pbg(p) => p,
            Source::Free(p) => p,
        }
    }
}

/// Evaluates every sweep value of a panel; sweep values and time points run
/// in parallel, results are assembled in grid order.
pub fn run_panel(cfg: &ScenarioConfig) -> Result<Vec<SweepResult>, CliError> {
    let points: Vec<(Option<f64>, f64, Option<f64>)> = match &cfg.sweep {
        None => vec![(None, cfg.phi, pbg_omega3c(cfg))],
        Some(s) => s
            .values
            .iter()
            .map(|&v| match s.param {
                SweepParam::Phi => (Some(v), v, pbg_omega3c(cfg)),
                SweepParam::Omega3c => (Some(v), cfg.phi, Some(v)),
            })
            .collect(),
    };
    points
        .into_par_iter()
        .map(|(value, phi, omega3c)| run_point(cfg, value, phi, omega3c))
        .collect()
}

fn pbg_omega3c(cfg: &ScenarioConfig) -> Option<f64> {
    match cfg.environment {
        EnvironmentConfig::Pbg { omega3c, .. } => omega3c,
        EnvironmentConfig::Free { .. } => None,
    }
}

fn run_point(
    cfg: &ScenarioConfig,
    value: Option<f64>,
    phi: f64,
    omega3c: Option<f64>,
) -> Result<SweepResult, CliError> {
    let source = match cfg.environment {
        EnvironmentConfig::Pbg { omega32, .. } => {
            let w3c =
                omega3c.ok_or_else(|| CliError::Config("band-gap run without omega3c".into()))?;
            Source::Pbg(PbgPropagator::new(PbgParams::new(omega32, w3c)?)?)
        }
        EnvironmentConfig::Free {
            gamma31,
            gamma21,
            omega32,
        } => Source::Free(FreeParams::new(gamma31, gamma21, omega32)?),
    };
    let kind = match cfg.state_kind {
        StateKindName::TwoLevel => StateKind::TwoLevel,
        StateKindName::QutritHss => StateKind::QutritHss,
    };
    let theta = cfg.theta;
    let c = initial_amplitudes(theta, phi, kind)?;
    let (dc_theta, dc_phi) = amplitude_derivatives(&c, theta, phi);
    let n = cfg.grid_len();
    let src = source.get();

    let evaluated: Vec<(Row, Validity)> = (0..n)
        .into_par_iter()
        .map(|k| -> Result<(Row, Validity), CliError> {
            let t = k as f64 * cfg.dt;
            let m = src.propagator(t)?;
            let rho = density_matrix(&m, &c);
            let d_theta = drho_dparam(&m, &c, &dc_theta);
            let d_phi = drho_dparam(&m, &c, &dc_phi);
            let f = qfim(&rho, &d_theta, &d_phi)?;
            let mut validity = Validity::new();
            let (sigma, sigma_eig) = match sigma_min(&f) {
                Ok(s) => (s.trace, s.min_eigenvalue),
                Err(Error::SingularFisher(_)) => {
                    validity.singular_fisher_points = 1;
                    (f64::INFINITY, f64::INFINITY)
                }
                Err(e) => return Err(e.into()),
            };
            let es = rho.eigen()?;
            validity.max_trace_defect = (rho.trace() - 1.0).abs();
            validity.min_eigenvalue = es.eigenvalues[0];
            validity.max_excited_population = rho.excited_population();
            for d in [&d_theta, &d_phi] {
                let l = vatom_core::metrology::sld(&rho, d, vatom_core::metrology::RANK_TOL)?;
                validity.max_sld_residual = validity.max_sld_residual.max(l.residual);
            }
            let row = Row {
                t,
                qfi_theta: f.f_tt,
                qfi_phi: f.f_pp,
                sigma_min: sigma,
                sigma_min_eig: sigma_eig,
                coherence: coherence_l1(&rho),
                hss: hss(&d_phi),
                chi: 0.0,
            };
            Ok((row, validity))
        })
        .collect::<Result<_, _>>()?;

    let validity = evaluated
        .iter()
        .fold(Validity::new(), |acc, (_, v)| acc.merge(*v));
    let mut rows: Vec<Row> = evaluated.into_iter().map(|(r, _)| r).collect();
    let track = ObservableTrack::new("hss", 0.0, cfg.dt, rows.iter().map(|r| r.hss).collect())?;
    let witness = hss_witness(&track)?;
    for (r, chi) in rows.iter_mut().zip(witness.chi.values) {
        r.chi = chi;
    }
    Ok(SweepResult {
        value,
        theta,
        phi,
        omega3c,
        rows,
        validity,
        backflow: witness.backflow,
    })
}
