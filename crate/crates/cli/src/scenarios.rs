//! Built-in figure scenarios. Each figure maps to one or two panels (free
//! space and band gap) of partial configurations; values not fixed here come
//! from the configuration defaults.

use std::f64::consts::PI;

use crate::config::{EnvironmentKind, Observable, PartialConfig, StateKindName, SweepParam};
use crate::error::CliError;

pub const SCENARIOS: [&str; 8] = [
    "fig2", "fig3", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10",
];

/// φ values used by the phase-sweep figures.
pub const PHASES: [f64; 4] = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
/// Band-edge detunings used by the detuning-sweep figures (units of β).
pub const DETUNINGS: [f64; 3] = [-1.0, 0.2, 0.9];

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub label: String,
    pub config: PartialConfig,
}

fn phase_sweep(
    env: EnvironmentKind,
    observables: &[Observable],
    state: StateKindName,
) -> PartialConfig {
    PartialConfig {
        environment: Some(env),
        omega3c: (env == EnvironmentKind::Pbg).then_some(-1.0),
        theta: Some(PI / 2.0),
        state_kind: Some(state),
        observables: Some(observables.to_vec()),
        sweep: Some(PHASES.to_vec()),
        sweep_param: Some(SweepParam::Phi),
        ..Default::default()
    }
}

fn detuning_sweep(observables: &[Observable], state: StateKindName) -> PartialConfig {
    PartialConfig {
        environment: Some(EnvironmentKind::Pbg),
        theta: Some(PI / 2.0),
        phi: Some(0.0),
        state_kind: Some(state),
        observables: Some(observables.to_vec()),
        sweep: Some(DETUNINGS.to_vec()),
        sweep_param: Some(SweepParam::Omega3c),
        ..Default::default()
    }
}

fn two_panels(name: &str, observables: &[Observable], state: StateKindName) -> Vec<Panel> {
    vec![
        Panel {
            label: format!("{name}_free"),
            config: phase_sweep(EnvironmentKind::Free, observables, state),
        },
        Panel {
            label: format!("{name}_pbg"),
            config: phase_sweep(EnvironmentKind::Pbg, observables, state),
        },
    ]
}

pub fn builtin(name: &str) -> Result<Vec<Panel>, CliError> {
    use Observable::*;
    use StateKindName::*;
    let qfi = [QfiTheta, QfiPhi];
    Ok(match name {
        "fig2" => two_panels(name, &qfi, TwoLevel),
        "fig3" => vec![Panel {
            label: name.into(),
            config: detuning_sweep(&qfi, TwoLevel),
        }],
        "fig5" => two_panels(name, &[SigmaMin], TwoLevel),
        "fig6" => vec![Panel {
            label: name.into(),
            config: detuning_sweep(&[SigmaMin], TwoLevel),
        }],
        "fig7" => two_panels(name, &[Coherence], TwoLevel),
        "fig8" => vec![Panel {
            label: name.into(),
            config: detuning_sweep(&[Coherence], TwoLevel),
        }],
        "fig9" => two_panels(name, &[Hss, Chi], QutritHss),
        "fig10" => vec![Panel {
            label: name.into(),
            config: detuning_sweep(&[Hss, Chi], QutritHss),
        }],
        other => {
            return Err(CliError::Config(format!(
                "unknown scenario `{other}`; expected one of {}",
                SCENARIOS.join(", ")
            )))
        }
    })
}
