//! Scenario configuration: a TOML-compatible `key = value` file whose keys
//! mirror [`PartialConfig`], merged over optional built-in defaults and
//! validated into a [`ScenarioConfig`].

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentKind {
    Pbg,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKindName {
    TwoLevel,
    QutritHss,
}

/// Columns that can be requested, in CSV order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    QfiTheta,
    QfiPhi,
    SigmaMin,
    Coherence,
    Hss,
    Chi,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::QfiTheta,
        Observable::QfiPhi,
        Observable::SigmaMin,
        Observable::Coherence,
        Observable::Hss,
        Observable::Chi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::QfiTheta => "qfi_theta",
            Observable::QfiPhi => "qfi_phi",
            Observable::SigmaMin => "sigma_min",
            Observable::Coherence => "coherence",
            Observable::Hss => "hss",
            Observable::Chi => "chi",
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Phi,
    Omega3c,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Phi => "phi",
            SweepParam::Omega3c => "omega3c",
        }
    }
}

/// Every key is optional so that files can override built-in scenarios.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub environment: Option<EnvironmentKind>,
    pub omega3c: Option<f64>,
    pub omega32: Option<f64>,
    pub gamma31: Option<f64>,
    pub gamma21: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub state_kind: Option<StateKindName>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub observables: Option<Vec<Observable>>,
    pub sweep: Option<Vec<f64>>,
    /// Which parameter `sweep` varies; defaults to `phi`.
    pub sweep_param: Option<SweepParam>,
}

impl PartialConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Keys present in `over` replace those in `self`.
    pub fn merged(&self, over: &PartialConfig) -> PartialConfig {
        PartialConfig {
            environment: over.environment.or(self.environment),
            omega3c: over.omega3c.or(self.omega3c),
            omega32: over.omega32.or(self.omega32),
            gamma31: over.gamma31.or(self.gamma31),
            gamma21: over.gamma21.or(self.gamma21),
            theta: over.theta.or(self.theta),
            phi: over.phi.or(self.phi),
            state_kind: over.state_kind.or(self.state_kind),
            t_max: over.t_max.or(self.t_max),
            dt: over.dt.or(self.dt),
            observables: over
                .observables
                .clone()
                .or_else(|| self.observables.clone()),
            sweep: over.sweep.clone().or_else(|| self.sweep.clone()),
            sweep_param: over.sweep_param.or(self.sweep_param),
        }
    }
}

pub const DEFAULT_PBG_OMEGA32: f64 = 0.1;
pub const DEFAULT_PBG_T_MAX: f64 = 20.0;
pub const DEFAULT_FREE_GAMMA31: f64 = 1.0;
pub const DEFAULT_FREE_GAMMA21: f64 = 1.0;
/// Splitting well above `2γ̄`, so that no nearly dark superposition forms
/// and free-space emission runs to completion.
pub const DEFAULT_FREE_OMEGA32: f64 = 5.0;
pub const DEFAULT_FREE_T_MAX: f64 = 10.0;
pub const DEFAULT_DT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "environment", rename_all = "snake_case")]
pub enum EnvironmentConfig {
    Pbg {
        omega3c: Option<f64>,
        omega32: f64,
    },
    Free {
        gamma31: f64,
        gamma21: f64,
        omega32: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Validated configuration of one panel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    #[serde(flatten)]
    pub environment: EnvironmentConfig,
    pub theta: f64,
    pub phi: f64,
    pub state_kind: StateKindName,
    pub t_max: f64,
    pub dt: f64,
    pub observables: Vec<Observable>,
    pub sweep: Option<Sweep>,
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!(
            "`{name}` must be finite, got {v}"
        )))
    }
}

fn check_phi(v: f64) -> Result<(), CliError> {
    if (0.0..TAU).contains(&v) {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "phi values must lie in [0, 2π), got {v}"
        )))
    }
}

impl ScenarioConfig {
    pub fn from_partial(p: &PartialConfig) -> Result<Self, CliError> {
        let env = p
            .environment
            .ok_or_else(|| CliError::Config("missing key `environment` (pbg or free)".into()))?;
        let sweep_param = p.sweep_param.unwrap_or(SweepParam::Phi);
        if p.sweep.is_none() && p.sweep_param.is_some() {
            return Err(CliError::Config(
                "`sweep_param` given without `sweep` values".into(),
            ));
        }
        let environment = match env {
            EnvironmentKind::Pbg => {
                if p.gamma31.is_some() || p.gamma21.is_some() {
                    return Err(CliError::Config(
                        "`gamma31`/`gamma21` are free-space keys and not allowed with environment = \"pbg\"".into(),
                    ));
                }
                let sweeps_omega3c = p.sweep.is_some() && sweep_param == SweepParam::Omega3c;
                if p.omega3c.is_none() && !sweeps_omega3c {
                    return Err(CliError::Config(
                        "environment = \"pbg\" requires `omega3c`".into(),
                    ));
                }
                EnvironmentConfig::Pbg {
                    omega3c: p.omega3c.map(|v| finite("omega3c", v)).transpose()?,
                    omega32: finite("omega32", p.omega32.unwrap_or(DEFAULT_PBG_OMEGA32))?,
                }
            }
            EnvironmentKind::Free => {
                if p.omega3c.is_some() {
                    return Err(CliError::Config(
                        "`omega3c` is a band-gap key and not allowed with environment = \"free\""
                            .into(),
                    ));
                }
                if p.sweep.is_some() && sweep_param == SweepParam::Omega3c {
                    return Err(CliError::Config(
                        "cannot sweep `omega3c` in free space".into(),
                    ));
                }
                let gamma31 = finite("gamma31", p.gamma31.unwrap_or(DEFAULT_FREE_GAMMA31))?;
                let gamma21 = finite("gamma21", p.gamma21.unwrap_or(DEFAULT_FREE_GAMMA21))?;
                if gamma31 <= 0.0 || gamma21 < 0.0 {
                    return Err(CliError::Config(format!(
                        "free space needs gamma31 > 0 and gamma21 ≥ 0, got {gamma31}, {gamma21}"
                    )));
                }
                EnvironmentConfig::Free {
                    gamma31,
                    gamma21,
                    omega32: finite("omega32", p.omega32.unwrap_or(DEFAULT_FREE_OMEGA32))?,
                }
            }
        };
        let dt = finite("dt", p.dt.unwrap_or(DEFAULT_DT))?;
        let t_max = finite(
            "t_max",
            p.t_max.unwrap_or(match env {
                EnvironmentKind::Pbg => DEFAULT_PBG_T_MAX,
                EnvironmentKind::Free => DEFAULT_FREE_T_MAX,
            }),
        )?;
        if dt <= 0.0 {
            return Err(CliError::Config(format!("`dt` must be positive, got {dt}")));
        }
        if t_max < 10.0 * dt {
            return Err(CliError::Config(format!(
                "`t_max` must be at least 10·dt, got t_max = {t_max}, dt = {dt}"
            )));
        }
        let theta = finite("theta", p.theta.unwrap_or(PI / 2.0))?;
        if !(0.0..=PI).contains(&theta) {
            return Err(CliError::Config(format!(
                "`theta` must lie in [0, π], got {theta}"
            )));
        }
        let phi = finite("phi", p.phi.unwrap_or(0.0))?;
        check_phi(phi)?;
        let mut observables = p
            .observables
            .clone()
            .unwrap_or_else(|| Observable::ALL.to_vec());
        observables.sort();
        observables.dedup();
        let sweep = match &p.sweep {
            None => None,
            Some(values) => {
                if values.is_empty() {
                    return Err(CliError::Config(
                        "`sweep` must list at least one value".into(),
                    ));
                }
                for &v in values {
                    finite("sweep", v)?;
                    if sweep_param == SweepParam::Phi {
                        check_phi(v)?;
                    }
                }
                Some(Sweep {
                    param: sweep_param,
                    values: values.clone(),
                })
            }
        };
        Ok(Self {
            environment,
            theta,
            phi,
            state_kind: p.state_kind.unwrap_or(StateKindName::TwoLevel),
            t_max,
            dt,
            observables,
            sweep,
        })
    }

    pub fn environment_kind(&self) -> EnvironmentKind {
        match self.environment {
            EnvironmentConfig::Pbg { .. } => EnvironmentKind::Pbg,
            EnvironmentConfig::Free { .. } => EnvironmentKind::Free,
        }
    }

    /// Number of grid points, `⌊t_max/dt⌋ + 1`.
    pub fn grid_len(&self) -> usize {
        // The small slack keeps t_max = n·dt from losing its last point to
        // rounding in the division.
        (self.t_max / self.dt * (1.0 + 1e-12)).floor() as usize + 1
    }
}
