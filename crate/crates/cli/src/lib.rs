//! Scenario runner for the `vatom` command: configuration, built-in figure
//! scenarios, CSV/SVG/manifest output and the oracle verification suite.

pub mod config;
pub mod engine;
pub mod error;
pub mod format;
pub mod output;
pub mod scenarios;
pub mod svg;
pub mod verify;

pub use error::CliError;

use config::{PartialConfig, ScenarioConfig};
use output::ResolvedPanel;

/// Resolves the panels of a run: the built-in scenario's panels with the
/// optional file configuration layered on top, or the file alone.
pub fn resolve(
    scenario: Option<&str>,
    file: Option<&PartialConfig>,
) -> Result<Vec<ResolvedPanel>, CliError> {
    match scenario {
        Some(name) => scenarios::builtin(name)?
            .into_iter()
            .map(|p| {
                let merged = match file {
                    Some(f) => p.config.merged(f),
                    None => p.config,
                };
                Ok(ResolvedPanel {
                    label: p.label,
                    config: ScenarioConfig::from_partial(&merged)?,
                })
            })
            .collect(),
        None => {
            let f = file.ok_or_else(|| {
                CliError::Config("either --config or --scenario is required".into())
            })?;
            Ok(vec![ResolvedPanel {
                label: "run".into(),
                config: ScenarioConfig::from_partial(f)?,
            }])
        }
    }
}
