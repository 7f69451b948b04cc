//! Runs panels and writes CSV tables, SVG charts and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ScenarioConfig, SweepParam};
use crate::engine::{run_panel, SweepResult, Validity};
use crate::error::CliError;
use crate::format::{column, csv, format_g9};
use crate::svg::{line_chart, Series};

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedPanel {
    pub label: String,
    pub config: ScenarioConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub file: String,
    pub sweep_param: Option<&'static str>,
    pub value: Option<f64>,
    pub rows: usize,
    /// `∫ max(χ, 0) dt`, an aggregate added on top of the witness.
    pub backflow_extension: f64,
    pub validity: Validity,
}

#[derive(Debug, Clone, Serialize)]
pub struct PanelManifest {
    pub label: String,
    pub config: ScenarioConfig,
    pub csv: Vec<FileEntry>,
    pub svg: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub library: &'static str,
    pub version: &'static str,
    pub scenario: Option<String>,
    pub conventions: Vec<&'static str>,
    pub panels: Vec<PanelManifest>,
}

pub const CONVENTIONS: [&str; 5] = [
    "units: band gap in beta = 1 (frequencies in beta, time in 1/beta); free space in 1/gamma31",
    "qfi: F_ij = Re tr(rho (L_i L_j + L_j L_i))/2 with SLD kernel-kernel components dropped (rank_tol 1e-12)",
    "sigma_min: tr(F^-1); inf where det F <= 1e-14",
    "chi: dHSS/dt by second-order finite differences on the output grid",
    "backflow_extension: trapezoidal integral of max(chi, 0); a summary added to the witness",
];

/// Panel outputs kept in memory for callers that inspect them directly.
#[derive(Debug, Clone)]
pub struct PanelOutput {
    pub label: String,
    pub config: ScenarioConfig,
    pub results: Vec<SweepResult>,
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn file_stem(label: &str, param: Option<SweepParam>, k: usize) -> String {
    match param {
        Some(p) => format!("{label}_{}{k}", p.name()),
        None => label.to_string(),
    }
}

fn series_label(param: Option<SweepParam>, r: &SweepResult) -> String {
    match (param, r.value) {
        (Some(p), Some(v)) => format!("{} = {}", p.name(), format_g9(v)),
        _ => "run".into(),
    }
}

/// Computes every panel and writes `<label>[_<param><k>].csv` files, optional
/// `<label>_<observable>.svg` charts and `manifest.json` into `out_dir`.
pub fn run_scenario(
    scenario: Option<&str>,
    panels: &[ResolvedPanel],
    out_dir: &Path,
    svg: bool,
) -> Result<Vec<PanelOutput>, CliError> {
    fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut manifest = Manifest {
        library: "vatom-core",
        version: vatom_core::VERSION,
        scenario: scenario.map(str::to_string),
        conventions: CONVENTIONS.to_vec(),
        panels: Vec::new(),
    };
    let mut outputs = Vec::new();
    for panel in panels {
        let cfg = &panel.config;
        let mut pm = PanelManifest {
            label: panel.label.clone(),
            config: cfg.clone(),
            csv: Vec::new(),
            svg: Vec::new(),
        };
        if cfg.observables.is_empty() {
            manifest.panels.push(pm);
            outputs.push(PanelOutput {
                label: panel.label.clone(),
                config: cfg.clone(),
                results: Vec::new(),
            });
            continue;
        }
        let results = run_panel(cfg)?;
        let param = cfg.sweep.as_ref().map(|s| s.param);
        for (k, r) in results.iter().enumerate() {
            let name = format!("{}.csv", file_stem(&panel.label, param, k));
            write(&out_dir.join(&name), &csv(r, &cfg.observables))?;
            pm.csv.push(FileEntry {
                file: name,
                sweep_param: param.map(SweepParam::name),
                value: r.value,
                rows: r.rows.len(),
                backflow_extension: r.backflow,
                validity: r.validity,
            });
        }
        if svg {
            let times: Vec<f64> = results
                .first()
                .map(|r| r.column(|row| row.t))
                .unwrap_or_default();
            for &o in &cfg.observables {
                let ys: Vec<Vec<f64>> = results.iter().map(|r| column(r, o)).collect();
                let series: Vec<Series> = results
                    .iter()
                    .zip(&ys)
                    .map(|(r, y)| Series {
                        label: series_label(param, r),
                        x: &times,
                        y,
                    })
                    .collect();
                let name = format!("{}_{}.svg", panel.label, o.name());
                write(
                    &out_dir.join(&name),
                    &line_chart(
                        &format!("{} — {}", panel.label, o.name()),
                        "t",
                        o.name(),
                        &series,
                    ),
                )?;
                pm.svg.push(name);
            }
        }
        manifest.panels.push(pm);
        outputs.push(PanelOutput {
            label: panel.label.clone(),
            config: cfg.clone(),
            results,
        });
    }
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(&out_dir.join("manifest.json"), &(json + "\n"))?;
    Ok(outputs)
}

pub fn manifest_path(out_dir: &Path) -> PathBuf {
    out_dir.join("manifest.json")
}
