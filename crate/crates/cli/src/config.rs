//! Run configuration: presets, a TOML key-value file and command-line flags,
//! layered in that order.

use std::f64::consts::PI;
use std::path::Path;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    /// Sweep `k / kappa` at fixed detuning.
    K,
    /// Sweep `delta / g` at fixed `k / kappa`.
    Detuning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    /// Ultracold closed form for the emission probability.
    Ultracold,
    /// Exact transmitted `|b>` probability.
    ExactB,
    /// Exact `|b>` probability, transmitted plus reflected.
    ExactEmission,
}

impl From<Kernel> for mazer::pump::EmissionKernel {
    fn from(k: Kernel) -> Self {
        use mazer::pump::EmissionKernel as E;
        match k {
            Kernel::Ultracold => E::Ultracold,
            Kernel::ExactB => E::ExactTransmittedB,
            Kernel::ExactEmission => E::ExactEmission,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig1a,
    Fig1b,
    Fig2,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
}

/// Every configurable quantity. Unset fields fall back to per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Args)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    /// Detuning delta/g.
    #[arg(long, allow_hyphen_values = true)]
    pub detuning: Option<f64>,
    /// Several detunings, one output curve each (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub detunings: Option<Vec<f64>>,
    /// Interaction length kappa L.
    #[arg(long)]
    pub coupling_length: Option<f64>,
    /// Photon number n.
    #[arg(long)]
    pub photon_number: Option<u32>,
    /// Fixed k/kappa for detuning sweeps.
    #[arg(long)]
    pub k: Option<f64>,
    /// Sweep axis.
    #[arg(long, value_enum)]
    pub axis: Option<Axis>,
    /// Sweep start.
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    /// Sweep end.
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    /// Number of sweep points (0 gives an empty table).
    #[arg(long)]
    pub points: Option<usize>,
    /// Resonance index m.
    #[arg(long)]
    pub index: Option<u32>,
    /// Mean thermal photon number n_b.
    #[arg(long)]
    pub thermal_photons: Option<f64>,
    /// Pump ratio r/C.
    #[arg(long)]
    pub pump_ratio: Option<f64>,
    /// Initial photon-number truncation.
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Most probable k/kappa of the initial Maxwell-Boltzmann beam.
    #[arg(long)]
    pub k0: Option<f64>,
    /// Upper end of the velocity grid.
    #[arg(long)]
    pub grid_max: Option<f64>,
    /// Number of velocity grid points.
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Emission kernel used for the beam average.
    #[arg(long, value_enum)]
    pub kernel: Option<Kernel>,
    /// Multiply the remapped |b> term by dk'/dk.
    #[arg(long)]
    pub jacobian: Option<bool>,
    /// Random grid size for oracle-check.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random seed for oracle-check.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pass threshold for oracle-check.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Physical coupling g in Hz; adds Hz columns for detuning axes.
    #[arg(long)]
    pub g_hz: Option<f64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl RunConfig {
    /// `top` overrides `self` field by field. A single `detuning` in `top`
    /// replaces any list of detunings below it.
    pub fn overlay(mut self, top: &RunConfig) -> RunConfig {
        if top.detuning.is_some() && top.detunings.is_none() {
            self.detunings = None;
        }
        overlay!(
            self, top, detuning, detunings, coupling_length, photon_number, k, axis, from, to, points, index,
            thermal_photons, pump_ratio, truncation, k0, grid_max, grid_points, kernel, jacobian, samples, seed,
            tolerance, g_hz
        );
        self
    }

    pub fn from_toml(text: &str) -> Result<RunConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn preset(p: Preset) -> RunConfig {
        let fig4 = RunConfig {
            coupling_length: Some(200.0 * PI),
            photon_number: Some(0),
            thermal_photons: Some(0.2),
            pump_ratio: Some(100.0),
            k0: Some(0.05),
            grid_max: Some(0.2),
            grid_points: Some(4000),
            ..Default::default()
        };
        match p {
            Preset::Fig1a => RunConfig {
                detuning: Some(0.0),
                coupling_length: Some(1000.0 * PI),
                photon_number: Some(0),
                axis: Some(Axis::K),
                from: Some(1e-3),
                to: Some(0.1),
                points: Some(20_000),
                ..Default::default()
            },
            Preset::Fig1b => RunConfig {
                detunings: Some(vec![0.005, -0.005]),
                ..Self::preset(Preset::Fig1a)
            },
            Preset::Fig2 => RunConfig {
                coupling_length: Some(1000.0 * PI),
                photon_number: Some(0),
                index: Some(1001),
                axis: Some(Axis::Detuning),
                from: Some(-0.01),
                to: Some(0.01),
                points: Some(2001),
                ..Default::default()
            },
            Preset::Fig3a => RunConfig {
                k: Some(0.05),
                coupling_length: Some(1000.0),
                photon_number: Some(0),
                axis: Some(Axis::Detuning),
                from: Some(-0.1),
                to: Some(0.1),
                points: Some(20_001),
                ..Default::default()
            },
            Preset::Fig3b => RunConfig {
                from: Some(-1000.0),
                to: Some(10.0),
                points: Some(50_501),
                ..Self::preset(Preset::Fig3a)
            },
            Preset::Fig4a => RunConfig {
                detuning: Some(0.0),
                ..fig4
            },
            Preset::Fig4b => RunConfig {
                detunings: Some(vec![-0.002, 0.002, 0.005]),
                ..fig4
            },
        }
    }

    /// Detunings to evaluate: the list if present, else the single value, else 0.
    pub fn detuning_list(&self) -> Vec<f64> {
        match (&self.detunings, self.detuning) {
            (Some(v), _) => v.clone(),
            (None, Some(d)) => vec![d],
            (None, None) => vec![0.0],
        }
    }

    pub fn coupling_length_or_default(&self) -> f64 {
        self.coupling_length.unwrap_or(1000.0 * PI)
    }

    /// Evenly spaced sweep values; `points == 1` yields `from` only.
    pub fn sweep(&self, from: f64, to: f64, points: usize) -> Vec<f64> {
        let from = self.from.unwrap_or(from);
        let to = self.to.unwrap_or(to);
        mazer::selection::uniform_grid(from, to, self.points.unwrap_or(points))
    }

    pub fn validate_g_hz(&self) -> Result<Option<f64>, CliError> {
        match self.g_hz {
            Some(g) if !(g > 0.0 && g.is_finite()) => Err(CliError::Config(format!("g-hz must be positive, got {g}"))),
            g => Ok(g),
        }
    }
}
