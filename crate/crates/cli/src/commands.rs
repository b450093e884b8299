//! One function per subcommand, each producing a [`Table`].

use std::f64::consts::PI;

use rayon::prelude::*;

use mazer::peaks::find_peaks;
use mazer::pump::{mean_p_em_with, stationary_distribution, EmissionKernel, PumpParams, QuadratureOptions};
use mazer::scattering::scatter;
use mazer::selection::{maxwell_boltzmann_initial, run_selection, uniform_grid, SelectionOptions, VelocityDistribution};
use mazer::ultracold::{resonance_amplitude, resonance_indices_below, resonance_positions, transmission_ultracold};
use mazer::SystemParams;

use crate::check::{oracle_stats, random_grid};
use crate::config::{Axis, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

type Out = Result<Table, CliError>;

fn params_for(cfg: &RunConfig, detuning: f64, default_length: f64) -> Result<SystemParams, CliError> {
    Ok(SystemParams::new(
        detuning,
        cfg.coupling_length.unwrap_or(default_length),
        cfg.photon_number.unwrap_or(0),
    )?)
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

fn hz_columns(cols: &mut Vec<&'static str>, g_hz: Option<f64>, names: &[&'static str]) {
    if g_hz.is_some() {
        cols.extend_from_slice(names);
    }
}

/// Columns: `k, detuning, [detuning_hz], t_a, t_b, t_total, t_ultracold, ultracold_valid`.
pub fn transmission(cfg: &RunConfig) -> Out {
    let g_hz = cfg.validate_g_hz()?;
    let mut cols = vec!["k", "detuning"];
    hz_columns(&mut cols, g_hz, &["detuning_hz"]);
    cols.extend_from_slice(&["t_a", "t_b", "t_total", "t_ultracold", "ultracold_valid"]);

    let mut points: Vec<(f64, SystemParams)> = Vec::new();
    match cfg.axis.unwrap_or(Axis::K) {
        Axis::K => {
            let ks = cfg.sweep(1e-3, 0.1, 1001);
            for d in cfg.detuning_list() {
                let p = params_for(cfg, d, 1000.0 * PI)?;
                for &k in &ks {
                    points.push((positive("k", k)?, p));
                }
            }
        }
        Axis::Detuning => {
            let k = positive("k", cfg.k.unwrap_or(0.05))?;
            for d in cfg.sweep(-1.0, 1.0, 1001) {
                points.push((k, params_for(cfg, d, 1000.0 * PI)?));
            }
        }
    }
    let rows: Result<Vec<Vec<Cell>>, CliError> = points
        .par_iter()
        .map(|(k, p)| {
            let r = scatter(*k, p)?;
            let uc = transmission_ultracold(*k, p)?;
            let mut row: Vec<Cell> = vec![(*k).into(), p.detuning_ratio().into()];
            if let Some(g) = g_hz {
                row.push((p.detuning_ratio() * g).into());
            }
            row.extend([
                r.t_a.into(),
                r.t_b.into(),
                r.t_total.into(),
                uc.value.into(),
                uc.validity.holds().into(),
            ]);
            Ok(row)
        })
        .collect();
    Ok(Table { columns: cols, rows: rows? })
}

/// Along `k`: `detuning, m, k, amplitude, closed_form_amplitude, width, refined`.
/// Along the detuning: `k, detuning, amplitude, width, [detuning_hz, width_hz]`.
pub fn resonances(cfg: &RunConfig) -> Out {
    let g_hz = cfg.validate_g_hz()?;
    match cfg.axis.unwrap_or(Axis::K) {
        Axis::K => {
            let mut t = Table::new(vec![
                "detuning",
                "m",
                "k",
                "amplitude",
                "closed_form_amplitude",
                "width",
                "refined",
            ]);
            let lo = cfg.from.unwrap_or(0.0);
            let hi = positive("to", cfg.to.unwrap_or(0.1))?;
            for d in cfg.detuning_list() {
                let p = params_for(cfg, d, 1000.0 * PI)?;
                let range = resonance_indices_below(&p, hi);
                if range.is_empty() {
                    continue;
                }
                for pk in resonance_positions(&p, range)? {
                    if pk.position < lo || pk.position > hi {
                        continue;
                    }
                    t.push(vec![
                        d.into(),
                        pk.index.into(),
                        pk.position.into(),
                        pk.amplitude.into(),
                        resonance_amplitude(pk.position, &p)?.into(),
                        pk.width.into(),
                        pk.refined.into(),
                    ]);
                }
            }
            Ok(t)
        }
        Axis::Detuning => {
            let mut cols = vec!["k", "detuning", "amplitude", "width"];
            hz_columns(&mut cols, g_hz, &["detuning_hz", "width_hz"]);
            let mut t = Table::new(cols);
            let k = positive("k", cfg.k.unwrap_or(0.05))?;
            let lo = cfg.from.unwrap_or(-0.01);
            let hi = cfg.to.unwrap_or(0.01);
            let samples = cfg.points.unwrap_or(20_001);
            // Validate the endpoints before the scan.
            params_for(cfg, lo, 1000.0 * PI)?;
            params_for(cfg, hi, 1000.0 * PI)?;
            if samples < 3 || !(hi > lo) {
                return Ok(t);
            }
            let curve = |d: f64| {
                params_for(cfg, d, 1000.0 * PI)
                    .ok()
                    .and_then(|p| scatter(k, &p).ok())
                    .map_or(f64::NAN, |r| r.t_total)
            };
            for pk in find_peaks(curve, lo, hi, samples, 1e-12) {
                let mut row: Vec<Cell> = vec![k.into(), pk.position.into(), pk.value.into(), pk.fwhm.into()];
                if let Some(g) = g_hz {
                    row.push((pk.position * g).into());
                    row.push(pk.fwhm.map(|w| w * g).into());
                }
                t.push(row);
            }
            Ok(t)
        }
    }
}

/// Columns: `detuning, [detuning_hz], m, k, amplitude, ultracold_peak, closed`.
pub fn amplitude(cfg: &RunConfig) -> Out {
    let g_hz = cfg.validate_g_hz()?;
    let mut cols = vec!["detuning"];
    hz_columns(&mut cols, g_hz, &["detuning_hz"]);
    cols.extend_from_slice(&["m", "k", "amplitude", "ultracold_peak", "closed"]);
    let m = cfg.index.unwrap_or(1001);
    if m < 1 {
        return Err(CliError::Config("resonance index must be >= 1".into()));
    }
    let params: Vec<SystemParams> = cfg
        .sweep(-0.01, 0.01, 201)
        .into_iter()
        .map(|d| params_for(cfg, d, 1000.0 * PI))
        .collect::<Result<_, _>>()?;
    let rows: Result<Vec<Vec<Cell>>, CliError> = params
        .par_iter()
        .map(|p| {
            let d = p.detuning_ratio();
            let mut row: Vec<Cell> = vec![d.into()];
            if let Some(g) = g_hz {
                row.push((d * g).into());
            }
            row.push(m.into());
            match resonance_positions(p, m..=m)?.first() {
                Some(pk) => row.extend([
                    pk.position.into(),
                    resonance_amplitude(pk.position, p)?.into(),
                    pk.amplitude.into(),
                    (pk.position * pk.position <= d).into(),
                ]),
                None => row.extend([Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing]),
            }
            Ok(row)
        })
        .collect();
    Ok(Table { columns: cols, rows: rows? })
}

fn initial_beam(cfg: &RunConfig) -> Result<VelocityDistribution, CliError> {
    let k0 = positive("k0", cfg.k0.unwrap_or(0.05))?;
    let k_max = positive("grid-max", cfg.grid_max.unwrap_or(0.2))?;
    let n = cfg.grid_points.unwrap_or(4000);
    if n < 2 {
        return Err(CliError::Config("grid-points must be >= 2".into()));
    }
    Ok(maxwell_boltzmann_initial(k0, &uniform_grid(0.0, k_max, n))?)
}

fn pump_params(cfg: &RunConfig) -> Result<PumpParams, CliError> {
    Ok(PumpParams::new(
        cfg.thermal_photons.unwrap_or(0.2),
        cfg.pump_ratio.unwrap_or(100.0),
        cfg.truncation.unwrap_or(mazer::pump::DEFAULT_TRUNCATION),
    )?)
}

fn kernel(cfg: &RunConfig) -> EmissionKernel {
    cfg.kernel.map(Into::into).unwrap_or_default()
}

/// Columns: `detuning, n, mean_emission, probability`.
pub fn pump(cfg: &RunConfig) -> Out {
    let initial = initial_beam(cfg)?;
    let pump = pump_params(cfg)?;
    let kernel = kernel(cfg);
    let quad = QuadratureOptions::default();
    let mut t = Table::new(vec!["detuning", "n", "mean_emission", "probability"]);
    for d in cfg.detuning_list() {
        let p = params_for(cfg, d, 200.0 * PI)?;
        let em = |n: u32| mean_p_em_with(n, &initial, &p, kernel, &quad);
        let dist = stationary_distribution(&pump, em)?;
        let mean: Vec<f64> = (0..=dist.truncation() as u32)
            .into_par_iter()
            .map(em)
            .collect::<Result<_, _>>()?;
        for (n, (&prob, e)) in dist.probabilities().iter().zip(mean).enumerate() {
            t.push(vec![d.into(), n.into(), e.into(), prob.into()]);
        }
    }
    Ok(t)
}

/// Columns: `curve, detuning, k, density`; the initial beam first, then one
/// final curve per detuning.
pub fn select(cfg: &RunConfig) -> Out {
    let initial = initial_beam(cfg)?;
    let pump = pump_params(cfg)?;
    let options = SelectionOptions {
        jacobian: cfg.jacobian.unwrap_or(false),
        ..Default::default()
    };
    let params: Vec<SystemParams> = cfg
        .detuning_list()
        .into_iter()
        .map(|d| params_for(cfg, d, 200.0 * PI))
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(vec!["curve", "detuning", "k", "density"]);
    for (&k, &v) in initial.grid().iter().zip(initial.density()) {
        t.push(vec!["initial".into(), Cell::Missing, k.into(), v.into()]);
    }
    for p in &params {
        let run = run_selection(&initial, p, &pump, kernel(cfg), &QuadratureOptions::default(), &options)?;
        let f = &run.final_distribution;
        for (&k, &v) in f.grid().iter().zip(f.density()) {
            t.push(vec!["final".into(), p.detuning_ratio().into(), k.into(), v.into()]);
        }
    }
    Ok(t)
}

/// Columns: `samples, seed, max_delta_t_a, max_delta_t_b, max_flux_error,
/// fallbacks, tolerance, passed`. The second value is `passed`.
pub fn oracle_check(cfg: &RunConfig) -> Result<(Table, bool), CliError> {
    let samples = cfg.samples.unwrap_or(1000);
    let seed = cfg.seed.unwrap_or(7);
    let tol = positive("tolerance", cfg.tolerance.unwrap_or(1e-9))?;
    let s = oracle_stats(&random_grid(seed, samples))?;
    let passed = s.max_delta() < tol && s.max_flux_error < tol;
    let mut t = Table::new(vec![
        "samples",
        "seed",
        "max_delta_t_a",
        "max_delta_t_b",
        "max_flux_error",
        "fallbacks",
        "tolerance",
        "passed",
    ]);
    t.push(vec![
        samples.into(),
        Cell::Int(seed as i128),
        s.max_delta_t_a.into(),
        s.max_delta_t_b.into(),
        s.max_flux_error.into(),
        s.fallbacks.into(),
        tol.into(),
        passed.into(),
    ]);
    Ok((t, passed))
}
