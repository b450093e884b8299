//! Beam-level velocity selection: photon-averaged transmissions and the final
//! velocity distribution of the transmitted beam.

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::interp::Pchip;
use crate::params::SystemParams;
use crate::pump::{
    mean_p_em_with, resonance_spacing, stationary_distribution, EmissionKernel, PhotonDistribution, PumpParams,
    QuadratureOptions,
};
use crate::scattering::scatter;
use crate::ultracold::{resonance_indices_below, resonance_positions};

/// Photon numbers with probability at or below this are skipped.
pub const POPULATED: f64 = 1e-12;

/// Probability density over `k / kappa` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityDistribution {
    grid: Vec<f64>,
    density: Vec<f64>,
}

impl VelocityDistribution {
    pub fn new(grid: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if grid.len() != density.len() || grid.len() < 2 {
            return domain("velocity distribution needs at least two points and equal lengths");
        }
        if !(grid[0] >= 0.0) || grid.windows(2).any(|w| !(w[1] > w[0])) || !grid[grid.len() - 1].is_finite() {
            return domain("velocity grid must be nonnegative, finite and strictly increasing");
        }
        if density.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return domain("velocity density must be nonnegative and finite");
        }
        Ok(VelocityDistribution { grid, density })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }

    /// Monotone cubic interpolant of the density, zero off the grid.
    pub fn interpolant(&self) -> Pchip {
        Pchip::new(&self.grid, &self.density).expect("grid validated on construction")
    }

    /// Grid point of the largest density.
    pub fn argmax(&self) -> (f64, f64) {
        let i = self
            .density
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        (self.grid[i], self.density[i])
    }
}

/// `points` evenly spaced values covering `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (points - 1) as f64;
            (0..points).map(|i| if i + 1 == points { hi } else { lo + h * i as f64 }).collect()
        }
    }
}

/// Density proportional to `k^2 exp(-k^2 / k0^2)`, normalized on `grid`.
pub fn maxwell_boltzmann_initial(k0: f64, grid: &[f64]) -> Result<VelocityDistribution> {
    if !(k0 > 0.0) || !k0.is_finite() {
        return domain(format!("most probable wavenumber must be positive, got {k0}"));
    }
    let raw: Vec<f64> = grid.iter().map(|&k| k * k * (-(k / k0).powi(2)).exp()).collect();
    let unnormalized = VelocityDistribution::new(grid.to_vec(), raw)?;
    let total = unnormalized.integral();
    if !(total > 0.0) {
        return domain("Maxwell-Boltzmann density vanishes on the grid");
    }
    let density = unnormalized.density.iter().map(|d| d / total).collect();
    VelocityDistribution::new(grid.to_vec(), density)
}

/// Photon-averaged transmissions `(T_a, T_b)` at incident wavenumber `k`.
pub fn beam_transmissions(dist: &PhotonDistribution, k: f64, params_base: &SystemParams) -> Result<(f64, f64)> {
    let mut t_a = 0.0;
    let mut t_b = 0.0;
    for (n, &p) in dist.probabilities().iter().enumerate() {
        if p <= POPULATED {
            continue;
        }
        let r = scatter(k, &params_base.with_photon_number(n as u32)?)?;
        t_a += p * r.t_a;
        t_b += p * r.t_b;
    }
    Ok((t_a, t_b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionOptions {
    /// Multiply the remapped `|b>` term by `dk'/dk = k / k'`.
    pub jacobian: bool,
    /// Output points per resonance FWHM.
    pub points_per_width: usize,
    /// Half-extent of each refined window, in FWHM.
    pub window_widths: f64,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        SelectionOptions {
            jacobian: false,
            points_per_width: 20,
            window_widths: 5.0,
        }
    }
}

/// Output wavenumbers: the initial grid plus refined windows around every
/// resonance of every populated photon number, in both the direct and the
/// remapped `|b>` term.
pub fn output_grid(
    initial: &VelocityDistribution,
    dist: &PhotonDistribution,
    params_base: &SystemParams,
    options: &SelectionOptions,
) -> Result<Vec<f64>> {
    let grid = initial.grid();
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let delta = params_base.detuning_ratio();
    let k_prime_max = (hi * hi + delta).max(0.0).sqrt();
    let mut out = grid.to_vec();
    for (n, &p) in dist.probabilities().iter().enumerate() {
        if p <= POPULATED {
            continue;
        }
        let params = params_base.with_photon_number(n as u32)?;
        let range = resonance_indices_below(&params, hi.max(k_prime_max));
        if range.is_empty() {
            continue;
        }
        for peak in resonance_positions(&params, range)? {
            let spacing = resonance_spacing(peak.position, &params);
            let w = peak.width.unwrap_or(spacing).min(spacing);
            let direct = peak.position;
            let remapped = direct * direct - delta;
            let centres = [Some(direct), (remapped > 0.0).then(|| remapped.sqrt())];
            for c in centres.into_iter().flatten() {
                let per = options.points_per_width.max(1) as f64;
                let steps = (options.window_widths * per).ceil() as i64;
                for j in -steps..=steps {
                    let x = c + j as f64 * w / per;
                    if x > lo && x < hi {
                        out.push(x);
                    }
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1e-300));
    Ok(out)
}

/// Final velocity density
/// `P_f(k) = P_i(k) T_a(k) + P_i(k') T_b(k')` with `k'^2 = k^2 + delta/g`
/// when `k^2 > -delta/g`, else `P_i(k) T_a(k)`. Not renormalized.
pub fn final_distribution(
    initial: &VelocityDistribution,
    dist: &PhotonDistribution,
    params_base: &SystemParams,
    options: &SelectionOptions,
) -> Result<VelocityDistribution> {
    let grid = output_grid(initial, dist, params_base, options)?;
    let density = final_density_on(&grid, initial, dist, params_base, options)?;
    VelocityDistribution::new(grid, density)
}

/// The final density evaluated on a caller-chosen grid.
pub fn final_density_on(
    grid: &[f64],
    initial: &VelocityDistribution,
    dist: &PhotonDistribution,
    params_base: &SystemParams,
    options: &SelectionOptions,
) -> Result<Vec<f64>> {
    let p_i = initial.interpolant();
    let delta = params_base.detuning_ratio();
    grid.par_iter()
        .map(|&k| {
            if k <= 0.0 {
                return Ok(0.0);
            }
            let (t_a, t_b) = beam_transmissions(dist, k, params_base)?;
            let direct = p_i.eval(k) * t_a;
            if delta == 0.0 {
                return Ok(direct + p_i.eval(k) * t_b);
            }
            if k * k <= -delta {
                return Ok(direct);
            }
            let k_prime = (k * k + delta).sqrt();
            let weight = p_i.eval(k_prime);
            if weight == 0.0 {
                return Ok(direct);
            }
            let (_, t_b_prime) = beam_transmissions(dist, k_prime, params_base)?;
            let jac = if options.jacobian { k / k_prime } else { 1.0 };
            Ok(direct + weight * t_b_prime * jac)
        })
        .collect()
}

/// Everything produced by one velocity-selection run.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRun {
    pub mean_emission: Vec<f64>,
    pub stationary: PhotonDistribution,
    pub final_distribution: VelocityDistribution,
}

/// Beam-averaged emission, stationary photon field and final velocity
/// distribution for one detuning.
pub fn run_selection(
    initial: &VelocityDistribution,
    params_base: &SystemParams,
    pump: &PumpParams,
    kernel: EmissionKernel,
    quadrature: &QuadratureOptions,
    options: &SelectionOptions,
) -> Result<SelectionRun> {
    let stationary = stationary_distribution(pump, |n| mean_p_em_with(n, initial, params_base, kernel, quadrature))?;
    let mean_emission = (0..=stationary.truncation() as u32)
        .into_par_iter()
        .map(|n| mean_p_em_with(n, initial, params_base, kernel, quadrature))
        .collect::<Result<Vec<_>>>()?;
    let final_distribution = final_distribution(initial, &stationary, params_base, options)?;
    Ok(SelectionRun {
        mean_emission,
        stationary,
        final_distribution,
    })
}
