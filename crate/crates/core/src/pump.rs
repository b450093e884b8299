//! Micromaser photon statistics: single-atom emission, beam-averaged
//! emission and the stationary photon distribution.

use std::cell::RefCell;

use rayon::prelude::*;

use crate::error::{domain, MazerError, Result};
use crate::params::{channel_wavenumbers, SystemParams};
use crate::quadrature;
use crate::scattering::{emission_probability, scatter};
use crate::selection::VelocityDistribution;
use crate::ultracold::{overlap_factor, resonance_indices_below, resonance_positions};

/// Default photon-number truncation.
pub const DEFAULT_TRUNCATION: usize = 64;
/// Largest truncation tried before the distribution is declared divergent.
pub const MAX_TRUNCATION: usize = 1 << 16;
/// Required upper bound on the last retained probability.
pub const TAIL_TOLERANCE: f64 = 1e-12;
const NEGATIVE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpParams {
    pub thermal_photons: f64,
    /// Injection rate over cavity loss rate, `r / C`.
    pub pump_ratio: f64,
    pub truncation: usize,
}

impl PumpParams {
    pub fn new(thermal_photons: f64, pump_ratio: f64, truncation: usize) -> Result<Self> {
        if !(thermal_photons >= 0.0) || !thermal_photons.is_finite() {
            return domain(format!("thermal photon number must be >= 0, got {thermal_photons}"));
        }
        if !(pump_ratio >= 0.0) || !pump_ratio.is_finite() {
            return domain(format!("pump ratio must be >= 0, got {pump_ratio}"));
        }
        if truncation < 1 {
            return domain("truncation must be >= 1");
        }
        Ok(PumpParams {
            thermal_photons,
            pump_ratio,
            truncation,
        })
    }
}

/// Probabilities of `n = 0..=N_max` photons.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    probabilities: Vec<f64>,
}

impl PhotonDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return domain("photon distribution is empty");
        }
        if probabilities.iter().any(|p| !(*p >= 0.0)) {
            return domain("photon probabilities must be nonnegative");
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return domain(format!("photon probabilities sum to {sum}"));
        }
        Ok(PhotonDistribution { probabilities })
    }

    /// The field in the vacuum state.
    pub fn vacuum() -> Self {
        PhotonDistribution {
            probabilities: vec![1.0],
        }
    }

    /// Fock state `|n>`.
    pub fn fock(n: usize) -> Self {
        let mut probabilities = vec![0.0; n + 1];
        probabilities[n] = 1.0;
        PhotonDistribution { probabilities }
    }

    /// Thermal distribution with mean `n_b`, truncated at `n_max` and renormalized.
    pub fn thermal(n_b: f64, n_max: usize) -> Result<Self> {
        let pump = PumpParams::new(n_b, 0.0, n_max.max(1))?;
        let p = stationary_distribution(&pump, |_| Ok(0.0))?;
        Ok(p)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn truncation(&self) -> usize {
        self.probabilities.len() - 1
    }

    pub fn get(&self, n: usize) -> f64 {
        self.probabilities.get(n).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.probabilities.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }
}

/// Ultracold induced-emission probability of one atom crossing a field of
/// `params.photon_number()` photons:
/// `(k_b/k) I(L)/2 [1 + (cot/2) sin(2 a)] / [1 + (kappa_n/2k)^2 cot sin^2 a]`
/// with `a = kappa_n sqrt(cot theta) L`.
pub fn p_em_ultracold(k: f64, params: &SystemParams) -> Result<f64> {
    let w = channel_wavenumbers(k, params)?;
    if !w.b_channel_open {
        return Ok(0.0);
    }
    let cot = params.cot_theta();
    let a = params.lower_depth().sqrt() * params.coupling_length();
    let num = 1.0 + 0.5 * cot * (2.0 * a).sin();
    let den = 1.0 + params.lower_depth() / (4.0 * k * k) * a.sin().powi(2);
    let v = w.b_flux_factor() * 0.5 * overlap_factor(k, params)? * num / den;
    if v < -NEGATIVE_SLACK {
        return Err(MazerError::NumericalFailure {
            k,
            detuning: params.detuning_ratio(),
            reason: format!("ultracold emission formula is negative ({v}) at cot theta = {cot}"),
        });
    }
    Ok(v.max(0.0))
}

/// Single-atom emission probability used inside the beam average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmissionKernel {
    /// The ultracold closed form of [`p_em_ultracold`].
    #[default]
    Ultracold,
    /// Exact transmitted flux in `|b>` only.
    ExactTransmittedB,
    /// Exact flux leaving in `|b>`, transmitted plus reflected.
    ExactEmission,
}

impl EmissionKernel {
    pub fn eval(self, k: f64, params: &SystemParams) -> Result<f64> {
        match self {
            EmissionKernel::Ultracold => p_em_ultracold(k, params),
            EmissionKernel::ExactTransmittedB => Ok(scatter(k, params)?.t_b),
            EmissionKernel::ExactEmission => emission_probability(k, params),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    /// Uniform panels laid over the support before breakpoints are added.
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            abs_tol: 1e-8,
            initial_panels: 32,
            max_panels: 200_000,
        }
    }
}

impl QuadratureOptions {
    /// Twice as many starting panels and half the tolerance.
    pub fn doubled(&self) -> Self {
        QuadratureOptions {
            abs_tol: 0.5 * self.abs_tol,
            initial_panels: 2 * self.initial_panels,
            max_panels: 2 * self.max_panels,
        }
    }
}

/// Breakpoints around every resonance of `params` inside `[lo, hi]`, plus the
/// `|b>` threshold.
pub fn resonance_breakpoints(params: &SystemParams, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let mut cuts = Vec::new();
    if params.detuning_ratio() > 0.0 {
        cuts.push(params.detuning_ratio().sqrt());
    }
    let range = resonance_indices_below(params, hi);
    if range.is_empty() {
        return Ok(cuts);
    }
    for peak in resonance_positions(params, range)? {
        let spacing = resonance_spacing(peak.position, params);
        let w = peak.width.unwrap_or(spacing).min(spacing);
        for s in [-10.0, -3.0, -1.0, -0.3, 0.0, 0.3, 1.0, 3.0, 10.0] {
            let x = peak.position + s * w;
            if x > lo && x < hi {
                cuts.push(x);
            }
        }
    }
    Ok(cuts)
}

/// Distance in `k` between neighbouring resonances near `k`.
pub(crate) fn resonance_spacing(k: f64, params: &SystemParams) -> f64 {
    let k_minus = (k * k + params.lower_depth()).sqrt();
    std::f64::consts::PI * k_minus / (params.coupling_length() * k)
}

/// Beam-averaged emission probability `int P_em(n, k) P_i(k) dk` for `n` photons.
pub fn mean_p_em(n: u32, initial: &VelocityDistribution, params_base: &SystemParams) -> Result<f64> {
    mean_p_em_with(n, initial, params_base, EmissionKernel::default(), &QuadratureOptions::default())
}

pub fn mean_p_em_with(
    n: u32,
    initial: &VelocityDistribution,
    params_base: &SystemParams,
    kernel: EmissionKernel,
    options: &QuadratureOptions,
) -> Result<f64> {
    let total = initial.integral();
    if (total - 1.0).abs() > 1e-6 {
        return domain(format!("initial distribution integrates to {total}, not 1"));
    }
    let params = params_base.with_photon_number(n)?;
    let grid = initial.grid();
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let mut cuts = resonance_breakpoints(&params, lo, hi)?;
    let h = (hi - lo) / options.initial_panels.max(1) as f64;
    cuts.extend((1..options.initial_panels).map(|i| lo + h * i as f64));

    let density = initial.interpolant();
    let failure: RefCell<Option<MazerError>> = RefCell::new(None);
    let integrand = |k: f64| {
        let p = density.eval(k);
        if p == 0.0 || k <= 0.0 {
            return 0.0;
        }
        match kernel.eval(k, &params) {
            Ok(v) => v * p,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let r = quadrature::integrate(integrand, lo, hi, &cuts, options.abs_tol, options.max_panels);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !r.converged || !r.value.is_finite() {
        return Err(MazerError::NumericalFailure {
            k: f64::NAN,
            detuning: params.detuning_ratio(),
            reason: format!("beam average for n = {n} did not converge (error estimate {})", r.error),
        });
    }
    Ok(r.value.clamp(0.0, 1.0))
}

/// Stationary photon distribution
/// `P(n) = P(0) prod_{m=1}^{n} [n_b + (r/C) mean_em(m-1) / m] / (n_b + 1)`,
/// built in log space and extended until `P(N_max) < 1e-12`.
pub fn stationary_distribution<F>(pump: &PumpParams, mean_em: F) -> Result<PhotonDistribution>
where
    F: Fn(u32) -> Result<f64> + Sync,
{
    let mut emission: Vec<f64> = Vec::new();
    let mut n_max = pump.truncation;
    let log_norm = (pump.thermal_photons + 1.0).ln();
    loop {
        let start = emission.len() as u32;
        let fresh: Result<Vec<f64>> = (start..n_max as u32).into_par_iter().map(&mean_em).collect();
        for (m, v) in (start..).zip(fresh?) {
            if !(-NEGATIVE_SLACK..=1.0 + NEGATIVE_SLACK).contains(&v) {
                return Err(MazerError::Configuration(format!(
                    "mean emission probability for n = {m} is {v}, outside [0, 1]"
                )));
            }
            emission.push(v.clamp(0.0, 1.0));
        }

        let mut log_p = Vec::with_capacity(n_max + 1);
        log_p.push(0.0);
        for m in 1..=n_max {
            let gain = pump.thermal_photons + pump.pump_ratio * emission[m - 1] / m as f64;
            log_p.push(log_p[m - 1] + gain.ln() - log_norm);
        }
        let top = log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut p: Vec<f64> = log_p.iter().map(|l| (l - top).exp()).collect();
        let sum: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= sum);

        if p[n_max] < TAIL_TOLERANCE {
            let sum: f64 = p.iter().sum();
            p.iter_mut().for_each(|v| *v /= sum);
            return PhotonDistribution::new(p);
        }
        if n_max >= MAX_TRUNCATION {
            return Err(MazerError::Configuration(format!(
                "stationary distribution does not decay: P({n_max}) = {} with pump ratio {}",
                p[n_max], pump.pump_ratio
            )));
        }
        n_max *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::{maxwell_boltzmann_initial, uniform_grid, VelocityDistribution};
    use std::f64::consts::PI;

    #[test]
    fn thermal_limit() {
        let n_b = 0.2;
        for pump_ratio in [0.0, 100.0] {
            let pump = PumpParams::new(n_b, pump_ratio, 64).unwrap();
            let d = stationary_distribution(&pump, |_| Ok(0.0)).unwrap();
            assert_eq!(d.truncation(), 64);
            for (n, p) in d.probabilities().iter().enumerate() {
                let exact = (n_b / (1.0 + n_b)).powi(n as i32) / (1.0 + n_b);
                assert!((p - exact).abs() < 1e-14);
            }
            assert!((d.mean() - n_b).abs() < 1e-12);
        }
    }

    #[test]
    fn log_space_matches_direct_product() {
        let pump = PumpParams::new(0.5, 20.0, 50).unwrap();
        let em = |m: u32| Ok(0.3 + 0.2 * ((m as f64) * 0.7).sin());
        let d = stationary_distribution(&pump, em).unwrap();
        let mut direct = vec![1.0];
        for m in 1..=d.truncation() {
            let g = (0.5 + 20.0 * em(m as u32 - 1).unwrap() / m as f64) / 1.5;
            direct.push(direct[m - 1] * g);
        }
        let s: f64 = direct.iter().sum();
        for (a, b) in d.probabilities().iter().zip(&direct) {
            assert!((a - b / s).abs() < 1e-10);
        }
    }

    #[test]
    fn truncation_doubles_until_tail_small() {
        let pump = PumpParams::new(0.2, 100.0, 4).unwrap();
        let d = stationary_distribution(&pump, |_| Ok(0.5)).unwrap();
        assert!(d.truncation() > 50);
        assert!(*d.probabilities().last().unwrap() < TAIL_TOLERANCE);
        assert!((d.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn divergent_product_is_configuration_error() {
        let pump = PumpParams::new(5.0, 0.0, 64).unwrap();
        assert!(stationary_distribution(&pump, |_| Ok(0.0)).is_ok());
        let bad = PumpParams::new(1e3, 1e9, 64).unwrap();
        assert!(matches!(
            stationary_distribution(&bad, |_| Ok(1.0)),
            Err(MazerError::Configuration(_))
        ));
        assert!(matches!(
            stationary_distribution(&bad, |_| Ok(1.5)),
            Err(MazerError::Configuration(_))
        ));
    }

    #[test]
    fn invalid_pump_rejected() {
        assert!(PumpParams::new(-0.1, 1.0, 4).is_err());
        assert!(PumpParams::new(0.1, -1.0, 4).is_err());
        assert!(PumpParams::new(0.1, 1.0, 0).is_err());
        assert!(PhotonDistribution::new(vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn resonant_emission_formula() {
        let l = 200.0 * PI;
        let p = SystemParams::new(0.0, l, 0).unwrap();
        for &k in &[0.003, 0.01, 0.02] {
            let i = overlap_factor(k, &p).unwrap();
            let expect = 0.5 * i * (1.0 + 0.5 * (2.0 * l).sin()) / (1.0 + (0.5 / k).powi(2) * l.sin().powi(2));
            assert!((p_em_ultracold(k, &p).unwrap() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_exact_emission_when_phase_frozen() {
        // kL << 1: the k-dependence of k_- L is negligible.
        let p = SystemParams::new(0.0, 30.0, 0).unwrap();
        let mut k = 1e-4;
        while k < 0.01 {
            let exact = emission_probability(k, &p).unwrap();
            assert!((p_em_ultracold(k, &p).unwrap() - exact).abs() < 1e-6, "k={k}");
            k *= 1.01;
        }
    }

    #[test]
    fn closed_channel_emits_nothing() {
        let p = SystemParams::new(0.01, 200.0 * PI, 0).unwrap();
        assert_eq!(p_em_ultracold(0.05, &p).unwrap(), 0.0);
        assert!(p_em_ultracold(0.0, &p).is_err());
    }

    #[test]
    fn closed_channel_everywhere_gives_zero_mean() {
        let grid = uniform_grid(0.0, 0.09, 901);
        let init = maxwell_boltzmann_initial(0.03, &grid).unwrap();
        let p = SystemParams::new(0.01, 200.0 * PI, 0).unwrap();
        for kernel in [EmissionKernel::Ultracold, EmissionKernel::ExactEmission] {
            let v = mean_p_em_with(0, &init, &p, kernel, &QuadratureOptions::default()).unwrap();
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn narrow_initial_distribution_sifts() {
        let p = SystemParams::new(0.0, 200.0 * PI, 1).unwrap();
        let k_star = 0.03;
        let sigma = 1e-6;
        let grid = uniform_grid(k_star - 8.0 * sigma, k_star + 8.0 * sigma, 801);
        let dens: Vec<f64> = grid.iter().map(|k| (-(k - k_star).powi(2) / (2.0 * sigma * sigma)).exp()).collect();
        let raw = VelocityDistribution::new(grid.clone(), dens.clone()).unwrap();
        let s = raw.integral();
        let init = VelocityDistribution::new(grid, dens.iter().map(|d| d / s).collect()).unwrap();
        let v = mean_p_em(1, &init, &p).unwrap();
        let direct = p_em_ultracold(k_star, &p.with_photon_number(1).unwrap()).unwrap();
        assert!((v - direct).abs() < 1e-6, "{v} vs {direct}");
    }

    #[test]
    fn unnormalized_initial_rejected() {
        let grid = uniform_grid(0.0, 0.2, 101);
        let init = VelocityDistribution::new(grid.clone(), vec![1.0; 101]).unwrap();
        let p = SystemParams::new(0.0, 200.0 * PI, 0).unwrap();
        assert!(matches!(mean_p_em(0, &init, &p), Err(MazerError::Domain(_))));
    }
}
