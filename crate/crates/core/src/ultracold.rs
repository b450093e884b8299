//! Ultracold-regime transmission, the resonant limit, and the resonance catalog.
//!
//! For `k << kappa_n sqrt(tan theta)` and `exp(kappa_n L) >> 1` the upper dressed
//! state is totally reflected and the total transmission factorizes as
//! `f(theta) * I(L) * |tau_-(k)|^2`.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::params::{channel_wavenumbers, ChannelWavenumbers, SystemParams};
use crate::peaks;
use crate::scattering::resonance_denominator_scales;

/// Factor standing in for `<<` in `k << kappa_n sqrt(tan theta)`.
pub const ULTRACOLD_FACTOR: f64 = 0.1;
/// Lower bound standing in for `exp(kappa_n L) >> 1`.
pub const MIN_KAPPA_N_L: f64 = 20.0;
/// Relative position tolerance of numerically refined peaks.
pub const PEAK_REL_TOL: f64 = 1e-10;

/// Regime indicators; reported alongside ultracold results, never enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Validity {
    pub ultracold: bool,
    pub long_cavity: bool,
}

impl Validity {
    pub fn holds(&self) -> bool {
        self.ultracold && self.long_cavity
    }
}

pub fn validity(k: f64, params: &SystemParams) -> Validity {
    Validity {
        ultracold: k < ULTRACOLD_FACTOR * params.kappa_n() * params.tan_theta().sqrt(),
        long_cavity: params.kappa_n() * params.coupling_length() > MIN_KAPPA_N_L,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UltracoldTransmission {
    pub value: f64,
    pub validity: Validity,
}

/// Weight `f(theta)` of the lower dressed state in the transmitted flux.
pub fn dressed_weight(w: &ChannelWavenumbers, params: &SystemParams) -> f64 {
    let s2 = params.sin2_theta();
    if w.b_channel_open {
        s2 * (s2 + w.b_flux_factor() * params.cos2_theta())
    } else {
        s2 * s2
    }
}

/// The detuning factor `I(L) = 1/|D|^2` at incident wavenumber `k`.
pub fn overlap_factor(k: f64, params: &SystemParams) -> Result<f64> {
    let w = channel_wavenumbers(k, params)?;
    Ok(resonance_denominator_scales(k, params)?.overlap_factor(&w, params))
}

/// Exact single-channel `|tau_-(k)|^2 = 1 / (1 + (Sigma^2 - 1) sin^2(k_- L))`.
pub fn tau_minus_sq(k: f64, params: &SystemParams) -> Result<f64> {
    let w = channel_wavenumbers(k, params)?;
    let ratio = w.k_minus / k;
    let excess = 0.25 * (ratio - 1.0 / ratio).powi(2);
    Ok(1.0 / (1.0 + excess * (w.k_minus * params.coupling_length()).sin().powi(2)))
}

/// Leading ultracold form `1 / (1 + (kappa_n / 2k)^2 cot theta sin^2(k_- L))`.
pub fn tau_minus_sq_lorentzian(k: f64, params: &SystemParams) -> Result<f64> {
    let w = channel_wavenumbers(k, params)?;
    let a = params.coupling_strength() * params.cot_theta() / (4.0 * k * k);
    Ok(1.0 / (1.0 + a * (w.k_minus * params.coupling_length()).sin().powi(2)))
}

/// Ultracold total transmission `f(theta) I(L) |tau_-(k)|^2`.
pub fn transmission_ultracold(k: f64, params: &SystemParams) -> Result<UltracoldTransmission> {
    let w = channel_wavenumbers(k, params)?;
    let f = dressed_weight(&w, params);
    let i = resonance_denominator_scales(k, params)?.overlap_factor(&w, params);
    Ok(UltracoldTransmission {
        value: f * i * tau_minus_sq(k, params)?,
        validity: validity(k, params),
    })
}

/// Resonant (`delta = 0`) transmission `|tau_-(k)|^2 / 2`.
pub fn resonant_transmission(k: f64, coupling_length: f64, photon_number: u32) -> Result<f64> {
    let p = SystemParams::new(0.0, coupling_length, photon_number)?;
    Ok(0.5 * tau_minus_sq(k, &p)?)
}

/// `1/2 / (1 + (kappa_n / 2k)^2 sin^2(k_- L))`, the resonant limit in its
/// leading ultracold form.
pub fn resonant_transmission_lorentzian(k: f64, coupling_length: f64, photon_number: u32) -> Result<f64> {
    let p = SystemParams::new(0.0, coupling_length, photon_number)?;
    Ok(0.5 * tau_minus_sq_lorentzian(k, &p)?)
}

/// Wavenumber at which `k_- L = m pi`, if real.
pub fn resonance_position(m: u32, params: &SystemParams) -> Option<f64> {
    let q = m as f64 * PI / params.coupling_length();
    let radicand = q * q - params.lower_depth();
    (radicand > 0.0).then(|| radicand.sqrt())
}

/// de Broglie wavelength `2 pi / k_-` inside the cavity.
pub fn de_broglie_wavelength(k: f64, params: &SystemParams) -> Result<f64> {
    Ok(2.0 * PI / channel_wavenumbers(k, params)?.k_minus)
}

/// One transmission resonance in `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePeak {
    pub index: u32,
    /// `k / kappa` of the maximum.
    pub position: f64,
    /// Ultracold transmission at the maximum.
    pub amplitude: f64,
    /// FWHM in `k / kappa`; `None` when the transmission never falls to half
    /// the amplitude between neighbouring resonances.
    pub width: Option<f64>,
    /// Position found by numerical maximization rather than `k_- L = m pi`.
    pub refined: bool,
}

fn catalog_entry(m: u32, params: &SystemParams) -> Result<Option<ResonancePeak>> {
    let Some(seed) = resonance_position(m, params) else {
        return Ok(None);
    };
    // Half of the spacing to the neighbours on each side.
    let right = resonance_position(m + 1, params).map(|x| 0.5 * (x - seed));
    let left = (m > 1)
        .then(|| resonance_position(m - 1, params))
        .flatten()
        .map(|x| 0.5 * (seed - x));
    let half_right = right.unwrap_or(seed);
    let lo = (seed - left.unwrap_or(half_right)).max(seed * 1e-6);
    let hi = seed + half_right;

    let t = |k: f64| {
        transmission_ultracold(k, params)
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    };
    let closed = seed * seed <= params.detuning_ratio();
    let position = if closed {
        peaks::golden_max(t, lo, hi, PEAK_REL_TOL, 0.0).0
    } else {
        seed
    };
    let amplitude = t(position);
    let half = 0.5 * amplitude;
    let tol = (hi - lo) * 1e-10;
    let l = peaks::crossing(t, position, lo, half, 400, tol);
    let r = peaks::crossing(t, position, hi, half, 400, tol);
    Ok(Some(ResonancePeak {
        index: m,
        position,
        amplitude,
        width: l.zip(r).map(|(a, b)| b - a),
        refined: closed,
    }))
}

/// Catalog of transmission resonances with index in `m_range`. Indices whose
/// position is not real are skipped; an empty catalog is not an error.
pub fn resonance_positions(params: &SystemParams, m_range: RangeInclusive<u32>) -> Result<Vec<ResonancePeak>> {
    if *m_range.start() < 1 {
        return domain("resonance indices start at 1");
    }
    let found: Result<Vec<Option<ResonancePeak>>> =
        m_range.into_par_iter().map(|m| catalog_entry(m, params)).collect();
    Ok(found?.into_iter().flatten().collect())
}

/// Indices of all resonances with position in `(0, k_max]`.
pub fn resonance_indices_below(params: &SystemParams, k_max: f64) -> RangeInclusive<u32> {
    let l = params.coupling_length();
    let depth = params.lower_depth();
    let mut first = ((l * depth.sqrt() / PI).floor() as u32).max(1);
    while resonance_position(first, params).is_none() {
        first += 1;
    }
    let last = (l * (k_max * k_max + depth).sqrt() / PI).floor() as u32;
    first..=last
}

/// Closed-form resonance amplitude at a resonance located at `peak_position`:
/// `4 f(theta) / (1 + k_b/k)^2` when `|b>` is open, else 1.
pub fn resonance_amplitude(peak_position: f64, params: &SystemParams) -> Result<f64> {
    let w = channel_wavenumbers(peak_position, params)?;
    if !w.b_channel_open {
        return Ok(1.0);
    }
    let r = w.b_flux_factor();
    Ok(4.0 * dressed_weight(&w, params) / (1.0 + r).powi(2))
}

/// Negative detuning `-(n+1) (kappa/k)^2` at which the atom stops being cold.
pub fn hot_cold_boundary(k: f64, photon_number: u32) -> Result<f64> {
    if !(k > 0.0) || !k.is_finite() {
        return domain(format!("wavenumber must be positive and finite, got {k}"));
    }
    Ok(-((photon_number + 1) as f64) / (k * k))
}
