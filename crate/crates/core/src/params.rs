//! Dimensionless problem definition and dressed-state geometry.
//!
//! Wavenumbers are measured in units of `kappa = sqrt(2 m g / hbar)`, the
//! detuning in units of the coupling `g`, and the cavity length as `kappa L`.
//! In these units `kappa_n^2 = sqrt(n + 1)` and `Omega_n / g = 2 sqrt(n + 1)`.

use num_complex::Complex64;

use crate::complex::{sqrt_upper_real, I};
use crate::error::{domain, Result};

/// Mixing angle of the dressed basis, `cot 2 theta = -(delta/g) / (Omega_n/g)`.
///
/// Returned in the open interval `(0, pi/2)`.
pub fn dressed_angle(detuning_ratio: f64, photon_number: i64) -> Result<f64> {
    if photon_number < 0 {
        return domain(format!("photon number must be >= 0, got {photon_number}"));
    }
    if !detuning_ratio.is_finite() {
        return domain("detuning must be finite");
    }
    let rabi = 2.0 * ((photon_number + 1) as f64).sqrt();
    // 2 theta = atan2(Omega, -delta) lies in (0, pi) since Omega > 0.
    Ok(0.5 * rabi.atan2(-detuning_ratio))
}

/// Validated `(delta/g, kappa L, n)` triple together with the derived dressed quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    detuning_ratio: f64,
    coupling_length: f64,
    photon_number: u32,
    theta: f64,
    /// `kappa_n^2 tan theta` (upper dressed level, in units of kappa^2).
    upper_shift: f64,
    /// `kappa_n^2 cot theta` (depth of the lower dressed level).
    lower_depth: f64,
}

impl SystemParams {
    pub fn new(detuning_ratio: f64, coupling_length: f64, photon_number: u32) -> Result<Self> {
        if !(coupling_length > 0.0) || !coupling_length.is_finite() {
            return domain(format!("kappa L must be positive and finite, got {coupling_length}"));
        }
        let theta = dressed_angle(detuning_ratio, photon_number as i64)?;
        let c = ((photon_number + 1) as f64).sqrt();
        // Eigenvalues of [[0, c], [c, delta]]: delta/2 +- s. Take the root free of
        // cancellation first and recover the other one from the product -c^2.
        let half = 0.5 * detuning_ratio;
        let s = half.hypot(c);
        let (upper_shift, lower_depth) = if detuning_ratio >= 0.0 {
            let up = half + s;
            (up, c * c / up)
        } else {
            let low = s - half;
            (c * c / low, low)
        };
        Ok(SystemParams {
            detuning_ratio,
            coupling_length,
            photon_number,
            theta,
            upper_shift,
            lower_depth,
        })
    }

    /// Same cavity and detuning, different photon number.
    pub fn with_photon_number(&self, n: u32) -> Result<Self> {
        Self::new(self.detuning_ratio, self.coupling_length, n)
    }

    pub fn with_detuning(&self, detuning_ratio: f64) -> Result<Self> {
        Self::new(detuning_ratio, self.coupling_length, self.photon_number)
    }

    pub fn with_coupling_length(&self, coupling_length: f64) -> Result<Self> {
        Self::new(self.detuning_ratio, coupling_length, self.photon_number)
    }

    pub fn detuning_ratio(&self) -> f64 {
        self.detuning_ratio
    }

    pub fn coupling_length(&self) -> f64 {
        self.coupling_length
    }

    pub fn photon_number(&self) -> u32 {
        self.photon_number
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `Omega_n / g = 2 sqrt(n + 1)`.
    pub fn rabi_ratio(&self) -> f64 {
        2.0 * self.coupling_strength()
    }

    /// `sqrt(n + 1)`, which equals `kappa_n^2` in units of `kappa^2`.
    pub fn coupling_strength(&self) -> f64 {
        ((self.photon_number + 1) as f64).sqrt()
    }

    /// `kappa_n / kappa = (n + 1)^(1/4)`.
    pub fn kappa_n(&self) -> f64 {
        self.coupling_strength().sqrt()
    }

    pub fn tan_theta(&self) -> f64 {
        self.upper_shift / self.coupling_strength()
    }

    pub fn cot_theta(&self) -> f64 {
        self.lower_depth / self.coupling_strength()
    }

    pub fn sin2_theta(&self) -> f64 {
        self.upper_shift / (self.upper_shift + self.lower_depth)
    }

    pub fn cos2_theta(&self) -> f64 {
        self.lower_depth / (self.upper_shift + self.lower_depth)
    }

    /// `sin 2 theta`.
    pub fn sin_2theta(&self) -> f64 {
        2.0 * self.coupling_strength() / (self.upper_shift + self.lower_depth)
    }

    /// `kappa_n^2 tan theta`, the barrier seen by the upper dressed state.
    pub fn upper_shift(&self) -> f64 {
        self.upper_shift
    }

    /// `kappa_n^2 cot theta`, the well depth seen by the lower dressed state.
    pub fn lower_depth(&self) -> f64 {
        self.lower_depth
    }

    /// Whether an atom of wavenumber `k` may leave in `|b>`: `k^2 > delta/g`.
    pub fn b_channel_open(&self, k: f64) -> bool {
        k * k > self.detuning_ratio
    }
}

/// The four wavenumbers of one scattering energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelWavenumbers {
    pub k: f64,
    /// Lower-state outgoing wavenumber, `k_b^2 = k^2 - delta/g`.
    pub k_b: Complex64,
    /// Upper dressed wavenumber inside the cavity, `k_+^2 = k^2 - kappa_n^2 tan theta`.
    pub k_plus: Complex64,
    /// Lower dressed wavenumber inside the cavity, `k_-^2 = k^2 + kappa_n^2 cot theta`.
    pub k_minus: f64,
    pub b_channel_open: bool,
}

pub fn channel_wavenumbers(k: f64, params: &SystemParams) -> Result<ChannelWavenumbers> {
    if !(k > 0.0) || !k.is_finite() {
        return domain(format!("wavenumber must be positive and finite, got {k}"));
    }
    let k2 = k * k;
    let b_channel_open = params.b_channel_open(k);
    let k_b = if b_channel_open {
        Complex64::new((k2 - params.detuning_ratio).sqrt(), 0.0)
    } else {
        // Closed (or threshold) channel: purely imaginary, decaying.
        I * (params.detuning_ratio - k2).sqrt()
    };
    Ok(ChannelWavenumbers {
        k,
        k_b,
        k_plus: sqrt_upper_real(k2 - params.upper_shift),
        k_minus: (k2 + params.lower_depth).sqrt(),
        b_channel_open,
    })
}

impl ChannelWavenumbers {
    /// Flux factor `Re(k_b) / k` weighting the `|b>` channel.
    pub fn b_flux_factor(&self) -> f64 {
        self.k_b.re / self.k
    }

    /// True exactly at `k^2 = delta/g`, where `k_b = 0`.
    pub fn at_b_threshold(&self) -> bool {
        self.k_b == Complex64::new(0.0, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::MazerError;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn dressed_angle_examples() {
        for n in 0..5 {
            assert!((dressed_angle(0.0, n).unwrap() - PI / 4.0).abs() < 1e-15);
        }
        assert!((dressed_angle(2.0, 0).unwrap() - 3.0 * PI / 8.0).abs() < 1e-15);
        assert!((dressed_angle(1e6, 0).unwrap() - PI / 2.0).abs() < 1e-5);
        assert!(dressed_angle(-1e6, 0).unwrap() < 1e-5);
        assert!(matches!(dressed_angle(0.0, -1), Err(MazerError::Domain(_))));
    }

    #[test]
    fn wavenumber_examples() {
        let p = SystemParams::new(0.0, 1000.0 * PI, 0).unwrap();
        let w = channel_wavenumbers(0.05, &p).unwrap();
        assert!((w.k_b - Complex64::new(0.05, 0.0)).norm() < 1e-16);
        assert!((w.k_minus - 1.0025f64.sqrt()).abs() < 1e-15);
        assert!(w.b_channel_open);

        let p = SystemParams::new(0.02, 1000.0 * PI, 0).unwrap();
        let w = channel_wavenumbers(0.1, &p).unwrap();
        assert!((w.k_b - Complex64::new(0.0, 0.1)).norm() < 1e-15);
        assert!(!w.b_channel_open);

        let p = SystemParams::new(0.005, 1000.0 * PI, 0).unwrap();
        let w = channel_wavenumbers(0.05, &p).unwrap();
        assert!((w.k_b - Complex64::new(0.0, 0.05)).norm() < 1e-15);
        assert!(!w.b_channel_open);

        assert!(channel_wavenumbers(0.0, &p).is_err());
        assert!(channel_wavenumbers(-1.0, &p).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(SystemParams::new(0.0, 0.0, 0).is_err());
        assert!(SystemParams::new(0.0, -1.0, 0).is_err());
        assert!(SystemParams::new(f64::NAN, 1.0, 0).is_err());
    }

    #[test]
    fn derived_quantities_consistent_with_angle() {
        for &d in &[-1e3, -3.0, -0.01, 0.0, 0.5, 7.0, 1e4] {
            for n in 0..4 {
                let p = SystemParams::new(d, 10.0, n).unwrap();
                let t = p.theta();
                let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
                assert!(rel(p.tan_theta(), t.tan()) < 1e-9, "d={d} n={n}");
                assert!(rel(p.sin2_theta(), t.sin().powi(2)) < 1e-9);
                assert!(rel(p.cos2_theta(), t.cos().powi(2)) < 1e-9);
                assert!(rel(p.sin_2theta(), (2.0 * t).sin()) < 1e-9);
                assert!((p.sin2_theta() + p.cos2_theta() - 1.0).abs() < 1e-15);
                assert!(rel(p.kappa_n(), ((n + 1) as f64).powf(0.25)) < 1e-15);
                assert!(p.kappa_n() >= 1.0);
            }
        }
    }

    proptest! {
        #[test]
        fn angle_in_open_interval_and_identity(d in -1e3f64..1e3, n in 0i64..20) {
            let t = dressed_angle(d, n).unwrap();
            prop_assert!(t > 0.0 && t < FRAC_PI_2);
            let c = ((n + 1) as f64).sqrt();
            let resid = 1.0 / (2.0 * t).tan() + d / (2.0 * c);
            prop_assert!(resid.abs() < 1e-12 * (1.0 + d.abs()));
        }

        #[test]
        fn angle_strictly_increasing(d in -1e3f64..1e3, step in 1e-6f64..10.0, n in 0i64..10) {
            prop_assert!(dressed_angle(d, n).unwrap() < dressed_angle(d + step, n).unwrap());
        }

        #[test]
        fn wavenumbers_square_back(k in 1e-4f64..10.0, d in -1e3f64..1e3, n in 0u32..6) {
            let p = SystemParams::new(d, 100.0, n).unwrap();
            let w = channel_wavenumbers(k, &p).unwrap();
            let rel = |a: Complex64, b: f64| (a - b).norm() / b.abs().max(k * k);
            prop_assert!(rel(w.k_b * w.k_b, k * k - d) < 1e-12);
            prop_assert!(rel(w.k_plus * w.k_plus, k * k - p.coupling_strength() * p.tan_theta()) < 1e-12);
            prop_assert!((w.k_minus * w.k_minus - (k * k + p.coupling_strength() * p.cot_theta())).abs()
                < 1e-12 * (w.k_minus * w.k_minus));
            prop_assert!(w.k_minus >= k);
            prop_assert!(w.k_b.im >= 0.0 && w.k_plus.im >= 0.0);
            prop_assert_eq!(w.b_channel_open, w.k_b.im == 0.0 && w.k_b.re > 0.0);
        }
    }
}
