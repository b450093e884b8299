//! Exact transmission of an excited atom through a mesa-mode cavity.
//!
//! The closed form expresses the amplitudes through single-channel dressed
//! transmissions `tau_+-` and the two scales `k_c`, `k_t` entering a shared
//! denominator. Evanescent trigonometry is evaluated with scaled exponentials
//! and the `cot`/`tan` factors of `k_c`, `k_t` are cleared, so no pole is ever
//! formed. When the cleared expressions still degenerate, a direct
//! boundary-matching solve in the dressed basis gives the same amplitudes.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::complex::{ScaledTrig, I};
use crate::error::{domain, MazerError, Result};
use crate::linalg;
use crate::params::{channel_wavenumbers, ChannelWavenumbers, SystemParams};

/// `|Im k_+| L` beyond which `tau_+` is taken to be exactly zero.
pub const EVANESCENT_CUTOFF: f64 = 700.0;

/// Relative size below which a cleared denominator is treated as vanishing.
const CLEARED_EPS: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Upper (`+`) or lower (`-`) dressed state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dressed {
    Upper,
    Lower,
}

/// How a [`ScatteringResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    BoundaryMatching,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    /// Transmission amplitude into `|a, n>`.
    pub tau_a: Complex64,
    /// Transmission amplitude into `|b, n+1>`.
    pub tau_b: Complex64,
    pub t_a: f64,
    pub t_b: f64,
    pub t_total: f64,
    pub method: Method,
    /// Set exactly at `k^2 = delta/g`, where `k_b = 0`.
    pub at_b_threshold: bool,
}

/// Reciprocals of the two characteristic scales `k_c` and `k_t`.
///
/// The reciprocals are what enter the transmission denominator and are finite
/// wherever the cleared fractions are; `k_c`, `k_t` themselves may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenominatorScales {
    pub inv_kc: Complex64,
    pub inv_kt: Complex64,
}

impl DenominatorScales {
    pub fn kc(&self) -> Complex64 {
        ONE / self.inv_kc
    }

    pub fn kt(&self) -> Complex64 {
        ONE / self.inv_kt
    }

    /// The two factors `cos^2 theta (k - k_b)/k_x - 1` of the shared denominator.
    pub fn denominator_factors(&self, w: &ChannelWavenumbers, params: &SystemParams) -> (Complex64, Complex64) {
        let dk = (w.k - w.k_b) * params.cos2_theta();
        (dk * self.inv_kc - ONE, dk * self.inv_kt - ONE)
    }

    /// Shared denominator `D` of both transmission amplitudes.
    pub fn denominator(&self, w: &ChannelWavenumbers, params: &SystemParams) -> Complex64 {
        let (c, t) = self.denominator_factors(w, params);
        c * t
    }

    /// `1 / |D|^2`, the factor by which detuning modulates the transmission.
    pub fn overlap_factor(&self, w: &ChannelWavenumbers, params: &SystemParams) -> f64 {
        1.0 / self.denominator(w, params).norm_sqr()
    }
}

/// `(q/p + p/q) / 2`.
fn sigma(q: Complex64, p: Complex64) -> Complex64 {
    0.5 * (q / p + p / q)
}

/// `q/(k + k_b) + k_b k / ((k + k_b) q)`.
fn sigma_tilde(q: Complex64, k: f64, kb: Complex64) -> Complex64 {
    let s = kb + k;
    q / s + kb * k / (s * q)
}

/// Dressed wavenumbers and trigonometry of one energy, evaluated once.
struct DressedTrig {
    w: ChannelWavenumbers,
    /// `k_- L` (real).
    minus_full: (f64, f64),
    minus_half: (f64, f64),
    plus_full: ScaledTrig,
    plus_half: ScaledTrig,
}

impl DressedTrig {
    fn new(w: ChannelWavenumbers, l: f64) -> Self {
        let (s, c) = (w.k_minus * l).sin_cos();
        let (sh, ch) = (0.5 * w.k_minus * l).sin_cos();
        DressedTrig {
            w,
            minus_full: (c, s),
            minus_half: (ch, sh),
            plus_full: ScaledTrig::new(w.k_plus * l),
            plus_half: ScaledTrig::new(w.k_plus * (0.5 * l)),
        }
    }

    fn q(&self, which: Dressed) -> Complex64 {
        match which {
            Dressed::Upper => self.w.k_plus,
            Dressed::Lower => Complex64::new(self.w.k_minus, 0.0),
        }
    }

    /// `exp(-|Im q L|) (cos qL - i s sin qL)`, and the removed log-scale.
    fn scaled_inverse_tau(&self, which: Dressed, s: Complex64) -> (Complex64, f64) {
        match which {
            Dressed::Upper => (
                self.plus_full.cos - I * s * self.plus_full.sin,
                self.plus_full.log_scale,
            ),
            Dressed::Lower => {
                let (c, sn) = self.minus_full;
                (c - I * s * sn, 0.0)
            }
        }
    }

    /// `tau_+-` for outside wavenumber `p`; zero past the evanescent cutoff.
    fn tau(&self, which: Dressed, p: Complex64) -> Result<Complex64> {
        let q = self.q(which);
        if q == ZERO {
            return Err(MazerError::Degenerate {
                k: self.w.k,
                reason: "dressed wavenumber vanishes exactly".into(),
            });
        }
        let (inv, log_scale) = self.scaled_inverse_tau(which, sigma(q, p));
        if log_scale > EVANESCENT_CUTOFF {
            return Ok(ZERO);
        }
        Ok(Complex64::new((-log_scale).exp(), 0.0) / inv)
    }

    fn scales(&self) -> Result<DenominatorScales> {
        let k = self.w.k;
        let kb = self.w.k_b;
        let km = Complex64::new(self.w.k_minus, 0.0);
        let kp = self.w.k_plus;
        let (cm, sm) = self.minus_half;
        let (cp, sp) = (self.plus_half.cos, self.plus_half.sin);

        let num_c = cm * sp * km - cp * sm * kp;
        let den_c = (k * sm + I * cm * km) * (kb * sp + I * cp * kp);
        let num_t = sp * cm * kp - sm * cp * km;
        let den_t = (k * cm - I * sm * km) * (kb * cp - I * sp * kp);

        let scale_c = (k * sm).abs().max(km.norm() * cm.abs()) * (kb * sp).norm().max((cp * kp).norm());
        let scale_t = (k * cm).abs().max(km.norm() * sm.abs()) * (kb * cp).norm().max((sp * kp).norm());
        let deg = |num: Complex64, den: Complex64, scale: f64| {
            den.norm() <= CLEARED_EPS * scale && num.norm() <= CLEARED_EPS * (km.norm() + kp.norm())
        };
        if deg(num_c, den_c, scale_c) || deg(num_t, den_t, scale_t) {
            return Err(MazerError::Degenerate {
                k,
                reason: "cleared numerator and denominator of k_c/k_t vanish together".into(),
            });
        }
        Ok(DenominatorScales {
            inv_kc: -I * num_c / den_c,
            inv_kt: -I * num_t / den_t,
        })
    }
}

/// Single-channel dressed transmission `tau_+-` for outside wavenumber `k_eval`.
///
/// The dressed wavenumber inside the cavity is fixed by the incident energy
/// `k`; `k_eval` (usually `k` or `k_b`) only sets the outside wavenumber.
pub fn tau_pm(which: Dressed, k_eval: Complex64, k: f64, params: &SystemParams) -> Result<Complex64> {
    if k_eval == ZERO {
        return domain("outside wavenumber must be nonzero");
    }
    let w = channel_wavenumbers(k, params)?;
    DressedTrig::new(w, params.coupling_length()).tau(which, k_eval)
}

/// The characteristic scales `k_c`, `k_t` (as reciprocals) for incident wavenumber `k`.
pub fn resonance_denominator_scales(k: f64, params: &SystemParams) -> Result<DenominatorScales> {
    let w = channel_wavenumbers(k, params)?;
    DressedTrig::new(w, params.coupling_length()).scales()
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn closed_form(w: ChannelWavenumbers, params: &SystemParams) -> Result<(Complex64, Complex64)> {
    let trig = DressedTrig::new(w, params.coupling_length());
    let k = w.k;
    let kc = Complex64::new(k, 0.0);
    let kb = w.k_b;
    if kb == ZERO {
        return Err(MazerError::Degenerate {
            k,
            reason: "k_b = 0 at the |b> threshold".into(),
        });
    }
    let km = trig.q(Dressed::Lower);
    let kp = trig.q(Dressed::Upper);
    let sin2 = params.sin2_theta();
    let cos2 = params.cos2_theta();

    let tau_m_k = trig.tau(Dressed::Lower, kc)?;
    let tau_p_kb = trig.tau(Dressed::Upper, kb)?;
    let (inv_tau_m_kb, _) = trig.scaled_inverse_tau(Dressed::Lower, sigma(km, kb));
    let (inv_tilde_m, _) = trig.scaled_inverse_tau(Dressed::Lower, sigma_tilde(km, k, kb));
    // tau_+(k_b) / tilde tau_+(k, k_b): both evanescent scales cancel.
    let (inv_tilde_p, _) = trig.scaled_inverse_tau(Dressed::Upper, sigma_tilde(kp, k, kb));
    let (inv_tau_p_kb, _) = trig.scaled_inverse_tau(Dressed::Upper, sigma(kp, kb));
    let rho_p = inv_tilde_p / inv_tau_p_kb;

    let d = trig.scales()?.denominator(&w, params);
    if !finite(d) || d == ZERO {
        return Err(MazerError::Degenerate {
            k,
            reason: "shared denominator not finite".into(),
        });
    }

    let tau_a = tau_m_k * (cos2 * tau_p_kb * inv_tau_m_kb + sin2) / d;
    let tau_b = 0.25 * params.sin_2theta() * (ONE + kc / kb) * tau_m_k * (tau_p_kb * inv_tilde_m - rho_p) / d;
    if !finite(tau_a) || !finite(tau_b) {
        return Err(MazerError::Degenerate {
            k,
            reason: "non-finite closed-form amplitude".into(),
        });
    }
    Ok((tau_a, tau_b))
}

/// Reflection and transmission amplitudes from the direct boundary-matching solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryAmplitudes {
    pub r_a: Complex64,
    pub r_b: Complex64,
    pub t_a: Complex64,
    pub t_b: Complex64,
    pub condition: f64,
}

/// Solves the eight continuity conditions (value and slope of both internal
/// components at both cavity edges) for reflection, transmission, and the
/// four dressed amplitudes inside the cavity.
pub fn boundary_matching(k: f64, params: &SystemParams) -> Result<BoundaryAmplitudes> {
    let w = channel_wavenumbers(k, params)?;
    let l = params.coupling_length();
    let (st, ct) = params.theta().sin_cos();
    let kc = Complex64::new(k, 0.0);
    let kb = w.k_b;
    // Dressed eigenvectors in the (a, b) basis.
    let basis = [
        ([ct, st], w.k_plus),
        ([st, -ct], Complex64::new(w.k_minus, 0.0)),
    ];

    let mut m = DMatrix::<Complex64>::zeros(8, 8);
    let mut rhs = vec![ZERO; 8];
    // Unknowns: r_a, r_b, A+, B+, A-, B-, t_a, t_b. Inside the cavity each dressed
    // component is A e^{iqz} + B e^{-iq(z-L)}, bounded for Im q >= 0.
    for (j, (v, q)) in basis.iter().enumerate() {
        let e = (I * q * l).exp();
        let (ca, cb) = (2 + 2 * j, 3 + 2 * j);
        for comp in 0..2 {
            let vv = Complex64::new(v[comp], 0.0);
            // z = 0: value rows 0,1; slope rows 2,3.
            m[(comp, ca)] = vv;
            m[(comp, cb)] = vv * e;
            m[(2 + comp, ca)] = vv * I * q;
            m[(2 + comp, cb)] = -vv * I * q * e;
            // z = L: value rows 4,5; slope rows 6,7.
            m[(4 + comp, ca)] = vv * e;
            m[(4 + comp, cb)] = vv;
            m[(6 + comp, ca)] = vv * I * q * e;
            m[(6 + comp, cb)] = -vv * I * q;
        }
    }
    // Left: psi_a = e^{ikz} + r_a e^{-ikz}, psi_b = r_b e^{-i k_b z}.
    m[(0, 0)] = -ONE;
    m[(1, 1)] = -ONE;
    m[(2, 0)] = I * kc;
    m[(3, 1)] = I * kb;
    rhs[0] = ONE;
    rhs[2] = I * kc;
    // Right: psi_a = t_a e^{ik(z-L)}, psi_b = t_b e^{i k_b (z-L)}.
    m[(4, 6)] = -ONE;
    m[(5, 7)] = -ONE;
    m[(6, 6)] = -I * kc;
    m[(7, 7)] = -I * kb;

    let sol = linalg::solve(m, rhs).ok_or_else(|| MazerError::NumericalFailure {
        k,
        detuning: params.detuning_ratio(),
        reason: "boundary-matching system singular or ill-conditioned".into(),
    })?;
    Ok(BoundaryAmplitudes {
        r_a: sol.x[0],
        r_b: sol.x[1],
        t_a: sol.x[6],
        t_b: sol.x[7],
        condition: sol.condition,
    })
}

fn probabilities(
    tau_a: Complex64,
    tau_b: Complex64,
    w: &ChannelWavenumbers,
    method: Method,
) -> ScatteringResult {
    let t_a = tau_a.norm_sqr();
    let t_b = if w.b_channel_open {
        w.b_flux_factor() * tau_b.norm_sqr()
    } else {
        0.0
    };
    ScatteringResult {
        tau_a,
        tau_b,
        t_a,
        t_b,
        t_total: t_a + t_b,
        method,
        at_b_threshold: w.at_b_threshold(),
    }
}

/// Transmission probabilities of an excited atom with wavenumber `k` (units of kappa).
pub fn scatter(k: f64, params: &SystemParams) -> Result<ScatteringResult> {
    let w = channel_wavenumbers(k, params)?;
    match closed_form(w, params) {
        Ok((tau_a, tau_b)) => Ok(probabilities(tau_a, tau_b, &w, Method::ClosedForm)),
        Err(MazerError::Degenerate { .. }) => {
            let b = boundary_matching(k, params)?;
            Ok(probabilities(b.t_a, b.t_b, &w, Method::BoundaryMatching))
        }
        Err(e) => Err(e),
    }
}

/// Probability that the atom leaves in `|b>` in either direction, i.e. that a
/// photon was emitted into the cavity.
pub fn emission_probability(k: f64, params: &SystemParams) -> Result<f64> {
    let w = channel_wavenumbers(k, params)?;
    if !w.b_channel_open {
        return Ok(0.0);
    }
    let b = boundary_matching(k, params)?;
    Ok(w.b_flux_factor() * (b.t_b.norm_sqr() + b.r_b.norm_sqr()))
}
