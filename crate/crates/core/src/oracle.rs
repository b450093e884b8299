//! Brute-force coupled-channel solver for piecewise-constant cavity modes.
//!
//! In the `{|a,n>, |b,n+1>}` subspace the stationary equations read, in units
//! of kappa and g,
//!
//! ```text
//! psi_a'' = -k^2 psi_a + sqrt(n+1) u(z) psi_b
//! psi_b'' = -(k^2 - delta/g) psi_b + sqrt(n+1) u(z) psi_a
//! ```
//!
//! On a segment of constant `u` the 2x2 coupling matrix is diagonalized
//! numerically and each eigen-channel propagates as an exact exponential. All
//! interface conditions are assembled into one dense system whose unknowns are
//! amplitudes referenced to the edge they decay away from, so no coefficient
//! grows with the segment width.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::complex::{sqrt_upper, I};
use crate::error::{domain, MazerError, Result};
use crate::linalg;
use crate::params::SystemParams;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    /// Width in units of `1/kappa`.
    pub length: f64,
    /// Mode amplitude `u` on the segment, in `[0, 1]`.
    pub value: f64,
}

/// Piecewise-constant cavity mode profile `u(z)`, starting at `z = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeFunction {
    segments: Vec<Segment>,
}

impl ModeFunction {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return domain("mode function needs at least one segment");
        }
        for s in &segments {
            if !(s.length > 0.0) || !s.length.is_finite() {
                return domain(format!("segment length must be positive, got {}", s.length));
            }
            if !(0.0..=1.0).contains(&s.value) {
                return domain(format!("mode value must lie in [0, 1], got {}", s.value));
            }
        }
        Ok(ModeFunction { segments })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(length, value)| Segment { length, value })
                .collect(),
        )
    }

    /// `u = 1` over a cavity of length `kappa L`.
    pub fn mesa(coupling_length: f64) -> Result<Self> {
        Self::from_pairs(&[(coupling_length, 1.0)])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// The same profile traversed back to front.
    pub fn reversed(&self) -> Self {
        let mut segments = self.segments.clone();
        segments.reverse();
        ModeFunction { segments }
    }

    /// Each segment split into `2^level` equal pieces.
    pub fn refined(&self, level: u32) -> Self {
        let parts = 1usize << level;
        let segments = self
            .segments
            .iter()
            .flat_map(|s| {
                std::iter::repeat_n(
                    Segment {
                        length: s.length / parts as f64,
                        value: s.value,
                    },
                    parts,
                )
            })
            .collect();
        ModeFunction { segments }
    }
}

/// Reflection and transmission amplitudes into `|a,n>` and `|b,n+1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrixResult {
    pub r_a: Complex64,
    pub r_b: Complex64,
    pub t_a: Complex64,
    pub t_b: Complex64,
    /// `|r_a|^2 + |t_a|^2 + Re(k_b)/k (|r_b|^2 + |t_b|^2)`.
    pub flux_sum: f64,
    pub k: f64,
    pub k_b: Complex64,
    pub condition: f64,
}

impl SMatrixResult {
    fn b_flux(&self) -> f64 {
        self.k_b.re / self.k
    }

    pub fn transmission_a(&self) -> f64 {
        self.t_a.norm_sqr()
    }

    pub fn transmission_b(&self) -> f64 {
        self.b_flux() * self.t_b.norm_sqr()
    }

    pub fn transmission_total(&self) -> f64 {
        self.transmission_a() + self.transmission_b()
    }

    pub fn reflection_b(&self) -> f64 {
        self.b_flux() * self.r_b.norm_sqr()
    }

    /// Probability of leaving in `|b>`, transmitted or reflected.
    pub fn emission(&self) -> f64 {
        self.transmission_b() + self.reflection_b()
    }
}

/// Eigen-decomposition of the real symmetric matrix `[[0, w], [w, d]]` by a
/// single Jacobi rotation. Returns `(lambda, eigenvector)` pairs; with `w = 0`
/// the order follows the diagonal so channel 0 is `|a>` and channel 1 is `|b>`.
fn local_channels(w: f64, d: f64) -> [(f64, [f64; 2]); 2] {
    if w == 0.0 {
        return [(0.0, [1.0, 0.0]), (d, [0.0, 1.0])];
    }
    let zeta = d / (2.0 * w);
    let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    [(-t * w, [c, -s]), (d + t * w, [s, c])]
}

struct Region {
    /// Local wavenumbers of the two eigen-channels.
    q: [Complex64; 2],
    /// Eigenvectors in the `(a, b)` basis.
    v: [[f64; 2]; 2],
    width: f64,
}

impl Region {
    fn new(k: f64, coupling: f64, detuning: f64, width: f64) -> Self {
        let ch = local_channels(coupling, detuning);
        let q = [
            sqrt_upper(Complex64::new(k * k - ch[0].0, 0.0)),
            sqrt_upper(Complex64::new(k * k - ch[1].0, 0.0)),
        ];
        Region {
            q,
            v: [ch[0].1, ch[1].1],
            width,
        }
    }
}

/// Scatters an excited atom of wavenumber `k` off the mode profile. Only the
/// detuning and photon number are taken from `params`; the length comes from
/// the mode function.
pub fn solve(mode: &ModeFunction, k: f64, params: &SystemParams) -> Result<SMatrixResult> {
    if !(k > 0.0) || !k.is_finite() {
        return domain(format!("wavenumber must be positive and finite, got {k}"));
    }
    let detuning = params.detuning_ratio();
    let coupling = ((params.photon_number() + 1) as f64).sqrt();
    let free = Region::new(k, 0.0, detuning, 0.0);
    let inner: Vec<Region> = mode
        .segments
        .iter()
        .map(|s| Region::new(k, coupling * s.value, detuning, s.length))
        .collect();

    let q_ref = std::iter::once(&free)
        .chain(inner.iter())
        .flat_map(|r| r.q.iter().map(|q| q.norm()))
        .fold(k, f64::max);

    let nseg = inner.len();
    let n = 4 + 4 * nseg;
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let mut rhs = vec![ZERO; n];
    // Columns: [R_0, R_1] | per segment [A_0, B_0, A_1, B_1] | [T_0, T_1].
    let seg_col = |j: usize| 2 + 4 * j;
    let right_col = 2 + 4 * nseg;

    // Row block for interface i holds value rows (2) then slope rows (2), slope
    // rows divided by q_ref. Left-side contributions enter with +, right-side with -.
    for iface in 0..=nseg {
        let row = 4 * iface;
        let mut add = |col: usize, comp: usize, val: Complex64, slope: Complex64, sign: f64| {
            m[(row + comp, col)] += sign * val;
            m[(row + 2 + comp, col)] += sign * slope / q_ref;
        };

        // Region to the left of this interface.
        if iface == 0 {
            // Incoming e^{ikz} in |a> is the known source; reflected waves are unknowns.
            for ch in 0..2 {
                let q = free.q[ch];
                for comp in 0..2 {
                    let v = free.v[ch][comp];
                    add(ch, comp, Complex64::new(v, 0.0), -I * q * v, 1.0);
                }
            }
            // Known incoming wave moved to the right-hand side with a sign flip.
            rhs[row] -= ONE;
            rhs[row + 2] -= I * k / q_ref;
        } else {
            let r = &inner[iface - 1];
            let col = seg_col(iface - 1);
            for ch in 0..2 {
                let e = (I * r.q[ch] * r.width).exp();
                let iq = I * r.q[ch];
                for comp in 0..2 {
                    let v = r.v[ch][comp];
                    add(col + 2 * ch, comp, e * v, iq * e * v, 1.0);
                    add(col + 2 * ch + 1, comp, Complex64::new(v, 0.0), -iq * v, 1.0);
                }
            }
        }

        // Region to the right of this interface.
        if iface == nseg {
            for ch in 0..2 {
                let q = free.q[ch];
                for comp in 0..2 {
                    let v = free.v[ch][comp];
                    add(right_col + ch, comp, Complex64::new(v, 0.0), I * q * v, -1.0);
                }
            }
        } else {
            let r = &inner[iface];
            let col = seg_col(iface);
            for ch in 0..2 {
                let e = (I * r.q[ch] * r.width).exp();
                let iq = I * r.q[ch];
                for comp in 0..2 {
                    let v = r.v[ch][comp];
                    add(col + 2 * ch, comp, Complex64::new(v, 0.0), iq * v, -1.0);
                    add(col + 2 * ch + 1, comp, e * v, -iq * e * v, -1.0);
                }
            }
        }
    }

    let sol = linalg::solve(m, rhs).ok_or_else(|| MazerError::NumericalFailure {
        k,
        detuning,
        reason: format!(
            "coupled-channel boundary system ill-conditioned (n = {}, {} segments)",
            params.photon_number(),
            nseg
        ),
    })?;
    let (r_a, r_b) = (sol.x[0], sol.x[1]);
    let (t_a, t_b) = (sol.x[right_col], sol.x[right_col + 1]);
    let k_b = free.q[1];
    let bf = k_b.re / k;
    Ok(SMatrixResult {
        r_a,
        r_b,
        t_a,
        t_b,
        flux_sum: r_a.norm_sqr() + t_a.norm_sqr() + bf * (r_b.norm_sqr() + t_b.norm_sqr()),
        k,
        k_b,
        condition: sol.condition,
    })
}

/// `|t_a|^2` after splitting every segment into `2^j` pieces, `j = 0..=refinements`.
pub fn convergence_check(
    mode: &ModeFunction,
    k: f64,
    params: &SystemParams,
    refinements: u32,
) -> Result<Vec<f64>> {
    if refinements < 1 {
        return domain("at least one refinement level is required");
    }
    (0..=refinements)
        .map(|j| solve(&mode.refined(j), k, params).map(|r| r.transmission_a()))
        .collect()
}
