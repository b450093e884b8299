//! Closed form versus coupled-channel oracle over a randomized grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use mazer::oracle::{self, ModeFunction};
use mazer::scattering::{scatter, Method};
use mazer::{Result, SystemParams};

/// One randomized grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub k: f64,
    pub detuning: f64,
    pub coupling_length: f64,
    pub photon_number: u32,
}

/// `k` log-uniform in `[1e-3, 1]`, `delta/g` uniform in `[-500, 10]`,
/// `n` uniform in `0..=3`, `kappa L` log-uniform in `[1e2, 1e4]`.
pub fn random_grid(seed: u64, samples: usize) -> Vec<GridPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| GridPoint {
            k: 10f64.powf(rng.gen_range(-3.0..=0.0)),
            detuning: rng.gen_range(-500.0..=10.0),
            coupling_length: 10f64.powf(rng.gen_range(2.0..=4.0)),
            photon_number: rng.gen_range(0..=3),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OracleStats {
    pub samples: usize,
    pub max_delta_t_a: f64,
    pub max_delta_t_b: f64,
    pub max_flux_error: f64,
    /// Points where the closed form fell back to boundary matching.
    pub fallbacks: usize,
}

impl OracleStats {
    pub fn max_delta(&self) -> f64 {
        self.max_delta_t_a.max(self.max_delta_t_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointComparison {
    pub delta_t_a: f64,
    pub delta_t_b: f64,
    pub flux_error: f64,
    pub fallback: bool,
}

pub fn compare(p: &GridPoint) -> Result<PointComparison> {
    let params = SystemParams::new(p.detuning, p.coupling_length, p.photon_number)?;
    let closed = scatter(p.k, &params)?;
    let mesa = ModeFunction::mesa(p.coupling_length)?;
    let o = oracle::solve(&mesa, p.k, &params)?;
    let flux_error = if o.k_b.im == 0.0 {
        (o.flux_sum - 1.0).abs()
    } else {
        (o.r_a.norm_sqr() + o.t_a.norm_sqr() - 1.0).abs()
    };
    Ok(PointComparison {
        delta_t_a: (closed.t_a - o.transmission_a()).abs(),
        delta_t_b: (closed.t_b - o.transmission_b()).abs(),
        flux_error,
        fallback: closed.method != Method::ClosedForm,
    })
}

pub fn oracle_stats(points: &[GridPoint]) -> Result<OracleStats> {
    let cmp: Vec<PointComparison> = points.par_iter().map(compare).collect::<Result<_>>()?;
    Ok(cmp.iter().fold(
        OracleStats {
            samples: points.len(),
            ..Default::default()
        },
        |s, c| OracleStats {
            samples: s.samples,
            max_delta_t_a: s.max_delta_t_a.max(c.delta_t_a),
            max_delta_t_b: s.max_delta_t_b.max(c.delta_t_b),
            max_flux_error: s.max_flux_error.max(c.flux_error),
            fallbacks: s.fallbacks + c.fallback as usize,
        },
    ))
}
