use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mazer::oracle::{self, ModeFunction};
use mazer::pump::{mean_p_em_with, stationary_distribution, EmissionKernel, PumpParams, QuadratureOptions};
use mazer::scattering::scatter;
use mazer::selection::{final_distribution, maxwell_boltzmann_initial, uniform_grid, SelectionOptions};
use mazer::ultracold::{resonance_amplitude, resonance_indices_below, resonance_positions};
use mazer::SystemParams;

#[test]
fn oracle_matches_closed_form_on_random_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let k = 10f64.powf(rng.gen_range(-3.0..0.0));
        let d = rng.gen_range(-500.0..10.0);
        let l = 10f64.powf(rng.gen_range(2.0..4.0));
        let n = rng.gen_range(0..=3);
        let p = SystemParams::new(d, l, n).unwrap();
        let c = scatter(k, &p).unwrap();
        let o = oracle::solve(&ModeFunction::mesa(l).unwrap(), k, &p).unwrap();
        worst = worst
            .max((c.t_a - o.transmission_a()).abs())
            .max((c.t_b - o.transmission_b()).abs());
        if o.k_b.im == 0.0 {
            assert!((o.flux_sum - 1.0).abs() < 1e-9);
        } else {
            assert!((o.r_a.norm_sqr() + o.t_a.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn oracle_refinements_reproduce_peak_amplitude() {
    let l = 1000.0 * PI;
    let p = SystemParams::new(0.0, l, 0).unwrap();
    let peak = resonance_positions(&p, 1001..=1001).unwrap()[0];
    let a = resonance_amplitude(peak.position, &p).unwrap();
    let mesa = ModeFunction::mesa(l).unwrap();
    for j in 0..=3 {
        let r = oracle::solve(&mesa.refined(j), peak.position, &p).unwrap();
        assert!((r.transmission_total() - a).abs() < 1e-9, "level {j}");
    }
}

#[test]
fn closed_channel_peaks_match_oracle() {
    let l = 1000.0 * PI;
    let p = SystemParams::new(0.005, l, 0).unwrap();
    let mesa = ModeFunction::mesa(l).unwrap();
    for pk in resonance_positions(&p, resonance_indices_below(&p, 0.005f64.sqrt())).unwrap() {
        let r = oracle::solve(&mesa, pk.position, &p).unwrap();
        assert!((r.transmission_total() - 1.0).abs() < 1e-6, "m={}", pk.index);
    }
}

fn fig4_beam() -> mazer::selection::VelocityDistribution {
    maxwell_boltzmann_initial(0.05, &uniform_grid(0.0, 0.2, 4000)).unwrap()
}

#[test]
fn beam_average_is_self_convergent() {
    let init = fig4_beam();
    let p = SystemParams::new(0.0, 200.0 * PI, 0).unwrap();
    let base = QuadratureOptions::default();
    for kernel in [EmissionKernel::Ultracold, EmissionKernel::ExactEmission] {
        for n in [0, 1, 5] {
            let a = mean_p_em_with(n, &init, &p, kernel, &base).unwrap();
            let b = mean_p_em_with(n, &init, &p, kernel, &base.doubled()).unwrap();
            assert!(a > 0.0 && a < 1.0);
            assert!((a - b).abs() < 1e-6, "{kernel:?} n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn stationary_field_stable_under_truncation_doubling() {
    let init = fig4_beam();
    let p = SystemParams::new(0.0, 200.0 * PI, 0).unwrap();
    let q = QuadratureOptions::default();
    let em = |n: u32| mean_p_em_with(n, &init, &p, EmissionKernel::Ultracold, &q);
    let a = stationary_distribution(&PumpParams::new(0.2, 100.0, 64).unwrap(), em).unwrap();
    let b = stationary_distribution(&PumpParams::new(0.2, 100.0, 128).unwrap(), em).unwrap();
    assert!(a.mean().is_finite());
    assert!((a.mean() - b.mean()).abs() < 1e-10);
    assert!((a.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn final_distribution_bounds() {
    let init = fig4_beam();
    let dist = mazer::pump::PhotonDistribution::thermal(0.2, 64).unwrap();
    for d in [-0.003, 0.0, 0.004] {
        let p = SystemParams::new(d, 200.0 * PI, 0).unwrap();
        let f = final_distribution(&init, &dist, &p, &SelectionOptions::default()).unwrap();
        let p_i = init.interpolant();
        let (_, top) = init.argmax();
        for (&k, &v) in f.grid().iter().zip(f.density()) {
            assert!(v >= 0.0);
            assert!(v <= p_i.eval(k) + top * (1.0 + 1e-12));
            if d == 0.0 {
                assert!(v <= p_i.eval(k) * (1.0 + 1e-12) + 1e-300);
            }
        }
        assert!(f.integral() <= 1.0);
    }
}
