//! One-dimensional peak refinement: golden-section maximization and
//! half-maximum crossings.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// A refined local maximum of a scalar function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub position: f64,
    pub value: f64,
    /// Full width at half of `value`; `None` when a side never drops that low.
    pub fwhm: Option<f64>,
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is below `rel_tol * |x|` (or `abs_tol`).
pub fn golden_max<F>(f: F, mut a: f64, mut b: f64, rel_tol: f64, abs_tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= (rel_tol * mid.abs()).max(abs_tol) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Locates where `f` first drops to `target` moving from `x0` towards `limit`.
///
/// The path is scanned in `steps` increments, then the bracketing interval is
/// bisected to `tol`. Returns `None` when `f` stays above `target`.
pub fn crossing<F>(f: F, x0: f64, limit: f64, target: f64, steps: usize, tol: f64) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let h = (limit - x0) / steps as f64;
    let mut prev = x0;
    for i in 1..=steps {
        let x = x0 + h * i as f64;
        if f(x) <= target {
            let (mut inside, mut outside) = (prev, x);
            while (outside - inside).abs() > tol {
                let m = 0.5 * (inside + outside);
                if f(m) > target {
                    inside = m;
                } else {
                    outside = m;
                }
            }
            return Some(0.5 * (inside + outside));
        }
        prev = x;
    }
    None
}

/// Refines a peak seeded inside `[lo, hi]` and measures its FWHM within the same bracket.
pub fn refine<F>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Peak
where
    F: Fn(f64) -> f64,
{
    let (position, value) = golden_max(&f, lo, hi, rel_tol, f64::MIN_POSITIVE);
    let half = 0.5 * value;
    let tol = (hi - lo) * 1e-9;
    let left = crossing(&f, position, lo, half, 400, tol);
    let right = crossing(&f, position, hi, half, 400, tol);
    Peak {
        position,
        value,
        fwhm: left.zip(right).map(|(l, r)| r - l),
    }
}

/// Samples `f` on `samples` evenly spaced points of `[lo, hi]` and refines
/// every interior local maximum inside its neighbouring sample bracket.
pub fn find_peaks<F>(f: F, lo: f64, hi: f64, samples: usize, rel_tol: f64) -> Vec<Peak>
where
    F: Fn(f64) -> f64,
{
    let h = (hi - lo) / (samples - 1) as f64;
    let xs: Vec<f64> = (0..samples).map(|i| lo + h * i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 1..samples - 1 {
        if ys[i] > ys[i - 1] && ys[i] >= ys[i + 1] {
            let (x, v) = golden_max(&f, xs[i - 1], xs[i + 1], rel_tol, f64::MIN_POSITIVE);
            // FWHM search reaches out to the neighbouring local minima.
            let mut l = i;
            while l > 0 && ys[l - 1] <= ys[l] {
                l -= 1;
            }
            let mut r = i;
            while r + 1 < samples && ys[r + 1] <= ys[r] {
                r += 1;
            }
            let tol = h * 1e-9;
            let left = crossing(&f, x, xs[l], 0.5 * v, 400, tol);
            let right = crossing(&f, x, xs[r], 0.5 * v, 400, tol);
            out.push(Peak {
                position: x,
                value: v,
                fwhm: left.zip(right).map(|(a, b)| b - a),
            });
        }
    }
    out
}
