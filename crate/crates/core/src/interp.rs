//! Monotone piecewise-cubic Hermite interpolation.

use crate::error::{domain, Result};

/// Shape-preserving cubic interpolant through `(x, y)`; zero outside `[x_0, x_last]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return domain("interpolation needs at least two points of equal-length data");
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("interpolation grid must be strictly increasing");
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let s: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = s[0];
            d[1] = s[0];
        } else {
            for i in 1..n - 1 {
                if s[i - 1] * s[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], s[0], s[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
        }
        Ok(Pchip {
            x: x.to_vec(),
            y: y.to_vec(),
            d,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if !(t >= self.x[0] && t <= self.x[n - 1]) {
            return 0.0;
        }
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

fn end_slope(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d * s0 <= 0.0 {
        0.0
    } else if s0 * s1 <= 0.0 && d.abs() > 3.0 * s0.abs() {
        3.0 * s0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes_and_zero_outside() {
        let x = [0.0, 1.0, 1.5, 3.0];
        let y = [1.0, 2.0, 0.5, 0.7];
        let p = Pchip::new(&x, &y).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((p.eval(*a) - b).abs() < 1e-15);
        }
        assert_eq!(p.eval(-0.1), 0.0);
        assert_eq!(p.eval(3.1), 0.0);
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let x = [0.0, 0.1, 0.2, 1.0, 1.1, 3.0];
        let y = [0.0, 0.0, 0.05, 0.9, 1.0, 1.0];
        let p = Pchip::new(&x, &y).unwrap();
        let mut prev = 0.0;
        for i in 0..=3000 {
            let v = p.eval(i as f64 * 1e-3);
            assert!(v >= prev - 1e-15 && v <= 1.0 + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn exact_for_lines() {
        let x = [0.0, 0.3, 0.35, 2.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let p = Pchip::new(&x, &y).unwrap();
        assert!((p.eval(1.234) - 1.468).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(Pchip::new(&[0.0, 0.0], &[1.0, 2.0]).is_err());
        assert!(Pchip::new(&[0.0], &[1.0]).is_err());
    }
}
