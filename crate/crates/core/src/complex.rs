//! Complex helpers shared by the closed-form and boundary-matching solvers.

use num_complex::Complex64;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Square root on the branch with `Im >= 0`.
///
/// A positive real radicand yields the positive real root; a negative real
/// radicand yields `+i sqrt(|x|)` regardless of the sign of its zero imaginary part.
pub fn sqrt_upper(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return if z.re >= 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        };
    }
    let w = z.sqrt();
    if w.im < 0.0 {
        -w
    } else {
        w
    }
}

/// Real radicand version of [`sqrt_upper`].
pub fn sqrt_upper_real(x: f64) -> Complex64 {
    sqrt_upper(Complex64::new(x, 0.0))
}

/// `cos z` and `sin z` multiplied by `exp(-|Im z|)`.
///
/// The common factor cancels in every ratio the solvers form, and the scaled
/// values stay bounded for arbitrarily large evanescent arguments.
#[derive(Debug, Clone, Copy)]
pub struct ScaledTrig {
    pub cos: Complex64,
    pub sin: Complex64,
    /// `|Im z|`, the log of the removed scale factor.
    pub log_scale: f64,
}

impl ScaledTrig {
    pub fn new(z: Complex64) -> Self {
        let y = z.im.abs();
        // e^{iz} = e^{-Im z} e^{i Re z}; scale both exponentials by e^{-y}.
        let (s, c) = z.re.sin_cos();
        let p = (-z.im - y).exp(); // e^{iz} scale
        let m = (z.im - y).exp(); // e^{-iz} scale
        let eiz = Complex64::new(c * p, s * p);
        let emiz = Complex64::new(c * m, -s * m);
        ScaledTrig {
            cos: (eiz + emiz) * 0.5,
            sin: (eiz - emiz) / (2.0 * I),
            log_scale: y,
        }
    }
}
