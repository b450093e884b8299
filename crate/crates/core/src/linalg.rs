//! Dense complex linear solves with a conditioning check.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Condition numbers above this are treated as numerical failure.
pub const MAX_CONDITION: f64 = 1e13;

#[derive(Debug)]
pub struct Solution {
    pub x: Vec<Complex64>,
    /// 2-norm condition estimate from the singular values.
    pub condition: f64,
}

/// Solves `a x = b` by partial-pivot LU. Returns `None` when the matrix is
/// singular or its condition estimate exceeds [`MAX_CONDITION`].
pub fn solve(a: DMatrix<Complex64>, b: Vec<Complex64>) -> Option<Solution> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    debug_assert_eq!(n, b.len());
    let sv = a.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !condition.is_finite() || condition > MAX_CONDITION {
        return None;
    }
    let rhs = nalgebra::DVector::from_vec(b);
    let x = a.lu().solve(&rhs)?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    Some(Solution {
        x: x.iter().copied().collect(),
        condition,
    })
}
