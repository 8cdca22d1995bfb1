use std::f64::consts::TAU;

use num_complex::Complex64;

/// Steps between exact re-anchoring of the running product.
const RENORM_PERIOD: usize = 64;

/// The `q`-th roots of unity `e_q(k) = exp(2 pi i k / q)` for `k = 0..q`.
///
/// Built by repeated multiplication, re-anchored on `sin`/`cos` every
/// `RENORM_PERIOD` steps so the drift stays at a few ulps.
pub fn roots_of_unity(q: u64) -> Vec<Complex64> {
    let q = q as usize;
    let step = Complex64::from_polar(1.0, TAU / q as f64);
    let mut out = Vec::with_capacity(q);
    let mut z = Complex64::new(1.0, 0.0);
    for k in 0..q {
        if k % RENORM_PERIOD == 0 {
            z = Complex64::from_polar(1.0, TAU * k as f64 / q as f64);
        }
        out.push(z);
        z *= step;
    }
    out
}
