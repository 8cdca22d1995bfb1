//! Length-`q` discrete Fourier transform with the `e_q(+nk)` sign convention.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Lengths above this use the FFT path; at or below, direct summation.
pub const FAST_PATH_THRESHOLD: usize = 4096;

/// `out[n] = sum_k x[k] * e_q(n k)`, with `roots` the `q`-th roots of unity.
pub fn dft_plus(x: &[Complex64], roots: &[Complex64]) -> Vec<Complex64> {
    if x.len() > FAST_PATH_THRESHOLD {
        dft_plus_fast(x)
    } else {
        dft_plus_direct(x, roots)
    }
}

pub fn dft_plus_direct(x: &[Complex64], roots: &[Complex64]) -> Vec<Complex64> {
    let q = x.len();
    assert_eq!(roots.len(), q);
    (0..q)
        .map(|n| {
            let mut idx = 0usize;
            let mut acc = Complex64::new(0.0, 0.0);
            for &xk in x {
                acc += xk * roots[idx];
                idx += n;
                if idx >= q {
                    idx -= q;
                }
            }
            acc
        })
        .collect()
}

/// Prime lengths are handled inside rustfft by Rader or Bluestein (chirp) plans.
pub fn dft_plus_fast(x: &[Complex64]) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    let plan = FftPlanner::new().plan_fft_inverse(buf.len());
    plan.process(&mut buf);
    buf
}

#[cfg(test)]
mod tests {
    use super::super::roots::roots_of_unity;
    use super::*;

    #[test]
    fn fast_matches_direct() {
        for q in [101usize, 4099, 5003] {
            let roots = roots_of_unity(q as u64);
            let x: Vec<Complex64> = (0..q)
                .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos()))
                .collect();
            let a = dft_plus_direct(&x, &roots);
            let b = dft_plus_fast(&x);
            let err = a
                .iter()
                .zip(&b)
                .map(|(u, v)| (u - v).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-7, "q={q} err={err}");
        }
    }
}
