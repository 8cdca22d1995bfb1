use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LabError, Result};

/// Target absolute error for each `V^(xi)`.
pub const HAT_TOLERANCE: f64 = 1e-10;

fn flat(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth step from 0 at `t <= 0` to 1 at `t >= 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let (a, b) = (flat(t), flat(1.0 - t));
        a / (a + b)
    }
}

/// The bump `V`: 0 outside `(1/2, 4)`, 1 on `[1, 2]`, smooth steps between.
pub fn cutoff_eval(x: f64) -> f64 {
    if x <= 0.5 || x >= 4.0 {
        0.0
    } else if x < 1.0 {
        smooth_step(2.0 * (x - 0.5))
    } else if x <= 2.0 {
        1.0
    } else {
        smooth_step((4.0 - x) / 2.0)
    }
}

/// `int_a^b V(x) e(-xi x) dx` over a transition interval, split into pieces
/// short enough that the integrand oscillates at most about once per piece.
fn transition_integral(a: f64, b: f64, xi: f64) -> Result<Complex64> {
    let pieces = ((b - a) * (xi.abs() + 1.0)).ceil().max(1.0) as usize;
    let h = (b - a) / pieces as f64;
    let tol = HAT_TOLERANCE / (4.0 * pieces as f64);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..pieces {
        let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
        let re = quadrature::integrate(|x| cutoff_eval(x) * (TAU * xi * x).cos(), lo, hi, tol);
        let im = quadrature::integrate(|x| -cutoff_eval(x) * (TAU * xi * x).sin(), lo, hi, tol);
        let err = re.error_estimate.max(im.error_estimate);
        if err.is_nan() || err > tol {
            return Err(LabError::Numeric(format!(
                "cutoff transform at xi = {xi}: piece [{lo}, {hi}] error estimate {err:e} > {tol:e} after {} evaluations",
                re.num_function_evaluations.max(im.num_function_evaluations)
            )));
        }
        acc += Complex64::new(re.integral, im.integral);
    }
    Ok(acc)
}

/// `V^(xi) = int V(x) e(-xi x) dx`.
pub fn cutoff_hat(xi: f64) -> Result<Complex64> {
    if !xi.is_finite() {
        return Err(LabError::Numeric(format!(
            "cutoff transform at non-finite xi = {xi}"
        )));
    }
    if xi < 0.0 {
        return Ok(cutoff_hat(-xi)?.conj());
    }
    // exact on the plateau [1, 2]
    let plateau = if xi == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        let e = |x: f64| Complex64::from_polar(1.0, -TAU * xi * x);
        (e(1.0) - e(2.0)) / Complex64::new(0.0, TAU * xi)
    };
    Ok(transition_integral(0.5, 1.0, xi)? + plateau + transition_integral(2.0, 4.0, xi)?)
}

/// Grid on which the decay envelope is measured.
pub const DECAY_GRID: (f64, f64, f64) = (1.0, 100.0, 0.125);

/// `max |V^(xi)| xi^2` over the decay grid, measured once.
pub fn decay_constant() -> Result<f64> {
    static CELL: OnceLock<std::result::Result<f64, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        let (lo, hi, step) = DECAY_GRID;
        let n = ((hi - lo) / step).round() as usize;
        (0..=n)
            .into_par_iter()
            .map(|k| {
                let xi = lo + k as f64 * step;
                cutoff_hat(xi).map(|v| v.norm() * xi * xi)
            })
            .collect::<Result<Vec<f64>>>()
            .map(|v| v.into_iter().fold(0.0, f64::max))
            .map_err(|e| e.to_string())
    })
    .clone()
    .map_err(LabError::Numeric)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_and_plateau() {
        assert_eq!(cutoff_eval(1.5), 1.0);
        assert_eq!(cutoff_eval(1.0), 1.0);
        assert_eq!(cutoff_eval(2.0), 1.0);
        assert_eq!(cutoff_eval(0.4), 0.0);
        assert_eq!(cutoff_eval(0.5), 0.0);
        assert_eq!(cutoff_eval(4.0), 0.0);
        assert_eq!(cutoff_eval(5.0), 0.0);
        for k in 0..=1000 {
            let v = cutoff_eval(k as f64 * 0.005);
            assert!((0.0..=1.0).contains(&v));
        }
        // symmetric transitions
        assert!((cutoff_eval(0.75) - 0.5).abs() < 1e-15);
        assert!((cutoff_eval(3.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hat_at_zero_is_integral() {
        // each symmetric step integrates to half its length: 0.25 + 1 + 1
        let v0 = cutoff_hat(0.0).unwrap();
        assert!((v0.re - 2.25).abs() < 1e-9, "{v0}");
        assert!(v0.im.abs() < 1e-12);
    }

    #[test]
    fn hat_matches_riemann_sum() {
        for xi in [0.3, 1.0, 2.7, 7.5] {
            let n = 200_000;
            let h = 3.5 / n as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let x = 0.5 + (k as f64 + 0.5) * h;
                acc += cutoff_eval(x) * Complex64::from_polar(1.0, -TAU * xi * x) * h;
            }
            let got = cutoff_hat(xi).unwrap();
            assert!((got - acc).norm() < 1e-8, "xi={xi}: {got} vs {acc}");
            assert!((cutoff_hat(-xi).unwrap() - got.conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn decays_faster_than_inverse_square() {
        let c = decay_constant().unwrap();
        assert!(c.is_finite() && c > 0.0);
        for xi in [10.0, 50.0, 100.0] {
            assert!(cutoff_hat(xi).unwrap().norm() * xi * xi <= c);
        }
        assert!(cutoff_hat(f64::INFINITY).is_err());
    }
}
