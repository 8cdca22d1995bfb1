use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::cutoff::{cutoff_eval, cutoff_hat, decay_constant};
use crate::error::{domain, LabError, Result};
use crate::expsum::ExpSumContext;

/// Largest number of `(m, n)` candidates for [`s_v_direct`].
pub const DIRECT_BUDGET: u64 = 1_000_000_000;

fn support(len: f64) -> (u64, u64) {
    (
        (len / 2.0).ceil().max(1.0) as u64,
        (4.0 * len).floor() as u64,
    )
}

fn check_lengths(m_len: f64, n_len: f64) -> Result<()> {
    if !(m_len > 0.0 && n_len > 0.0 && m_len.is_finite() && n_len.is_finite()) {
        return domain(format!(
            "lengths must be positive, got M = {m_len}, N = {n_len}"
        ));
    }
    Ok(())
}

/// `S_V = sum_{m n^2 = a mod q} V(m/M) V(n/N)` by enumeration of `n` and the
/// lifts of `m = a n^{-2}`.
pub fn s_v_direct(m_len: f64, n_len: f64, ctx: &ExpSumContext, a: u64) -> Result<f64> {
    check_lengths(m_len, n_len)?;
    let q = ctx.q();
    let pm = ctx.modulus();
    let a = a % q;
    let (m_lo, m_hi) = support(m_len);
    let (n_lo, n_hi) = support(n_len);
    if m_lo > m_hi || n_lo > n_hi {
        return Ok(0.0);
    }
    let candidates = (m_hi - m_lo + 1).saturating_mul(n_hi - n_lo + 1);
    if candidates > DIRECT_BUDGET {
        return Err(LabError::Capacity {
            what: "S_V candidate pairs",
            requested: candidates,
            budget: DIRECT_BUDGET,
        });
    }
    let per_n: Vec<f64> = (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| {
            let wn = cutoff_eval(n as f64 / n_len);
            if wn == 0.0 {
                return 0.0;
            }
            let r = n % q;
            let ms: Box<dyn Iterator<Item = u64>> = if r == 0 {
                if a != 0 {
                    return 0.0;
                }
                Box::new(m_lo..=m_hi)
            } else {
                let target = pm.mul(a, ctx.inv_sq(r));
                let first = m_lo + (target + q - m_lo % q) % q;
                Box::new((first..=m_hi).step_by(q as usize))
            };
            wn * ms.map(|m| cutoff_eval(m as f64 / m_len)).sum::<f64>()
        })
        .collect();
    Ok(per_n.iter().sum())
}

#[derive(Clone, Debug, Serialize)]
pub struct PoissonResult {
    pub value: Complex64,
    /// `(MN/q^2) V^(0)^2 (q - 1)`
    pub zero_term: Complex64,
    /// Bound on the dual terms dropped by the truncation.
    pub tail_estimate: f64,
    pub h_max: u64,
    pub k_max: u64,
    pub decay_constant: f64,
}

/// `sum_{|h| > H} |V^(h L / q)|` bounded with the `C / xi^2` envelope, and the
/// same restricted to `h = 0 mod q` (excluding `h = 0`).
fn dual_tail(c: f64, len: f64, q: f64, big_h: u64) -> (f64, f64) {
    let all = 2.0 * c * q * q / (len * len * big_h as f64);
    let j0 = (big_h as f64 / q).floor();
    let zeta_tail = if j0 >= 1.0 {
        1.0 / j0
    } else {
        std::f64::consts::PI.powi(2) / 6.0
    };
    (all, 2.0 * c / (len * len) * zeta_tail)
}

/// The dual side of Poisson summation in both variables:
/// `(MN/q^2) sum_{|h| <= Tq/M, |k| <= Tq/N} V^(hM/q) V^(kN/q) S(a h, k; q)`.
pub fn s_v_poisson(
    m_len: f64,
    n_len: f64,
    ctx: &ExpSumContext,
    a: u64,
    cutoff_t: u64,
) -> Result<PoissonResult> {
    check_lengths(m_len, n_len)?;
    if cutoff_t == 0 {
        return domain("truncation T must be positive");
    }
    let q = ctx.q();
    let qf = q as f64;
    let pm = ctx.modulus();
    let a = a % q;
    let h_max = (cutoff_t as f64 * qf / m_len).floor() as u64;
    let k_max = (cutoff_t as f64 * qf / n_len).floor() as u64;
    if h_max == 0 || k_max == 0 {
        return domain("truncation range is empty; increase T");
    }
    let hats = |len: f64, top: u64| -> Result<Vec<Complex64>> {
        (0..=top)
            .into_par_iter()
            .map(|h| cutoff_hat(h as f64 * len / qf))
            .collect()
    };
    let vm = hats(m_len, h_max)?;
    let vn = hats(n_len, k_max)?;
    let v_at = |v: &[Complex64], h: i64| {
        if h >= 0 {
            v[h as usize]
        } else {
            v[(-h) as usize].conj()
        }
    };

    let per_h: Vec<Complex64> = (-(h_max as i64)..=h_max as i64)
        .into_par_iter()
        .map(|h| {
            let row = ctx.s_row(pm.reduce(a as i64 * (h % q as i64)));
            let inner: Complex64 = (-(k_max as i64)..=k_max as i64)
                .map(|k| v_at(&vn, k) * row[pm.reduce(k) as usize])
                .sum();
            v_at(&vm, h) * inner
        })
        .collect();
    let scale = m_len * n_len / (qf * qf);
    let value = per_h.iter().sum::<Complex64>() * scale;
    let zero_term = vm[0] * vn[0] * (qf - 1.0) * scale;

    let c = decay_constant()?;
    let inside = |v: &[Complex64]| v[0].norm() + 2.0 * v[1..].iter().map(|z| z.norm()).sum::<f64>();
    let (in_m, in_n) = (inside(&vm), inside(&vn));
    let (tail_m, tail_m_q) = dual_tail(c, m_len, qf, h_max);
    let (tail_n, tail_n_q) = dual_tail(c, n_len, qf, k_max);
    let weil = 3.0 * qf.sqrt();
    // |S(ah, k)| <= 3 q^{1/2} unless q divides both h and k, where it is q - 1
    let generic = weil * (tail_m * (in_n + tail_n) + in_m * tail_n);
    let all_q = |v: &[Complex64], len: f64| {
        v[0].norm() + 2.0 * c / (len * len) * std::f64::consts::PI.powi(2) / 6.0
    };
    let exceptional = (qf - 1.0) * (tail_m_q * all_q(&vn, n_len) + all_q(&vm, m_len) * tail_n_q);
    Ok(PoissonResult {
        value,
        zero_term,
        tail_estimate: scale * (generic + exceptional),
        h_max,
        k_max,
        decay_constant: c,
    })
}
