use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::mobius::{mobius_sieve, squarefree_class_counts};
use crate::error::{domain, Result};
use crate::modarith::PrimeModulus;

/// Exact rationals; every denominator here divides `phi(q) = q - 1`.
pub type Rational = Ratio<i128>;

fn ser_ratio<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

/// `#{1 <= m <= x0 : m = a mod q}`
pub fn count_ap(x0: u64, q: u64, a: u64) -> u64 {
    let a = a % q;
    if a == 0 {
        x0 / q
    } else if x0 < a {
        0
    } else {
        (x0 - a) / q + 1
    }
}

/// `Delta(x, q, a)` with `x0 = floor(x)`: the count of `m <= x` in the class
/// of `a` minus the average over the invertible classes.
pub fn delta_ap_floor(x0: u64, q: &PrimeModulus, a: u64) -> Rational {
    let qq = q.q();
    let coprime = x0 - x0 / qq;
    Rational::from_integer(count_ap(x0, qq, a) as i128)
        - Rational::new(coprime as i128, (qq - 1) as i128)
}

pub fn delta_ap(x: f64, q: &PrimeModulus, a: u64) -> Result<Rational> {
    if !x.is_finite() || x < 0.0 {
        return domain(format!("x must be finite and nonnegative, got {x}"));
    }
    Ok(delta_ap_floor(x.floor() as u64, q, a))
}

/// Error term for squarefree numbers in one progression, computed two ways.
#[derive(Clone, Debug, Serialize)]
pub struct ErrorRecord {
    #[serde(rename = "X")]
    pub x: u64,
    pub q: u64,
    pub a: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub e_direct: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub e_decomp: Rational,
    pub hooley_bound: f64,
    pub ratio: f64,
}

impl ErrorRecord {
    pub fn agrees(&self) -> bool {
        self.e_direct == self.e_decomp
    }
}

/// `X^{1/2} q^{-1/2} + q^{1/2}`
pub fn hooley_bound(x: u64, q: u64) -> f64 {
    ((x as f64) / q as f64).sqrt() + (q as f64).sqrt()
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn check_args(x: u64, q: &PrimeModulus) -> Result<()> {
    if q.q() >= x {
        return domain(format!("need q < X, got q = {} and X = {x}", q.q()));
    }
    Ok(())
}

/// `E(X, q, a)` for every unit `a`, from squarefree counts per residue class.
/// Index `a - 1`.
pub fn error_terms_direct(x: u64, q: &PrimeModulus) -> Result<Vec<Rational>> {
    check_args(x, q)?;
    let qq = q.q();
    let counts = squarefree_class_counts(x, qq)?;
    let coprime: u64 = counts[1..].iter().sum();
    let avg = Rational::new(coprime as i128, (qq - 1) as i128);
    Ok(counts[1..]
        .iter()
        .map(|&c| Rational::from_integer(c as i128) - avg)
        .collect())
}

/// `E(X, q, a) = sum_{n <= X^{1/2}, (n, q) = 1} mu(n) Delta(X / n^2, q, a n^{-2})`
pub fn error_term_decomp(x: u64, q: &PrimeModulus, a: u64, mu: &[i8]) -> Rational {
    let qq = q.q();
    let mut acc = Rational::from_integer(0);
    for n in 1u64.. {
        if n * n > x {
            break;
        }
        let m = mu[n as usize];
        if m == 0 || n % qq == 0 {
            continue;
        }
        let n_inv = q.inv(n % qq).expect("n is a unit");
        let class = q.mul(a % qq, q.mul(n_inv, n_inv));
        let d = delta_ap_floor(x / (n * n), q, class);
        acc += d * m as i128;
    }
    acc
}

fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

fn record(x: u64, q: u64, a: u64, e_direct: Rational, e_decomp: Rational) -> ErrorRecord {
    let hb = hooley_bound(x, q);
    ErrorRecord {
        x,
        q,
        a,
        ratio: rational_to_f64(&e_direct).abs() / hb,
        e_direct,
        e_decomp,
        hooley_bound: hb,
    }
}

pub fn error_term(x: u64, q: &PrimeModulus, a: u64) -> Result<ErrorRecord> {
    if a.is_multiple_of(q.q()) {
        return domain(format!("a = {a} is not a unit mod {}", q.q()));
    }
    let a = a % q.q();
    let direct = error_terms_direct(x, q)?[(a - 1) as usize];
    let mu = mobius_sieve(isqrt(x).max(1))?;
    Ok(record(
        x,
        q.q(),
        a,
        direct,
        error_term_decomp(x, q, a, mu.values()),
    ))
}

/// [`error_term`] for every unit `a`, ordered by `a`.
pub fn error_terms_all(x: u64, q: &PrimeModulus) -> Result<Vec<ErrorRecord>> {
    let direct = error_terms_direct(x, q)?;
    let mu = mobius_sieve(isqrt(x).max(1))?;
    let qq = q.q();
    Ok((1..qq)
        .into_par_iter()
        .map(|a| {
            record(
                x,
                qq,
                a,
                direct[(a - 1) as usize],
                error_term_decomp(x, q, a, mu.values()),
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn pm(q: u64) -> PrimeModulus {
        PrimeModulus::new(q).unwrap()
    }

    #[test]
    fn delta_by_hand() {
        // {1,4,7,10} against 7/2
        assert_eq!(delta_ap(10.0, &pm(3), 1).unwrap(), Rational::new(1, 2));
        assert_eq!(delta_ap(0.5, &pm(3), 1).unwrap(), Rational::from_integer(0));
        assert!(delta_ap(-1.0, &pm(3), 1).is_err());
        assert!(delta_ap(f64::NAN, &pm(3), 1).is_err());
        // a = 0 counts multiples of q
        assert_eq!(
            delta_ap(10.0, &pm(3), 0).unwrap(),
            Rational::new(3 * 2 - 7, 2)
        );
    }

    #[test]
    fn delta_sums_to_zero_and_is_bounded() {
        let q = pm(13);
        for x0 in 0..200 {
            let total: Rational = (1..13).map(|a| delta_ap_floor(x0, &q, a)).sum();
            assert_eq!(total, Rational::from_integer(0));
            for a in 0..13 {
                let d = delta_ap_floor(x0, &q, a);
                assert!(d.abs() <= Rational::new(13, 12));
            }
        }
    }

    #[test]
    fn dual_path_small() {
        let q = pm(101);
        let recs = error_terms_all(10_000, &q).unwrap();
        assert_eq!(recs.len(), 100);
        assert!(recs.iter().all(ErrorRecord::agrees));
        let total: Rational = recs.iter().map(|r| r.e_direct).sum();
        assert_eq!(total, Rational::from_integer(0));
        for r in &recs {
            assert_eq!(100 % *r.e_direct.denom(), 0);
        }
    }

    #[test]
    fn single_record_matches_bulk() {
        let q = pm(211);
        let one = error_term(10_000, &q, 17).unwrap();
        assert!(one.agrees());
        assert_eq!(
            one.e_direct,
            error_terms_all(10_000, &q).unwrap()[16].e_direct
        );
        assert!(error_term(10_000, &q, 211).is_err());
        assert!(error_term(100, &q, 1).is_err());
    }

    #[test]
    fn record_serializes_rationals_as_fractions() {
        let r = record(10, 3, 1, Rational::new(1, 2), Rational::new(1, 2));
        let js = serde_json::to_string(&r).unwrap();
        assert!(js.contains("\"e_direct\":\"1/2\""), "{js}");
    }
}
