//! Square criteria for sums of inverse squares of linear forms over F_q, and
//! the exception set of pairs `(alpha, beta)` for which
//! `f(X) = 1 + 1/X^2 - 1/(alpha X + beta)^2 - 1/((1-alpha) X + (1-beta))^2`
//! degenerates into a square.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::modarith::{
    quartic_roots, rat_is_square_closure, PolyFq, PrimeModulus, RatFq, ROOT_SCAN_LIMIT,
};

/// `1 + A/(X - rho1)^2 + B/(X - rho2)^2` with `A, B != 0` and `rho1 != rho2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwoPoleSpec {
    a: u64,
    b: u64,
    rho1: u64,
    rho2: u64,
    q: u64,
}

impl TwoPoleSpec {
    pub fn new(a: u64, b: u64, rho1: u64, rho2: u64, q: u64) -> Result<Self> {
        let (a, b, rho1, rho2) = (a % q, b % q, rho1 % q, rho2 % q);
        if a == 0 || b == 0 {
            return domain("two-pole coefficients must be nonzero");
        }
        if rho1 == rho2 {
            return domain("two-pole poles must be distinct");
        }
        Ok(Self {
            a,
            b,
            rho1,
            rho2,
            q,
        })
    }

    pub fn function(&self) -> RatFq {
        pole_sum(&[(self.a, self.rho1), (self.b, self.rho2)], self.q)
    }
}

/// `1 + sum c_i / (X - rho_i)^2`
pub fn pole_sum(terms: &[(u64, u64)], q: u64) -> RatFq {
    terms.iter().fold(RatFq::constant(1, q), |acc, &(c, rho)| {
        acc.add(
            &RatFq::inverse_square(&PolyFq::linear_root(rho, q), c).expect("nonzero denominator"),
        )
    })
}

/// The two-pole function is a square iff `A = B = (rho1 - rho2)^2`.
pub fn two_pole_is_square(spec: &TwoPoleSpec) -> bool {
    let q = spec.q;
    let d = (spec.rho1 + q - spec.rho2) % q;
    let d2 = d * d % q;
    spec.a == d2 && spec.b == d2
}

/// `1/(rho1 - rho2) + 1/(rho2 - rho3) + 1/(rho3 - rho1) == 0`, necessary for
/// `1 + A/(X-rho1)^2 + B/(X-rho2)^2 + C/(X-rho3)^2` to be a square.
pub fn three_pole_necessary(rho1: u64, rho2: u64, rho3: u64, q: &PrimeModulus) -> Result<bool> {
    let (r1, r2, r3) = (rho1 % q.q(), rho2 % q.q(), rho3 % q.q());
    if r1 == r2 || r2 == r3 || r1 == r3 {
        return domain("three-pole criterion needs pairwise distinct poles");
    }
    let inv_diff = |x: u64, y: u64| q.inv(q.sub(x, y)).expect("distinct");
    let total = q.add(q.add(inv_diff(r1, r2), inv_diff(r2, r3)), inv_diff(r3, r1));
    Ok(total == 0)
}

/// `f_{alpha,beta}` in canonical form. A linear form that is a nonzero
/// constant contributes a constant; one that vanishes identically is rejected.
pub fn f_alpha_beta(alpha: u64, beta: u64, q: &PrimeModulus) -> Result<RatFq> {
    let qq = q.q();
    let (alpha, beta) = (alpha % qq, beta % qq);
    let l = PolyFq::linear(alpha, beta, qq);
    let lt = PolyFq::linear(q.sub(1, alpha), q.sub(1, beta), qq);
    if l.is_zero() || lt.is_zero() {
        return domain(format!(
            "f_(alpha,beta) undefined at ({alpha}, {beta}): a linear form vanishes identically"
        ));
    }
    let x = PolyFq::linear(1, 0, qq);
    let one = RatFq::constant(1, qq);
    let f = one
        .add(&RatFq::inverse_square(&x, 1)?)
        .sub(&RatFq::inverse_square(&l, 1)?)
        .sub(&RatFq::inverse_square(&lt, 1)?);
    Ok(f)
}

/// `alpha^4 - 2 alpha^3 + 5 alpha^2 - 4 alpha + 1`: pairs `(alpha, 1 - alpha)`.
pub const QUARTIC_ANTIDIAGONAL: [i64; 5] = [1, -4, 5, -2, 1];
/// `alpha^4 - 2 alpha^3 + 3 alpha^2 - 2 alpha + 1`: pairs `(alpha, alpha)`.
pub const QUARTIC_DIAGONAL: [i64; 5] = [1, -2, 3, -2, 1];

/// Pairs named explicitly in the case analysis, as `(alpha, beta)` with `-1` meaning `q - 1`.
pub const LISTED_PAIRS: [(i64, i64); 6] = [(0, 0), (0, 1), (0, -1), (1, 0), (1, 1), (1, 2)];

/// Exception set for `f_{alpha,beta}` over F_q.
#[derive(Clone, Debug, Serialize)]
pub struct ExceptionSet {
    pub q: u64,
    /// Union of every source below.
    pub pairs: BTreeSet<(u64, u64)>,
    /// Pairs where `f` is a square over the closure (including `f = 0`).
    pub semantic: BTreeSet<(u64, u64)>,
    /// The explicitly listed degenerate pairs.
    pub listed: BTreeSet<(u64, u64)>,
    /// `(alpha, 1 - alpha)` and `(alpha, alpha)` from the two quartics.
    pub quartic: BTreeSet<(u64, u64)>,
}

impl ExceptionSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, alpha: u64, beta: u64) -> bool {
        self.pairs.contains(&(alpha % self.q, beta % self.q))
    }
}

/// Whether `f_{alpha,beta}` is a square over the closure. `None` when undefined.
pub fn f_alpha_beta_is_square(alpha: u64, beta: u64, q: &PrimeModulus) -> Option<bool> {
    let f = f_alpha_beta(alpha, beta, q).ok()?;
    if f.is_zero() {
        return Some(true);
    }
    Some(rat_is_square_closure(&f).expect("nonzero").is_square)
}

/// The exception set: an exhaustive square scan over F_q^2 joined with the
/// listed pairs and the quartic-root pairs.
pub fn exception_set(q: &PrimeModulus) -> Result<ExceptionSet> {
    let qq = q.q();
    if qq > ROOT_SCAN_LIMIT {
        return domain(format!("exception scan needs q <= {ROOT_SCAN_LIMIT}"));
    }
    let semantic: BTreeSet<(u64, u64)> = (0..qq)
        .into_par_iter()
        .flat_map_iter(|alpha| {
            (0..qq)
                .filter(move |&beta| f_alpha_beta_is_square(alpha, beta, q) == Some(true))
                .map(move |beta| (alpha, beta))
        })
        .collect();
    let listed: BTreeSet<(u64, u64)> = LISTED_PAIRS
        .iter()
        .map(|&(a, b)| (q.reduce(a), q.reduce(b)))
        .collect();
    let mut quartic = BTreeSet::new();
    for r in quartic_roots(&PolyFq::from_i64(&QUARTIC_ANTIDIAGONAL, qq))? {
        quartic.insert((r.value(), q.sub(1, r.value())));
    }
    for r in quartic_roots(&PolyFq::from_i64(&QUARTIC_DIAGONAL, qq))? {
        quartic.insert((r.value(), r.value()));
    }
    let pairs = semantic
        .iter()
        .chain(&listed)
        .chain(&quartic)
        .copied()
        .collect();
    Ok(ExceptionSet {
        q: qq,
        pairs,
        semantic,
        listed,
        quartic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(q: u64) -> PrimeModulus {
        PrimeModulus::new(q).unwrap()
    }

    #[test]
    fn two_pole_examples() {
        let q = 7;
        // rho1 - rho2 = 3, square 2
        let s = TwoPoleSpec::new(2, 2, 4, 1, q).unwrap();
        assert!(two_pole_is_square(&s));
        assert!(rat_is_square_closure(&s.function()).unwrap().is_square);
        let s = TwoPoleSpec::new(2, 1, 0, 1, q).unwrap();
        assert!(!two_pole_is_square(&s));
        assert!(!rat_is_square_closure(&s.function()).unwrap().is_square);
        assert!(TwoPoleSpec::new(0, 1, 0, 1, q).is_err());
        assert!(TwoPoleSpec::new(1, 1, 3, 3, q).is_err());
    }

    #[test]
    fn two_pole_exhaustive_q7() {
        let q = 7;
        for a in 1..q {
            for b in 1..q {
                for r1 in 0..q {
                    for r2 in (0..q).filter(|&r| r != r1) {
                        let s = TwoPoleSpec::new(a, b, r1, r2, q).unwrap();
                        let oracle = rat_is_square_closure(&s.function()).unwrap().is_square;
                        assert_eq!(two_pole_is_square(&s), oracle, "{s:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn three_pole_cyclic_and_errors() {
        let m = pm(11);
        for (a, b, c) in [(0u64, 1u64, 3u64), (2, 5, 9), (4, 7, 10)] {
            let v = three_pole_necessary(a, b, c, &m).unwrap();
            assert_eq!(v, three_pole_necessary(b, c, a, &m).unwrap());
            assert_eq!(v, three_pole_necessary(c, a, b, &m).unwrap());
        }
        assert!(three_pole_necessary(1, 1, 2, &m).is_err());
    }

    #[test]
    fn three_pole_zero_sum_scan_q7() {
        // Independent count: the sum vanishes iff d1^2 + d1 d2 + d2^2 = 0 for
        // d1 = r1 - r2, d2 = r2 - r3; over F_7 (-3 is a square) that happens.
        let m = pm(7);
        let mut hits = 0;
        for r1 in 0..7u64 {
            for r2 in 0..7 {
                for r3 in 0..7 {
                    if r1 == r2 || r2 == r3 || r1 == r3 {
                        continue;
                    }
                    let d1 = (r1 + 7 - r2) % 7;
                    let d2 = (r2 + 7 - r3) % 7;
                    let expect = (d1 * d1 + d1 * d2 + d2 * d2) % 7 == 0;
                    let got = three_pole_necessary(r1, r2, r3, &m).unwrap();
                    assert_eq!(got, expect);
                    hits += got as u32;
                }
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn f_symmetry_and_degeneracies() {
        let m = pm(13);
        for alpha in 0..13u64 {
            for beta in 0..13u64 {
                let f = f_alpha_beta(alpha, beta, &m);
                let g = f_alpha_beta(m.sub(1, alpha), m.sub(1, beta), &m);
                match (f, g) {
                    (Ok(f), Ok(g)) => assert_eq!(f, g),
                    (Err(_), Err(_)) => assert!((alpha, beta) == (0, 0) || (alpha, beta) == (1, 1)),
                    _ => panic!("asymmetric definedness at ({alpha}, {beta})"),
                }
            }
        }
        // alpha = 1, beta = 0: 1 + 1/X^2 - 1/X^2 - 1 = 0
        assert!(f_alpha_beta(1, 0, &m).unwrap().is_zero());
        assert!(f_alpha_beta(0, 1, &m).unwrap().is_zero());
    }

    #[test]
    fn f_degrees_by_direct_expansion() {
        let q = 7;
        let m = pm(q);
        let f = f_alpha_beta(2, 3, &m).unwrap();
        // X^2 L^2 Lt^2 + L^2 Lt^2 - X^2 Lt^2 - X^2 L^2 over X^2 L^2 Lt^2
        let x = PolyFq::linear(1, 0, q);
        let l = PolyFq::linear(2, 3, q);
        let lt = PolyFq::linear(6, 5, q);
        let (x2, l2, lt2) = (x.square(), l.square(), lt.square());
        let num = x2
            .mul(&l2)
            .mul(&lt2)
            .add(&l2.mul(&lt2))
            .sub(&x2.mul(&lt2))
            .sub(&x2.mul(&l2));
        let den = x2.mul(&l2).mul(&lt2);
        let direct = RatFq::new(num, den).unwrap();
        assert_eq!(f, direct);
        assert_eq!(f.degrees(), (Some(6), 6));
    }

    #[test]
    fn exception_set_small_primes() {
        for q in [5u64, 7, 11, 13, 29, 101] {
            let m = pm(q);
            let e = exception_set(&m).unwrap();
            assert!(e.len() <= 14, "q={q} |E|={}", e.len());
            assert!(e.contains(0, 1) && e.contains(1, 0));
            for (a, b) in LISTED_PAIRS {
                assert!(e.contains(m.reduce(a), m.reduce(b)));
            }
            // every semantic square is accounted for by the case analysis
            for p in &e.semantic {
                assert!(
                    e.listed.contains(p) || e.quartic.contains(p),
                    "q={q} unexplained {p:?}"
                );
            }
            for &(a, b) in &e.quartic {
                let r = if b == a {
                    &QUARTIC_DIAGONAL
                } else {
                    &QUARTIC_ANTIDIAGONAL
                };
                assert_eq!(PolyFq::from_i64(r, q).eval(a), 0);
            }
        }
    }
}
