//! Rational functions over F_q and the "square over the algebraic closure" test.

use std::fmt;

use super::prime::inv_mod;
use super::{PolyFq, Residue};
use crate::error::{domain, Result};

/// A rational function `num / den` in canonical form: `den` monic and
/// `gcd(num, den) = 1`. The zero function is `0 / 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFq {
    num: PolyFq,
    den: PolyFq,
}

impl RatFq {
    pub fn new(num: PolyFq, den: PolyFq) -> Result<Self> {
        if den.is_zero() {
            return domain("rational function with zero denominator");
        }
        let q = num.modulus();
        if num.is_zero() {
            return Ok(Self::zero(q));
        }
        let g = num.gcd(&den);
        let num = num.div_exact(&g);
        let den = den.div_exact(&g);
        let lc_inv = inv_mod(den.leading(), q).expect("nonzero leading coefficient");
        Ok(Self {
            num: num.scale(lc_inv),
            den: den.scale(lc_inv),
        })
    }

    pub fn zero(q: u64) -> Self {
        Self {
            num: PolyFq::zero(q),
            den: PolyFq::one(q),
        }
    }

    pub fn constant(c: u64, q: u64) -> Self {
        Self::from_poly(PolyFq::constant(c, q))
    }

    pub fn from_poly(p: PolyFq) -> Self {
        let q = p.modulus();
        Self {
            num: p,
            den: PolyFq::one(q),
        }
    }

    /// `c / p^2`
    pub fn inverse_square(p: &PolyFq, c: u64) -> Result<Self> {
        Self::new(PolyFq::constant(c, p.modulus()), p.square())
    }

    pub fn num(&self) -> &PolyFq {
        &self.num
    }

    pub fn den(&self) -> &PolyFq {
        &self.den
    }

    pub fn modulus(&self) -> u64 {
        self.num.modulus()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Degrees of numerator and denominator (`None` for the zero numerator).
    pub fn degrees(&self) -> (Option<usize>, usize) {
        (self.num.degree(), self.den.degree().unwrap_or(0))
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::new(num, self.den.mul(&other.den)).expect("product of nonzero denominators")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("product of nonzero denominators")
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Value at `x`, or `None` at a pole.
    pub fn eval(&self, x: u64) -> Option<u64> {
        let q = self.modulus();
        let d = self.den.eval(x);
        inv_mod(d, q)
            .filter(|_| d != 0)
            .map(|di| super::prime::mul_mod(self.num.eval(x), di, q))
    }
}

impl fmt::Debug for RatFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}

/// Outcome of [`rat_is_square_closure`].
#[derive(Clone, Debug)]
pub struct SquareTest {
    pub is_square: bool,
    /// When square: `g` with `f = c * g^2` for a constant `c` (a square over the closure).
    pub witness: Option<RatFq>,
}

fn even_root(p: &PolyFq) -> Option<PolyFq> {
    let mut root = PolyFq::one(p.modulus());
    for (g, m) in p.squarefree_factors() {
        if m % 2 != 0 {
            return None;
        }
        root = root.mul(&g.pow(m / 2));
    }
    Some(root)
}

/// Whether a nonzero `f` is a square in the function field over the algebraic
/// closure of F_q: every irreducible factor of numerator and denominator must
/// occur with even multiplicity. Constants are squares over the closure.
pub fn rat_is_square_closure(f: &RatFq) -> Result<SquareTest> {
    if f.is_zero() {
        return domain("square test of the zero function");
    }
    let witness = match (even_root(&f.num), even_root(&f.den)) {
        (Some(n), Some(d)) => Some(RatFq::new(n, d)?),
        _ => None,
    };
    Ok(SquareTest {
        is_square: witness.is_some(),
        witness,
    })
}

/// Largest modulus for which root finding scans the whole field.
pub const ROOT_SCAN_LIMIT: u64 = 1 << 20;

/// All roots in F_q of a nonzero polynomial of degree at most 4, by exhaustive evaluation.
pub fn quartic_roots(poly: &PolyFq) -> Result<Vec<Residue>> {
    let q = poly.modulus();
    match poly.degree() {
        None => return domain("every element is a root of the zero polynomial"),
        Some(d) if d > 4 => return domain(format!("degree {d} exceeds 4")),
        _ => {}
    }
    if q >= ROOT_SCAN_LIMIT {
        return domain(format!("modulus {q} too large for an exhaustive root scan"));
    }
    Ok((0..q)
        .filter(|&x| poly.eval(x) == 0)
        .map(|x| Residue::new(x, q))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64], q: u64) -> PolyFq {
        PolyFq::from_i64(c, q)
    }

    fn x(q: u64) -> PolyFq {
        p(&[0, 1], q)
    }

    #[test]
    fn canonical_form_is_unique() {
        let q = 11;
        // (X+1)(X+2) / (3 (X+1)(X+5))  ==  (X+2) / (3 (X+5))
        let a = RatFq::new(
            p(&[1, 1], q).mul(&p(&[2, 1], q)),
            p(&[1, 1], q).mul(&p(&[5, 1], q)).scale(3),
        )
        .unwrap();
        let b = RatFq::new(p(&[2, 1], q).scale(4), p(&[5, 1], q).scale(12)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.den().leading(), 1);
        assert_eq!(a.num().gcd(a.den()), PolyFq::one(q));
        assert!(RatFq::new(p(&[1], q), PolyFq::zero(q)).is_err());
        assert_eq!(
            RatFq::new(PolyFq::zero(q), p(&[3, 1], q)).unwrap(),
            RatFq::zero(q)
        );
    }

    #[test]
    fn monomials() {
        for q in [5u64, 7, 13] {
            let x2 = RatFq::from_poly(x(q).square());
            assert!(rat_is_square_closure(&x2).unwrap().is_square);
            let x1 = RatFq::from_poly(x(q));
            assert!(!rat_is_square_closure(&x1).unwrap().is_square);
            // a nonresidue constant is still a square over the closure
            assert!(
                rat_is_square_closure(&RatFq::constant(3, q))
                    .unwrap()
                    .is_square
            );
        }
        assert!(rat_is_square_closure(&RatFq::zero(7)).is_err());
    }

    #[test]
    fn witness_squares_back() {
        let q = 13;
        let g = RatFq::new(p(&[1, 2, 3], q), p(&[4, 0, 1], q)).unwrap();
        let f = g.square().mul(&RatFq::constant(5, q));
        let t = rat_is_square_closure(&f).unwrap();
        let w = t.witness.unwrap();
        let ratio = f.mul(&RatFq::new(w.den().square(), w.num().square()).unwrap());
        assert!(ratio.num().is_constant() && ratio.den().is_constant());
    }

    #[test]
    fn two_pole_square_from_lemma() {
        // 1 + d^2/(X - r1)^2 + d^2/(X - r2)^2 with d = r1 - r2
        let q = 11;
        let (r1, r2) = (3u64, 9u64);
        let d = (r1 + q - r2) % q;
        let d2 = d * d % q;
        let f = RatFq::constant(1, q)
            .add(&RatFq::inverse_square(&PolyFq::linear_root(r1, q), d2).unwrap())
            .add(&RatFq::inverse_square(&PolyFq::linear_root(r2, q), d2).unwrap());
        assert!(rat_is_square_closure(&f).unwrap().is_square);
    }

    #[test]
    fn roots() {
        let r = quartic_roots(&p(&[-1, 0, 0, 0, 1], 5)).unwrap();
        assert_eq!(
            r.iter().map(|r| r.value()).collect::<Vec<_>>(),
            vec![1, 2, 3, 4]
        );
        assert!(quartic_roots(&p(&[1, 0, 0, 0, 1], 3)).unwrap().is_empty());
        assert!(quartic_roots(&p(&[1, 0, 0, 0, 0, 1], 7)).is_err());
        assert!(quartic_roots(&PolyFq::zero(7)).is_err());
    }

    #[test]
    fn eval_poles() {
        let q = 7;
        let f = RatFq::new(p(&[1], q), p(&[-2, 1], q)).unwrap();
        assert_eq!(f.eval(2), None);
        assert_eq!(f.eval(3), Some(1));
    }
}
