use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::prime::{inv_mod, mul_mod, pow_mod};
use crate::error::{domain, Result};

/// A residue class modulo a prime, stored as its least nonnegative representative.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    q: u64,
}

impl Residue {
    pub fn new(value: u64, q: u64) -> Self {
        Self {
            value: value % q,
            q,
        }
    }

    pub fn from_i64(value: i64, q: u64) -> Self {
        Self {
            value: value.rem_euclid(q as i64) as u64,
            q,
        }
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.q
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, e: u64) -> Self {
        Self::new(pow_mod(self.value, e, self.q), self.q)
    }

    /// Signed representative in `(-q/2, q/2]`.
    pub fn centered(self) -> i64 {
        let v = self.value as i64;
        if v > (self.q / 2) as i64 {
            v - self.q as i64
        } else {
            v
        }
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.q)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        debug_assert_eq!(self.q, rhs.q);
        Residue::new(self.value + rhs.value, self.q)
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        debug_assert_eq!(self.q, rhs.q);
        Residue::new(self.value + self.q - rhs.value, self.q)
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue::new(self.q - self.value, self.q)
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        debug_assert_eq!(self.q, rhs.q);
        Residue::new(mul_mod(self.value, rhs.value, self.q), self.q)
    }
}

/// Multiplicative inverse; zero has none.
pub fn mod_inv(x: Residue) -> Result<Residue> {
    match inv_mod(x.value, x.q) {
        Some(v) if x.value != 0 => Ok(Residue::new(v, x.q)),
        _ => domain(format!("{} has no inverse modulo {}", x.value, x.q)),
    }
}

/// Legendre symbol of `x` by Euler's criterion.
pub fn legendre(x: Residue) -> i8 {
    if x.value == 0 {
        return 0;
    }
    if pow_mod(x.value, (x.q - 1) / 2, x.q) == 1 {
        1
    } else {
        -1
    }
}

/// The least positive quadratic non-residue modulo an odd prime `q`.
pub fn least_nonresidue(q: u64) -> Residue {
    (2..q)
        .map(|x| Residue::new(x, q))
        .find(|&x| legendre(x) == -1)
        .expect("an odd prime has non-residues")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_mod_7() {
        let r = |v| Residue::new(v, 7);
        assert_eq!(mod_inv(r(1)).unwrap(), r(1));
        assert_eq!(mod_inv(r(2)).unwrap(), r(4));
        assert_eq!(mod_inv(r(3)).unwrap(), r(5));
        assert!(mod_inv(r(0)).is_err());
        assert!(mod_inv(r(7)).is_err());
    }

    #[test]
    fn inverse_is_involution() {
        for q in [3u64, 5, 7, 11, 101, 9973] {
            for x in 1..q {
                let r = Residue::new(x, q);
                assert_eq!(mod_inv(mod_inv(r).unwrap()).unwrap(), r);
            }
        }
    }

    #[test]
    fn legendre_matches_enumeration() {
        assert_eq!(legendre(Residue::new(0, 7)), 0);
        assert_eq!(legendre(Residue::new(1, 7)), 1);
        assert_eq!(legendre(Residue::new(3, 7)), -1);
        for q in [5u64, 7, 11, 13, 101] {
            let squares: std::collections::BTreeSet<u64> = (1..q).map(|x| x * x % q).collect();
            for x in 1..q {
                let expect = if squares.contains(&x) { 1 } else { -1 };
                assert_eq!(legendre(Residue::new(x, q)), expect, "q={q} x={x}");
            }
        }
    }

    #[test]
    fn least_nonresidue_small() {
        assert_eq!(least_nonresidue(7).value(), 3);
        assert_eq!(least_nonresidue(5).value(), 2);
        assert_eq!(least_nonresidue(17).value(), 3);
        assert_eq!(least_nonresidue(101).value(), 2);
    }

    #[test]
    fn arithmetic() {
        let a = Residue::new(5, 7);
        let b = Residue::new(4, 7);
        assert_eq!((a + b).value(), 2);
        assert_eq!((b - a).value(), 6);
        assert_eq!((a * b).value(), 6);
        assert_eq!((-a).value(), 2);
        assert_eq!((-Residue::new(0, 7)).value(), 0);
        assert_eq!(Residue::from_i64(-1, 7).value(), 6);
        assert_eq!(Residue::new(6, 7).centered(), -1);
    }
}
