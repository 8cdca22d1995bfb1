//! Dense univariate polynomials over a prime field.

use std::fmt;

use super::prime::{inv_mod, mul_mod};
use super::Residue;
use crate::error::{domain, Result};

/// Polynomial over F_q, coefficients constant-first with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyFq {
    coeffs: Vec<u64>,
    q: u64,
}

impl PolyFq {
    pub fn new(coeffs: Vec<u64>, q: u64) -> Self {
        let mut p = Self {
            coeffs: coeffs.into_iter().map(|c| c % q).collect(),
            q,
        };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64], q: u64) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| c.rem_euclid(q as i64) as u64)
                .collect(),
            q,
        )
    }

    pub fn from_residues(coeffs: &[Residue]) -> Self {
        let q = coeffs.first().map(|r| r.modulus()).unwrap_or(3);
        Self::new(coeffs.iter().map(|r| r.value()).collect(), q)
    }

    pub fn zero(q: u64) -> Self {
        Self { coeffs: vec![], q }
    }

    pub fn constant(c: u64, q: u64) -> Self {
        Self::new(vec![c], q)
    }

    pub fn one(q: u64) -> Self {
        Self::constant(1, q)
    }

    /// `X - root`
    pub fn linear_root(root: u64, q: u64) -> Self {
        Self::new(vec![(q - root % q) % q, 1], q)
    }

    /// `slope * X + intercept`
    pub fn linear(slope: u64, intercept: u64, q: u64) -> Self {
        Self::new(vec![intercept, slope], q)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| (mul_mod(acc, x, self.q) + c) % self.q)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + b) % self.q
            })
            .collect();
        Self::new(c, self.q)
    }

    pub fn neg(&self) -> Self {
        Self::new(
            self.coeffs.iter().map(|&c| (self.q - c) % self.q).collect(),
            self.q,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|&c| mul_mod(c, k % self.q, self.q))
                .collect(),
            self.q,
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.q);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, self.q)) % self.q;
            }
        }
        Self::new(out, self.q)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(self.q), |acc, _| acc.mul(self))
    }

    /// Euclidean division; errors on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let Some(dd) = divisor.degree() else {
            return domain("polynomial division by zero");
        };
        let q = self.q;
        let lead_inv = inv_mod(divisor.leading(), q).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let k = mul_mod(*rem.last().unwrap(), lead_inv, q);
            quot[shift] = k;
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                let idx = shift + i;
                rem[idx] = (rem[idx] + q - mul_mod(k, d, q)) % q;
            }
            while rem.last() == Some(&0) {
                rem.pop();
            }
        }
        Ok((Self::new(quot, q), Self::new(rem, q)))
    }

    /// Exact quotient; panics if `divisor` does not divide `self`.
    pub(crate) fn div_exact(&self, divisor: &Self) -> Self {
        let (quo, rem) = self.div_rem(divisor).expect("nonzero divisor");
        assert!(rem.is_zero(), "inexact polynomial division");
        quo
    }

    pub fn monic(&self) -> Self {
        match inv_mod(self.leading(), self.q) {
            Some(inv) if !self.is_zero() => self.scale(inv),
            _ => self.clone(),
        }
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % self.q, self.q))
            .collect();
        Self::new(c, self.q)
    }

    /// Inverse of Frobenius on a polynomial whose exponents are all multiples of `q`.
    fn qth_root(&self) -> Self {
        let q = self.q as usize;
        debug_assert!(self
            .coeffs
            .iter()
            .enumerate()
            .all(|(i, &c)| i % q == 0 || c == 0));
        Self::new(self.coeffs.iter().step_by(q).copied().collect(), self.q)
    }

    /// Squarefree factorization of a nonzero polynomial: pairs `(g, m)` with each
    /// `g` monic, squarefree and non-constant, pairwise coprime, and
    /// `self = lc * prod g^m`. Each irreducible factor lands in exactly one pair
    /// carrying its true multiplicity.
    pub fn squarefree_factors(&self) -> Vec<(Self, usize)> {
        assert!(!self.is_zero(), "squarefree factorization of zero");
        let mut out = Vec::new();
        self.monic().sff_into(1, &mut out);
        out.sort_by_key(|(_, m)| *m);
        out
    }

    fn sff_into(&self, scale: usize, out: &mut Vec<(Self, usize)>) {
        if self.is_constant() {
            return;
        }
        let one = Self::one(self.q);
        let mut c = self.gcd(&self.derivative());
        let mut w = self.div_exact(&c);
        let mut i = 1;
        while w != one {
            let y = w.gcd(&c);
            let fac = w.div_exact(&y);
            if !fac.is_constant() {
                out.push((fac, i * scale));
            }
            w = y;
            c = c.div_exact(&w);
            i += 1;
        }
        if !c.is_constant() {
            c.qth_root().sff_into(scale * self.q as usize, out);
        }
    }
}

impl fmt::Debug for PolyFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 (mod {})", self.q);
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}X"),
                _ => format!("{c}X^{i}"),
            })
            .collect();
        write!(f, "{} (mod {})", terms.join(" + "), self.q)
    }
}
