//! Deterministic primality and the validated prime modulus.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};

/// Moduli up to this bound get a precomputed inverse table.
pub const INV_TABLE_LIMIT: u64 = 1 << 20;

// Witnesses valid for every n < 3.3 * 10^24, which covers u64.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    if n <= u32::MAX as u64 {
        (a * b) % n
    } else {
        ((a as u128 * b as u128) % n as u128) as u64
    }
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Inverse of `x` modulo `n` by the extended Euclidean algorithm, if it exists.
pub(crate) fn inv_mod(x: u64, n: u64) -> Option<u64> {
    let (mut r0, mut r1) = (n as i128, (x % n) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(n as i128) as u64)
}

/// Deterministic Miller-Rabin, exact for every input below 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `p >= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// An odd prime modulus `q` with an optional table of inverses.
#[derive(Clone)]
pub struct PrimeModulus {
    q: u64,
    inv: Option<Arc<[u32]>>,
}

impl PrimeModulus {
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 || !is_prime(q) {
            return domain(format!("{q} is not an odd prime"));
        }
        let inv = (q <= INV_TABLE_LIMIT).then(|| {
            // inv[i] = -(q / i) * inv[q mod i]
            let mut t = vec![0u32; q as usize];
            t[1] = 1;
            for i in 2..q {
                let k = q - q / i;
                t[i as usize] = ((k * t[(q % i) as usize] as u64) % q) as u32;
            }
            Arc::from(t)
        });
        Ok(Self { q, inv })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Number of units, `q - 1`.
    #[inline]
    pub fn unit_count(&self) -> u64 {
        self.q - 1
    }

    pub fn has_inverse_table(&self) -> bool {
        self.inv.is_some()
    }

    #[inline]
    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.q as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.q)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.q)
    }

    /// Inverse of a nonzero residue; `None` for zero.
    #[inline]
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.q;
        if a == 0 {
            return None;
        }
        match &self.inv {
            Some(t) => Some(t[a as usize] as u64),
            None => inv_mod(a, self.q),
        }
    }

    /// Residue class of `x`.
    pub fn residue(&self, x: i64) -> crate::modarith::Residue {
        crate::modarith::Residue::new(self.reduce(x), self.q)
    }
}

impl PartialEq for PrimeModulus {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for PrimeModulus {}

impl fmt::Debug for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimeModulus")
            .field("q", &self.q)
            .field("inverse_table", &self.inv.is_some())
            .finish()
    }
}
