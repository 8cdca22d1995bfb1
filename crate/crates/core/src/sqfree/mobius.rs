use rayon::prelude::*;

use crate::error::{LabError, Result};

/// Largest `X` accepted by the segmented sieve.
pub const SIEVE_LIMIT: u64 = 1_000_000_000;
/// Largest stored table, in entries (one byte each).
pub const TABLE_BUDGET: u64 = 1 << 27;
/// Segment length for the streaming sieve.
pub const SEGMENT_LEN: u64 = 1 << 18;

/// Primes up to `n` (inclusive).
pub fn small_primes(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            for k in (i * i..=n).step_by(i) {
                composite[k] = true;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `mu(n)` for `n` in `[lo, hi)`, given every prime up to `sqrt(hi - 1)`.
pub fn mobius_segment(lo: u64, hi: u64, primes: &[u64]) -> Vec<i8> {
    let len = (hi - lo) as usize;
    let mut mu = vec![1i8; len];
    // product of the small prime factors found so far
    let mut prod = vec![1u64; len];
    for &p in primes {
        if p * p >= hi {
            break;
        }
        let first = lo.div_ceil(p) * p;
        for n in (first..hi).step_by(p as usize) {
            let i = (n - lo) as usize;
            mu[i] = -mu[i];
            prod[i] *= p;
        }
        let pp = p * p;
        let first = lo.div_ceil(pp) * pp;
        for n in (first..hi).step_by(pp as usize) {
            mu[(n - lo) as usize] = 0;
        }
    }
    for i in 0..len {
        let n = lo + i as u64;
        if n == 0 {
            mu[i] = 0;
        } else if mu[i] != 0 && prod[i] != n {
            mu[i] = -mu[i];
        }
    }
    mu
}

fn check_x(x: u64) -> Result<()> {
    if x == 0 || x > SIEVE_LIMIT {
        return Err(LabError::Domain(format!(
            "sieve bound {x} outside 1..={SIEVE_LIMIT}"
        )));
    }
    Ok(())
}

/// Fold `f(start, &mu[start..end])` over the segments of `[1, x]` in
/// parallel and combine with `merge`. Segments are independent, so an
/// associative, commutative `merge` gives a result independent of scheduling.
pub fn fold_segments<T, F, M>(
    x: u64,
    init: impl Fn() -> T + Sync + Send,
    f: F,
    merge: M,
) -> Result<T>
where
    T: Send,
    F: Fn(&mut T, u64, &[i8]) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    check_x(x)?;
    let primes = small_primes(isqrt(x));
    let count = x.div_ceil(SEGMENT_LEN);
    Ok((0..count)
        .into_par_iter()
        .fold(&init, |mut acc, k| {
            let lo = 1 + k * SEGMENT_LEN;
            let hi = (lo + SEGMENT_LEN).min(x + 1);
            f(&mut acc, lo, &mobius_segment(lo, hi, &primes));
            acc
        })
        .reduce(&init, &merge))
}

/// Number of squarefree `n <= x` in each residue class mod `q`.
pub fn squarefree_class_counts(x: u64, q: u64) -> Result<Vec<u64>> {
    fold_segments(
        x,
        || vec![0u64; q as usize],
        |acc, lo, mu| {
            let mut r = lo % q;
            for &m in mu {
                if m != 0 {
                    acc[r as usize] += 1;
                }
                r += 1;
                if r == q {
                    r = 0;
                }
            }
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )
}

/// `mu(1..=x)` held in memory.
#[derive(Clone, Debug)]
pub struct MobiusTable {
    x: u64,
    values: Vec<i8>,
}

impl MobiusTable {
    pub fn sieve(x: u64) -> Result<Self> {
        Self::sieve_with_budget(x, TABLE_BUDGET)
    }

    pub fn sieve_with_budget(x: u64, budget: u64) -> Result<Self> {
        check_x(x)?;
        if x > budget {
            return Err(LabError::Capacity {
                what: "Mobius table entries",
                requested: x,
                budget,
            });
        }
        let primes = small_primes(isqrt(x));
        let starts: Vec<u64> = (1..=x).step_by(SEGMENT_LEN as usize).collect();
        let mut values = vec![0i8];
        let segments: Vec<Vec<i8>> = starts
            .par_iter()
            .map(|&lo| mobius_segment(lo, (lo + SEGMENT_LEN).min(x + 1), &primes))
            .collect();
        values.reserve(x as usize);
        for s in segments {
            values.extend(s);
        }
        Ok(Self { x, values })
    }

    pub fn bound(&self) -> u64 {
        self.x
    }

    /// `mu(n)` for `1 <= n <= X`.
    pub fn mu(&self, n: u64) -> i8 {
        assert!(
            (1..=self.x).contains(&n),
            "n = {n} outside table 1..={}",
            self.x
        );
        self.values[n as usize]
    }

    /// `mu(1..=X)`; index 0 holds 0.
    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn squarefree_count(&self) -> u64 {
        self.values.iter().filter(|&&m| m != 0).count() as u64
    }
}

pub fn mobius_sieve(x: u64) -> Result<MobiusTable> {
    MobiusTable::sieve(x)
}

/// `mu(n)` by trial division.
pub fn mobius_trial(mut n: u64) -> i8 {
    assert!(n >= 1);
    let mut mu = 1i8;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Both sides of `mu(n)^2 = sum_{n1 n2^2 = n} mu(n2)`, each by trial division.
pub fn mu_square_sides(n: u64) -> (i64, i64) {
    assert!(n >= 1);
    let lhs = (mobius_trial(n) as i64).pow(2);
    let rhs = (1..)
        .take_while(|k| k * k <= n)
        .filter(|k| n.is_multiple_of(k * k))
        .map(|k| mobius_trial(k) as i64)
        .sum();
    (lhs, rhs)
}

pub fn mu_square_decomposition_check(n: u64) -> Result<bool> {
    if n == 0 {
        return Err(LabError::Domain("n must be at least 1".into()));
    }
    let (lhs, rhs) = mu_square_sides(n);
    Ok(lhs == rhs)
}

/// Every `n <= limit` where the decomposition fails, using a sieved table
/// for the right-hand side's divisor sums.
pub fn mu_square_decomposition_failures(limit: u64) -> Result<Vec<u64>> {
    let table = MobiusTable::sieve(limit)?;
    let mu = table.values();
    let mut rhs = vec![0i64; limit as usize + 1];
    let mut k = 1u64;
    while k * k <= limit {
        let kk = k * k;
        for n in (kk..=limit).step_by(kk as usize) {
            rhs[n as usize] += mu[k as usize] as i64;
        }
        k += 1;
    }
    Ok((1..=limit)
        .filter(|&n| (mu[n as usize] as i64).pow(2) != rhs[n as usize])
        .collect())
}
