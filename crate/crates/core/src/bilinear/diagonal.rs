use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::modarith::PrimeModulus;
use crate::square_lemmas::{exception_set, ExceptionSet};

/// `(b1, b2, b3, b4)` with every entry in `(B/2, B]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Quadruple(pub [u64; 4]);

impl Quadruple {
    pub fn new(b: [u64; 4], big_b: u64) -> Result<Self> {
        let (lo, hi) = block_range(big_b);
        if b.iter().any(|x| !(lo..=hi).contains(x)) {
            return domain(format!("{b:?} not inside (B/2, B] for B = {big_b}"));
        }
        Ok(Self(b))
    }

    /// `b1 = b2` and `b3 = b4`.
    pub fn in_d(&self) -> bool {
        self.0[0] == self.0[1] && self.0[2] == self.0[3]
    }

    /// `(b3, b4, b1, b2)`
    pub fn swapped(&self) -> Self {
        let [b1, b2, b3, b4] = self.0;
        Self([b3, b4, b1, b2])
    }
}

/// Integer range `(B/2, B]`.
pub fn block_range(big_b: u64) -> (u64, u64) {
    (big_b / 2 + 1, big_b)
}

/// All quadruples for `B`, in lexicographic order.
pub fn all_quadruples(big_b: u64) -> Vec<Quadruple> {
    let (lo, hi) = block_range(big_b);
    let r = lo..=hi;
    let mut out = Vec::new();
    for b1 in r.clone() {
        for b2 in r.clone() {
            for b3 in r.clone() {
                for b4 in r.clone() {
                    out.push(Quadruple([b1, b2, b3, b4]));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagonalSet {
    pub members: BTreeSet<Quadruple>,
    pub big_b: u64,
    pub q: u64,
}

impl DiagonalSet {
    pub fn contains(&self, b: &Quadruple) -> bool {
        self.members.contains(b)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Quadruples for `B` outside the set, in lexicographic order.
    pub fn complement(&self) -> Vec<Quadruple> {
        all_quadruples(self.big_b)
            .into_iter()
            .filter(|b| !self.contains(b))
            .collect()
    }
}

/// Integers in `[lo, hi]` congruent to `r` mod `q`.
fn lifts(r: u64, q: u64, lo: u64, hi: u64) -> impl Iterator<Item = u64> {
    let first = lo + (r + q - lo % q) % q;
    (first..=hi).step_by(q as usize)
}

/// `D` together with the solutions of `b1 = alpha (b3 - b4) + b4`,
/// `b2 = beta (b3 - b4) + b4` (and the same with the pairs exchanged) for
/// every `(alpha, beta)` in the exception set.
pub fn diagonal_set(big_b: u64, q: &PrimeModulus) -> Result<DiagonalSet> {
    let exceptions = exception_set(q)?;
    diagonal_set_with(big_b, q, &exceptions)
}

pub fn diagonal_set_with(
    big_b: u64,
    q: &PrimeModulus,
    exceptions: &ExceptionSet,
) -> Result<DiagonalSet> {
    if big_b < 2 {
        return domain(format!("B must be at least 2, got {big_b}"));
    }
    let (lo, hi) = block_range(big_b);
    let qq = q.q();
    let mut members = BTreeSet::new();
    for x in lo..=hi {
        for y in lo..=hi {
            members.insert(Quadruple([x, x, y, y]));
        }
    }
    for &(alpha, beta) in &exceptions.pairs {
        for b3 in lo..=hi {
            for b4 in lo..=hi {
                let d = q.sub(b3 % qq, b4 % qq);
                let r1 = q.add(q.mul(alpha, d), b4 % qq);
                let r2 = q.add(q.mul(beta, d), b4 % qq);
                for b1 in lifts(r1, qq, lo, hi) {
                    for b2 in lifts(r2, qq, lo, hi) {
                        let b = Quadruple([b1, b2, b3, b4]);
                        members.insert(b);
                        members.insert(b.swapped());
                    }
                }
            }
        }
    }
    Ok(DiagonalSet {
        members,
        big_b,
        q: qq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(q: u64) -> PrimeModulus {
        PrimeModulus::new(q).unwrap()
    }

    #[test]
    fn contains_d() {
        let set = diagonal_set(8, &pm(101)).unwrap();
        assert!(set.contains(&Quadruple([5, 5, 7, 7])));
        for b in all_quadruples(8).iter().filter(|b| b.in_d()) {
            assert!(set.contains(b));
        }
    }

    #[test]
    fn cardinality() {
        for big_b in [4, 8] {
            let set = diagonal_set(big_b, &pm(101)).unwrap();
            assert!(
                set.len() as u64 <= 30 * big_b * big_b,
                "B={big_b}: {}",
                set.len()
            );
        }
    }

    #[test]
    fn multiset_swaps_are_diagonal() {
        let set = diagonal_set(6, &pm(53)).unwrap();
        for b in all_quadruples(6) {
            let [b1, b2, b3, b4] = b.0;
            let same = (b1, b2) == (b3, b4) || (b1, b2) == (b4, b3);
            if same {
                assert!(set.contains(&b), "{b:?}");
            }
        }
    }

    #[test]
    fn swap_closed() {
        let set = diagonal_set(6, &pm(53)).unwrap();
        for b in &set.members {
            assert!(set.contains(&b.swapped()));
        }
    }

    #[test]
    fn lift_enumeration() {
        assert_eq!(lifts(3, 5, 4, 20).collect::<Vec<_>>(), vec![8, 13, 18]);
        assert_eq!(lifts(0, 101, 4, 8).count(), 0);
        assert_eq!(lifts(5, 101, 4, 8).collect::<Vec<_>>(), vec![5]);
    }

    #[test]
    fn quadruple_range() {
        assert!(Quadruple::new([3, 4, 4, 3], 4).is_ok());
        assert!(Quadruple::new([2, 4, 4, 3], 4).is_err());
        assert_eq!(all_quadruples(6).len(), 81);
        assert!(diagonal_set(1, &pm(5)).is_err());
    }
}
