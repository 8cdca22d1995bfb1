use num_complex::Complex64;

use super::diagonal::Quadruple;
use crate::error::{domain, Result};
use crate::expsum::{dft_plus, ComplexVal, ExpSumContext, KernelSpec, KernelTable, KernelVariant};

/// Largest modulus for the `O(q^2)` complete sums.
pub const SIGMA_LIMIT: u64 = 2000;

/// Evaluates
/// `Sigma_j(K, b, h) = sum_{r, s mod q} prod_{i=1,2} K(s (r + b_i)^j) conj(K(s (r + b_{i+2})^j)) e_q(h s)`
/// from a shared kernel table.
#[derive(Clone, Debug)]
pub struct SigmaEngine {
    ctx: ExpSumContext,
    table: KernelTable,
    j: u32,
    /// `r^j mod q`
    powers: Vec<u64>,
}

impl SigmaEngine {
    pub fn new(ctx: &ExpSumContext, spec: &KernelSpec, j: u32) -> Result<Self> {
        let q = ctx.q();
        if q > SIGMA_LIMIT {
            return domain(format!("complete sums need q <= {SIGMA_LIMIT}, got {q}"));
        }
        if !(1..=2).contains(&j) {
            return domain(format!("exponent j = {j} outside 1..=2"));
        }
        if spec.variant == KernelVariant::Klk {
            return domain("Kl_k is undefined at 0, which every complete sum visits");
        }
        let table = KernelTable::build(ctx, spec)?;
        let m = ctx.modulus();
        let powers = (0..q).map(|r| m.pow(r, j as u64)).collect();
        Ok(Self {
            ctx: ctx.clone(),
            table,
            j,
            powers,
        })
    }

    pub fn q(&self) -> u64 {
        self.ctx.q()
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// `P(s) = sum_r prod_i K(s (r + b_i)^j) conj(K(s (r + b_{i+2})^j))`
    pub fn product_profile(&self, b: &Quadruple) -> Vec<ComplexVal> {
        let q = self.q();
        let m = self.ctx.modulus();
        let shifts: Vec<[u64; 4]> = (0..q)
            .map(|r| b.0.map(|bi| self.powers[((r + bi) % q) as usize]))
            .collect();
        (0..q)
            .map(|s| {
                let mut acc = Complex64::new(0.0, 0.0);
                for sh in &shifts {
                    let k = |i: usize| self.table.get(m.mul(s, sh[i]));
                    acc += k(0) * k(1) * k(2).conj() * k(3).conj();
                }
                acc
            })
            .collect()
    }

    /// `Sigma_j(K, b, h)` for every `h`, indexed by `h`.
    pub fn all_h(&self, b: &Quadruple) -> Vec<ComplexVal> {
        dft_plus(&self.product_profile(b), self.ctx.roots())
    }

    pub fn at(&self, b: &Quadruple, h: u64) -> ComplexVal {
        let q = self.q();
        let m = self.ctx.modulus();
        let h = h % q;
        self.product_profile(b)
            .iter()
            .enumerate()
            .map(|(s, p)| p * self.ctx.e(m.mul(h, s as u64)))
            .sum()
    }
}

pub fn sigma_j(
    ctx: &ExpSumContext,
    spec: &KernelSpec,
    j: u32,
    b: &Quadruple,
    h: u64,
) -> Result<ComplexVal> {
    Ok(SigmaEngine::new(ctx, spec, j)?.at(b, h))
}

/// Largest modulus for the quartic brute force in [`fourth_moment_split`].
pub const FOURTH_MOMENT_LIMIT: u64 = 31;

/// Both sides of the split of the full fourth moment of `K1` into its
/// off-diagonal part:
/// `lhs = q^{-1} sum_{u1+u2 != u3+u4} e_q(a (u1^-2 + u2^-2 - u3^-2 - u4^-2))`,
/// `rhs = q |K1(0)|^4 - sum_r |K1(r)|^4`.
pub fn fourth_moment_split(
    ctx: &ExpSumContext,
    spec: &KernelSpec,
) -> Result<(ComplexVal, ComplexVal)> {
    if spec.variant != KernelVariant::K1 {
        return domain(format!(
            "fourth moment split is stated for K1, got {}",
            spec.variant
        ));
    }
    let q = ctx.q();
    if q > FOURTH_MOMENT_LIMIT {
        return domain(format!(
            "fourth moment brute force needs q <= {FOURTH_MOMENT_LIMIT}"
        ));
    }
    let m = ctx.modulus();
    let w: Vec<u64> = (1..q).map(|u| m.mul(spec.a, ctx.inv_sq(u))).collect();
    let mut lhs = Complex64::new(0.0, 0.0);
    for (i1, &w1) in w.iter().enumerate() {
        for (i2, &w2) in w.iter().enumerate() {
            let plus = m.add(w1, w2);
            let usum = (i1 + i2 + 2) as u64 % q;
            for (i3, &w3) in w.iter().enumerate() {
                for (i4, &w4) in w.iter().enumerate() {
                    if (i3 + i4 + 2) as u64 % q == usum {
                        continue;
                    }
                    lhs += ctx.e(m.sub(plus, m.add(w3, w4)));
                }
            }
        }
    }
    lhs /= q as f64;
    let table = KernelTable::build(ctx, spec)?;
    let qf = q as f64;
    let full: f64 = table.values().iter().map(|z| z.norm_sqr().powi(2)).sum();
    let rhs = qf * table.get(0).norm_sqr().powi(2) - full;
    Ok((lhs, Complex64::new(rhs, 0.0)))
}
