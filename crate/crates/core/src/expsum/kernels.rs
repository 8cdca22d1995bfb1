use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dft::{dft_plus, dft_plus_direct, FAST_PATH_THRESHOLD};
use super::roots::roots_of_unity;
use crate::error::{domain, LabError, Result};
use crate::modarith::{PrimeModulus, Residue};

pub type ComplexVal = Complex64;

/// Largest modulus accepted for batched rows and kernel tables.
pub const ROW_LIMIT: u64 = 1 << 20;

/// Largest modulus for the `k = 3` hyper-Kloosterman brute force.
pub const KL3_LIMIT: u64 = 600;

/// Per-modulus tables shared by every sum over that modulus: the roots of
/// unity and `u -> u^{-2}`. Immutable once built.
#[derive(Clone)]
pub struct ExpSumContext {
    modulus: PrimeModulus,
    roots: Arc<[Complex64]>,
    inv_sq: Arc<[u32]>,
    inv: Arc<[u32]>,
}

impl fmt::Debug for ExpSumContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExpSumContext(q = {})", self.q())
    }
}

impl ExpSumContext {
    pub fn new(modulus: &PrimeModulus) -> Result<Self> {
        let q = modulus.q();
        if q > ROW_LIMIT {
            return domain(format!("modulus {q} exceeds table limit {ROW_LIMIT}"));
        }
        let mut inv = vec![0u32; q as usize];
        let mut inv_sq = vec![0u32; q as usize];
        for u in 1..q {
            let ui = modulus.inv(u).expect("unit");
            inv[u as usize] = ui as u32;
            inv_sq[u as usize] = modulus.mul(ui, ui) as u32;
        }
        Ok(Self {
            modulus: modulus.clone(),
            roots: roots_of_unity(q).into(),
            inv_sq: inv_sq.into(),
            inv: inv.into(),
        })
    }

    pub fn for_prime(q: u64) -> Result<Self> {
        Self::new(&PrimeModulus::new(q)?)
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.modulus.q()
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.modulus
    }

    /// `e_q(x)` for a reduced residue `x`.
    #[inline]
    pub fn e(&self, x: u64) -> Complex64 {
        self.roots[x as usize]
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    #[inline]
    pub fn inv(&self, u: u64) -> u64 {
        self.inv[u as usize] as u64
    }

    #[inline]
    pub fn inv_sq(&self, u: u64) -> u64 {
        self.inv_sq[u as usize] as u64
    }

    /// `S(m, n; q) = sum over units u of e_q(m u^{-2} + n u)`, summed directly.
    pub fn s_sum(&self, m: u64, n: u64) -> Complex64 {
        let q = self.q();
        let (m, n) = (m % q, n % q);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut nu = 0u64;
        for u in 1..q {
            nu += n;
            if nu >= q {
                nu -= q;
            }
            let idx = (m * self.inv_sq(u) + nu) % q;
            acc += self.e(idx);
        }
        acc
    }

    fn quadratic_phase(&self, m: u64) -> Vec<Complex64> {
        let q = self.q();
        let m = m % q;
        let mut x = vec![Complex64::new(0.0, 0.0); q as usize];
        for u in 1..q {
            x[u as usize] = self.e(m * self.inv_sq(u) % q);
        }
        x
    }

    /// The row `n -> S(m, n; q)` for all `n`, as a length-`q` transform of
    /// `u -> e_q(m u^{-2})`. Uses the FFT path for `q > 4096`.
    pub fn s_row(&self, m: u64) -> Vec<Complex64> {
        dft_plus(&self.quadratic_phase(m), &self.roots)
    }

    /// [`Self::s_row`] forced onto the direct `O(q^2)` path.
    pub fn s_row_direct(&self, m: u64) -> Vec<Complex64> {
        dft_plus_direct(&self.quadratic_phase(m), &self.roots)
    }

    /// Brute-force `Kl_k(t)`, summing over `(k-1)`-tuples of units.
    pub fn kloosterman_k(&self, t: u64, k: u32) -> Result<Complex64> {
        let q = self.q();
        let t = t % q;
        if t == 0 {
            return domain("Kl_k(t) is only defined for t != 0");
        }
        if !(1..=3).contains(&k) {
            return domain(format!("k = {k} outside 1..=3"));
        }
        if k == 3 && q > KL3_LIMIT {
            return domain(format!("Kl_3 brute force needs q <= {KL3_LIMIT}, got {q}"));
        }
        // u_1 ... u_{k-1} free, u_k = t / (u_1 ... u_{k-1})
        fn rec(ctx: &ExpSumContext, left: u32, prod: u64, phase: u64, t: u64) -> Complex64 {
            let q = ctx.q();
            if left == 0 {
                let last = ctx.modulus.mul(t, ctx.inv(prod));
                return ctx.e((phase + last) % q);
            }
            (1..q)
                .map(|u| rec(ctx, left - 1, ctx.modulus.mul(prod, u), (phase + u) % q, t))
                .sum()
        }
        let raw = rec(self, k - 1, 1, 0, t);
        Ok(raw / (q as f64).powf((k as f64 - 1.0) / 2.0))
    }
}

/// `S(m, n; q)` for a one-off evaluation.
pub fn s_sum(m: Residue, n: Residue, q: &PrimeModulus) -> Result<ComplexVal> {
    Ok(ExpSumContext::new(q)?.s_sum(m.value(), n.value()))
}

/// The row `n -> S(m, n; q)`.
pub fn s_row(m: Residue, q: &PrimeModulus) -> Result<Vec<ComplexVal>> {
    Ok(ExpSumContext::new(q)?.s_row(m.value()))
}

/// Normalized hyper-Kloosterman sum `Kl_k(t)` for `t != 0`, `k` in `1..=3`.
pub fn kloosterman_k(t: Residue, k: u32, q: &PrimeModulus) -> Result<ComplexVal> {
    ExpSumContext::new(q)?.kloosterman_k(t.value(), k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelVariant {
    /// Unnormalized `t -> S(a, b t; q)`.
    #[serde(rename = "s")]
    SRaw,
    /// `K1(t) = q^{-1/2} S(a, b t; q)`
    K1,
    /// `K2(t) = q^{-1/2} S(a t, b; q)`
    K2,
    /// `Kl_k(t)`
    Klk,
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelVariant::SRaw => "s",
            KernelVariant::K1 => "k1",
            KernelVariant::K2 => "k2",
            KernelVariant::Klk => "klk",
        })
    }
}

impl FromStr for KernelVariant {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s" | "s_raw" => Ok(KernelVariant::SRaw),
            "k1" => Ok(KernelVariant::K1),
            "k2" => Ok(KernelVariant::K2),
            "klk" => Ok(KernelVariant::Klk),
            other => domain(format!("unknown kernel `{other}`")),
        }
    }
}

/// A kernel `t -> K(t)` on F_q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelSpec {
    pub variant: KernelVariant,
    pub a: u64,
    pub b: u64,
    pub k: u32,
    pub modulus: PrimeModulus,
}

impl KernelSpec {
    pub fn k1(a: u64, b: u64, modulus: &PrimeModulus) -> Result<Self> {
        Self::new(KernelVariant::K1, a, b, 0, modulus)
    }

    pub fn k2(a: u64, b: u64, modulus: &PrimeModulus) -> Result<Self> {
        Self::new(KernelVariant::K2, a, b, 0, modulus)
    }

    pub fn klk(k: u32, modulus: &PrimeModulus) -> Result<Self> {
        Self::new(KernelVariant::Klk, 1, 1, k, modulus)
    }

    pub fn new(
        variant: KernelVariant,
        a: u64,
        b: u64,
        k: u32,
        modulus: &PrimeModulus,
    ) -> Result<Self> {
        let q = modulus.q();
        let spec = Self {
            variant,
            a: a % q,
            b: b % q,
            k,
            modulus: modulus.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.variant {
            KernelVariant::K1 | KernelVariant::K2 if self.a == 0 || self.b == 0 => domain(format!(
                "{} needs a, b coprime to q = {} (got a = {}, b = {})",
                self.variant,
                self.modulus.q(),
                self.a,
                self.b
            )),
            KernelVariant::Klk if !(1..=3).contains(&self.k) => {
                domain(format!("Kl_k needs 1 <= k <= 3, got {}", self.k))
            }
            _ => Ok(()),
        }
    }

    /// A priori bound on `|K(t)|`: Weil for the `S` kernels, Deligne for `Kl_k`.
    pub fn bound(&self) -> f64 {
        match self.variant {
            KernelVariant::SRaw => 3.0 * (self.modulus.q() as f64).sqrt(),
            KernelVariant::K1 | KernelVariant::K2 => 3.0,
            KernelVariant::Klk => self.k as f64,
        }
    }

    /// Same kernel with `a` replaced by `eta * a`.
    pub fn twisted(&self, eta: u64) -> Self {
        Self {
            a: self.modulus.mul(self.a, eta),
            ..self.clone()
        }
    }
}

/// Evaluate `K(t)` directly.
pub fn kernel_eval(ctx: &ExpSumContext, spec: &KernelSpec, t: u64) -> Result<ComplexVal> {
    spec.validate()?;
    if ctx.q() != spec.modulus.q() {
        return domain("kernel modulus does not match context");
    }
    let m = &spec.modulus;
    let norm = (ctx.q() as f64).sqrt();
    Ok(match spec.variant {
        KernelVariant::SRaw => ctx.s_sum(spec.a, m.mul(spec.b, t)),
        KernelVariant::K1 => ctx.s_sum(spec.a, m.mul(spec.b, t)) / norm,
        KernelVariant::K2 => ctx.s_sum(m.mul(spec.a, t), spec.b) / norm,
        KernelVariant::Klk => ctx.kloosterman_k(t, spec.k)?,
    })
}

/// `K(t)` for every `t` in F_q, built from one length-`q` transform.
///
/// For `Kl_k` the `t = 0` entry is NaN (the sum is undefined there).
#[derive(Clone, Debug)]
pub struct KernelTable {
    values: Vec<ComplexVal>,
}

impl KernelTable {
    pub fn build(ctx: &ExpSumContext, spec: &KernelSpec) -> Result<Self> {
        spec.validate()?;
        let q = ctx.q();
        let m = ctx.modulus();
        let qu = q as usize;
        let norm = (q as f64).sqrt();
        let zero = Complex64::new(0.0, 0.0);
        let values = match spec.variant {
            KernelVariant::SRaw | KernelVariant::K1 => {
                let row = ctx.s_row(spec.a);
                let scale = if spec.variant == KernelVariant::K1 {
                    1.0 / norm
                } else {
                    1.0
                };
                (0..q)
                    .map(|t| row[m.mul(spec.b, t) as usize] * scale)
                    .collect()
            }
            KernelVariant::K2 => {
                // S(m, b) = sum_v e_q(m v) w_v with w_v = sum over u^{-2} = v of e_q(b u)
                let mut w = vec![zero; qu];
                for u in 1..q {
                    w[ctx.inv_sq(u) as usize] += ctx.e(m.mul(spec.b, u));
                }
                let col = dft_plus(&w, ctx.roots());
                (0..q)
                    .map(|t| col[m.mul(spec.a, t) as usize] / norm)
                    .collect()
            }
            KernelVariant::Klk => {
                let mut kl1: Vec<Complex64> = (0..q).map(|t| ctx.e(t)).collect();
                kl1[0] = Complex64::new(f64::NAN, f64::NAN);
                if spec.k == 1 {
                    kl1
                } else {
                    // Kl_2(t) = q^{-1/2} sum_v e_q(v^{-1}) e_q(t v)
                    let y: Vec<Complex64> = (0..q)
                        .map(|v| if v == 0 { zero } else { ctx.e(ctx.inv(v)) })
                        .collect();
                    let mut kl2: Vec<Complex64> = dft_plus(&y, ctx.roots())
                        .into_iter()
                        .map(|z| z / norm)
                        .collect();
                    kl2[0] = Complex64::new(f64::NAN, f64::NAN);
                    if spec.k == 2 {
                        kl2
                    } else {
                        if q > KL3_LIMIT.max(FAST_PATH_THRESHOLD as u64) {
                            return domain(format!("Kl_3 table needs q <= {FAST_PATH_THRESHOLD}"));
                        }
                        // Kl_3(t) = q^{-1/2} sum_u e_q(u) Kl_2(t / u)
                        let mut kl3: Vec<Complex64> = (0..q)
                            .map(|t| {
                                (1..q)
                                    .map(|u| ctx.e(u) * kl2[m.mul(t, ctx.inv(u)) as usize])
                                    .sum::<Complex64>()
                                    / norm
                            })
                            .collect();
                        kl3[0] = Complex64::new(f64::NAN, f64::NAN);
                        kl3
                    }
                }
            }
        };
        Ok(Self { values })
    }

    #[inline]
    pub fn get(&self, t: u64) -> ComplexVal {
        self.values[t as usize]
    }

    pub fn values(&self) -> &[ComplexVal] {
        &self.values
    }

    /// `max |K(t)|` over the finite entries.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .filter(|z| z.re.is_finite())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(q: u64) -> ExpSumContext {
        ExpSumContext::for_prime(q).unwrap()
    }

    // Straight from the definition, no shared tables.
    fn s_naive(m: i64, n: i64, q: u64) -> Complex64 {
        let pm = PrimeModulus::new(q).unwrap();
        (1..q)
            .map(|u| {
                let ui = pm.inv(u).unwrap();
                let arg = (pm.mul(pm.reduce(m), pm.mul(ui, ui)) + pm.mul(pm.reduce(n), u)) % q;
                Complex64::from_polar(1.0, std::f64::consts::TAU * arg as f64 / q as f64)
            })
            .sum()
    }

    #[test]
    fn closed_forms() {
        for q in [5u64, 7, 11, 101] {
            let c = ctx(q);
            assert!((c.s_sum(0, 0) - Complex64::new(q as f64 - 1.0, 0.0)).norm() < 1e-6);
            for n in 1..q {
                assert!((c.s_sum(0, n) + 1.0).norm() < 1e-6);
            }
            // The unit sum misses the x = 0 term of the quadratic Gauss sum.
            for m in 1..q {
                let gauss: Complex64 = (0..q).map(|x| c.e(m * x % q * x % q)).sum();
                assert!((c.s_sum(m, 0) - (gauss - 1.0)).norm() < 1e-6);
                let eps = if q % 4 == 1 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 1.0)
                };
                let chi = crate::modarith::legendre(Residue::new(m, q)) as f64;
                assert!((gauss - eps * chi * (q as f64).sqrt()).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn gauss_term_is_not_root_q() {
        // |S(m, 0; q)| = sqrt(q + 1) when q = 3 mod 4.
        let c = ctx(7);
        assert!((c.s_sum(1, 0).norm() - 8f64.sqrt()).abs() < 1e-9);
        assert!((c.s_sum(1, 0).norm() - 7f64.sqrt()).abs() > 0.1);
    }

    #[test]
    fn s_sum_small_oracle() {
        let c = ctx(7);
        let v = c.s_sum(1, 1);
        assert!((v - s_naive(1, 1, 7)).norm() < 1e-12);
        assert!(v.norm() <= 3.0 * 7f64.sqrt());
    }

    #[test]
    fn row_matches_pointwise() {
        for q in [7u64, 101, 211] {
            let c = ctx(q);
            for m in [1, 2, q - 1] {
                let row = c.s_row(m);
                for n in 0..q {
                    assert!((row[n as usize] - c.s_sum(m, n)).norm() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn row_parseval_and_gauss() {
        for q in [101u64, 4099, 4129] {
            let c = ctx(q);
            let row = c.s_row(3);
            let energy: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            let expect = (q * (q - 1)) as f64;
            assert!((energy - expect).abs() <= 1e-4 * expect.max(1.0), "q={q}");
            assert!((row[0] - c.s_sum(3, 0)).norm() < 1e-6);
        }
    }

    #[test]
    fn fast_row_matches_direct_row() {
        let c = ctx(4127);
        let fast = c.s_row(5);
        let slow = c.s_row_direct(5);
        let err = fast
            .iter()
            .zip(&slow)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn kernel_definitions() {
        let q = 101;
        let c = ctx(q);
        let pm = c.modulus().clone();
        let k1 = KernelSpec::k1(2, 3, &pm).unwrap();
        let k2 = KernelSpec::k2(2, 3, &pm).unwrap();
        let t1 = KernelTable::build(&c, &k1).unwrap();
        let t2 = KernelTable::build(&c, &k2).unwrap();
        for t in 0..q {
            let v1 = kernel_eval(&c, &k1, t).unwrap();
            assert!((v1 * (q as f64).sqrt() - c.s_sum(2, 3 * t)).norm() < 1e-9);
            assert!((t1.get(t) - v1).norm() < 1e-9);
            let v2 = kernel_eval(&c, &k2, t).unwrap();
            assert!((t2.get(t) - v2).norm() < 1e-9);
            assert!(v1.norm() <= 3.0 + 1e-9 && v2.norm() <= 3.0 + 1e-9);
        }
    }

    #[test]
    fn k2_linear_change_of_variables() {
        let q = 53u64;
        let c = ctx(q);
        let pm = c.modulus().clone();
        let (a, b) = (5u64, 7u64);
        let k2 = KernelSpec::k2(a, b, &pm).unwrap();
        for (s, t0) in [(1u64, 1u64), (3, 4), (10, 52), (0, 9)] {
            let t = pm.mul(s, pm.mul(t0, t0));
            let lhs = kernel_eval(&c, &k2, t).unwrap();
            let coef = pm.mul(a, pm.mul(pm.mul(b, b), s));
            let rhs = c.s_sum(coef, t0) / (q as f64).sqrt();
            assert!((lhs - rhs).norm() < 1e-9, "s={s} t0={t0}");
        }
    }

    #[test]
    fn k2_of_eta_square_is_twisted_k1() {
        let q = 61u64;
        let c = ctx(q);
        let pm = c.modulus().clone();
        let xi = crate::modarith::least_nonresidue(q).value();
        let k2 = KernelSpec::k2(3, 5, &pm).unwrap();
        for eta in [1, xi] {
            let k1eta = KernelSpec::k1(pm.mul(3, eta), 5, &pm).unwrap();
            for t in 1..q {
                let lhs = kernel_eval(&c, &k2, pm.mul(eta, pm.mul(t, t))).unwrap();
                let rhs = kernel_eval(&c, &k1eta, t).unwrap();
                assert!((lhs - rhs).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn invalid_specs() {
        let pm = PrimeModulus::new(7).unwrap();
        assert!(KernelSpec::k1(0, 1, &pm).is_err());
        assert!(KernelSpec::k2(1, 7, &pm).is_err());
        assert!(KernelSpec::klk(4, &pm).is_err());
        assert!(KernelSpec::new(KernelVariant::SRaw, 0, 0, 0, &pm).is_ok());
    }

    #[test]
    fn hyper_kloosterman() {
        let q = 13u64;
        let c = ctx(q);
        for t in 1..q {
            let k1 = c.kloosterman_k(t, 1).unwrap();
            assert!((k1 - c.e(t)).norm() < 1e-12);
            let k2 = c.kloosterman_k(t, 2).unwrap();
            assert!(k2.im.abs() < 1e-9);
            assert!(k2.norm() <= 2.0 + 1e-9);
            let k3 = c.kloosterman_k(t, 3).unwrap();
            assert!(k3.norm() <= 3.0 + 1e-9);
        }
        assert!(c.kloosterman_k(0, 2).is_err());
        assert!(c.kloosterman_k(1, 4).is_err());
        assert!(ctx(601).kloosterman_k(1, 3).is_err());
    }

    #[test]
    fn kloosterman_table_matches_brute_force() {
        let q = 31u64;
        let c = ctx(q);
        let pm = c.modulus().clone();
        for k in 1..=3 {
            let table = KernelTable::build(&c, &KernelSpec::klk(k, &pm).unwrap()).unwrap();
            assert!(table.get(0).re.is_nan());
            for t in 1..q {
                let brute = c.kloosterman_k(t, k).unwrap();
                assert!((table.get(t) - brute).norm() < 1e-9, "k={k} t={t}");
            }
        }
    }

    #[test]
    fn variant_parsing() {
        for v in [
            KernelVariant::SRaw,
            KernelVariant::K1,
            KernelVariant::K2,
            KernelVariant::Klk,
        ] {
            assert_eq!(v.to_string().parse::<KernelVariant>().unwrap(), v);
        }
        assert!("k9".parse::<KernelVariant>().is_err());
    }

    #[test]
    fn conjugation_symmetry_sample() {
        let q = 101u64;
        let c = ctx(q);
        for (m, n) in [(1u64, 2u64), (17, 0), (0, 5), (99, 98)] {
            let a = c.s_sum((q - m) % q, (q - n) % q);
            let b = c.s_sum(m, n).conj();
            assert!((a - b).norm() < 1e-9);
        }
    }
}
