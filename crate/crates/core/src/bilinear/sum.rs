use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::expsum::{ComplexVal, ExpSumContext, KernelSpec, KernelTable};
use crate::rng::task_rng;

/// Largest modulus for the direct double loop.
pub const BILINEAR_LIMIT: u64 = 10_000;

/// How the coefficients `alpha_m` are generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaSpec {
    Ones,
    /// Uniform in the unit disc, one ChaCha stream per index.
    Random(u64),
}

impl std::str::FromStr for AlphaSpec {
    type Err = crate::LabError;
    fn from_str(s: &str) -> Result<Self> {
        if s == "ones" {
            return Ok(AlphaSpec::Ones);
        }
        match s.strip_prefix("random:").map(str::parse::<u64>) {
            Some(Ok(seed)) => Ok(AlphaSpec::Random(seed)),
            _ => domain(format!(
                "alpha must be `ones` or `random:<seed>`, got `{s}`"
            )),
        }
    }
}

impl AlphaSpec {
    /// `alpha_1 ..= alpha_M`, stored at index `m - 1`.
    pub fn generate(self, len: usize) -> Vec<ComplexVal> {
        match self {
            AlphaSpec::Ones => vec![Complex64::new(1.0, 0.0); len],
            AlphaSpec::Random(seed) => (0..len)
                .map(|i| {
                    let mut rng = task_rng(seed, i as u64);
                    let r: f64 = rng.random::<f64>().sqrt();
                    let theta: f64 = rng.random::<f64>() * TAU;
                    Complex64::from_polar(r, theta)
                })
                .collect(),
        }
    }
}

/// `sum_{m <= M} sum_{n in [n_start, n_start + N)} alpha_m K(m n^j)`.
#[derive(Clone, Debug)]
pub struct BilinearConfig {
    pub spec: KernelSpec,
    pub j: u32,
    pub n_start: u64,
    pub n_len: u64,
    /// `alpha_m` at index `m - 1`; `M` is the length.
    pub alpha: Vec<ComplexVal>,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct HypothesisFlags {
    pub m_le_n_squared: bool,
    pub n_lt_q: bool,
    /// `M N^j < q^{(j+2)/2}`
    pub range_condition: bool,
}

impl HypothesisFlags {
    pub fn all(&self) -> bool {
        self.m_le_n_squared && self.n_lt_q && self.range_condition
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BilinearResult {
    pub value: ComplexVal,
    pub abs: f64,
    pub alpha_l1: f64,
    pub alpha_l2: f64,
    /// `||alpha||_1 N ||K||_inf`
    pub trivial_bound: f64,
    /// `(||alpha||_1 ||alpha||_2)^{1/2} M^{1/4} N ||K||_inf`
    pub cauchy_bound: f64,
    /// Cauchy bound times `(q^{j+2} / (M^{j+1} N^{j+4}))^{1/(4(j+2))}`, without `||K||`.
    pub theorem_bound: f64,
    pub ratio: f64,
    pub flags: HypothesisFlags,
    pub warnings: Vec<String>,
}

pub fn hypothesis_flags(q: u64, j: u32, m: f64, n: f64) -> HypothesisFlags {
    let q = q as f64;
    HypothesisFlags {
        m_le_n_squared: 1.0 <= m && m <= n * n,
        n_lt_q: n < q,
        range_condition: m * n.powi(j as i32) < q.powf((j as f64 + 2.0) / 2.0),
    }
}

/// `(||a||_1 ||a||_2)^{1/2} M^{1/4} N (q^{j+2} / (M^{j+1} N^{j+4}))^{1/(4(j+2))}`
pub fn theorem_bound(q: u64, j: u32, m: f64, n: f64, l1: f64, l2: f64) -> f64 {
    let jf = j as f64;
    let saving = ((q as f64).powf(jf + 2.0) / (m.powf(jf + 1.0) * n.powf(jf + 4.0)))
        .powf(1.0 / (4.0 * (jf + 2.0)));
    (l1 * l2).sqrt() * m.powf(0.25) * n * saving
}

impl BilinearConfig {
    pub fn m_len(&self) -> usize {
        self.alpha.len()
    }

    fn validate(&self) -> Result<()> {
        let q = self.spec.modulus.q();
        if q > BILINEAR_LIMIT {
            return domain(format!("bilinear sum needs q <= {BILINEAR_LIMIT}"));
        }
        if !(1..=2).contains(&self.j) {
            return domain(format!("exponent j = {} outside 1..=2", self.j));
        }
        if self.alpha.is_empty() || self.n_len == 0 {
            return domain("empty summation range");
        }
        if self.n_start == 0 || self.n_start + self.n_len - 1 > q - 1 {
            return domain(format!(
                "interval [{}, {}] not inside [1, q-1]",
                self.n_start,
                self.n_start + self.n_len - 1
            ));
        }
        if self.spec.variant == crate::expsum::KernelVariant::Klk && self.alpha.len() as u64 >= q {
            return domain("Kl_k is undefined at 0; need M < q");
        }
        if self.alpha.iter().any(|a| a.norm() > 1.0 + 1e-12) {
            return domain("coefficients must satisfy |alpha_m| <= 1");
        }
        Ok(())
    }
}

/// Evaluate the bilinear sum from a kernel table and report it against the
/// trivial, Cauchy-Schwarz and theorem-shaped bounds. Violated theorem
/// hypotheses are reported as warnings.
pub fn bilinear_sum(ctx: &ExpSumContext, cfg: &BilinearConfig) -> Result<BilinearResult> {
    cfg.validate()?;
    let q = ctx.q();
    let pm = ctx.modulus();
    let table = KernelTable::build(ctx, &cfg.spec)?;
    let partials: Vec<Complex64> = cfg
        .alpha
        .par_iter()
        .enumerate()
        .map(|(i, &a)| {
            let m = (i as u64 + 1) % q;
            let inner: Complex64 = (cfg.n_start..cfg.n_start + cfg.n_len)
                .map(|n| table.get(pm.mul(m, pm.pow(n, cfg.j as u64))))
                .sum();
            a * inner
        })
        .collect();
    let value: Complex64 = partials.iter().sum();

    let (mf, nf) = (cfg.m_len() as f64, cfg.n_len as f64);
    let l1: f64 = cfg.alpha.iter().map(|a| a.norm()).sum();
    let l2: f64 = cfg.alpha.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let kinf = cfg.spec.bound();
    let flags = hypothesis_flags(q, cfg.j, mf, nf);
    let mut warnings = Vec::new();
    if !flags.m_le_n_squared {
        warnings.push("hypothesis 1 <= M <= N^2 fails".to_string());
    }
    if !flags.n_lt_q {
        warnings.push("hypothesis N < q fails".to_string());
    }
    if !flags.range_condition {
        warnings.push(format!(
            "hypothesis M N^{} < q^{}/2 fails",
            cfg.j,
            cfg.j + 2
        ));
    }
    let tb = theorem_bound(q, cfg.j, mf, nf, l1, l2);
    Ok(BilinearResult {
        value,
        abs: value.norm(),
        alpha_l1: l1,
        alpha_l2: l2,
        trivial_bound: l1 * nf * kinf,
        cauchy_bound: (l1 * l2).sqrt() * mf.powf(0.25) * nf * kinf,
        theorem_bound: tb,
        ratio: value.norm() / tb,
        flags,
        warnings,
    })
}

/// Shift parameters `A`, `B` for the shift-by-`ab` argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftParams {
    pub a: u64,
    pub b: u64,
}

impl ShiftParams {
    /// `A = N^{2/(j+2)} M^{-1/(j+2)}`, `B = N^{j/(j+2)} M^{1/(j+2)}`, rounded down (at least 1).
    pub fn choose(m: f64, n: f64, j: u32) -> Self {
        let jf = j as f64;
        let a = (n.powf(2.0 / (jf + 2.0)) * m.powf(-1.0 / (jf + 2.0)))
            .floor()
            .max(1.0);
        let b = (n.powf(jf / (jf + 2.0)) * m.powf(1.0 / (jf + 2.0)))
            .floor()
            .max(1.0);
        Self {
            a: a as u64,
            b: b as u64,
        }
    }

    /// `A B <= N` and `A^j M < q`.
    pub fn admissible(&self, m: f64, n: f64, j: u32, q: u64) -> bool {
        (self.a * self.b) as f64 <= n && (self.a as f64).powi(j as i32) * m < q as f64
    }

    /// Trivial bound on the diagonal contribution: `|B^Delta| A^j M q ||K||^4`.
    pub fn diagonal_bound(&self, diagonal_size: usize, m: f64, j: u32, q: u64, kinf: f64) -> f64 {
        diagonal_size as f64 * (self.a as f64).powi(j as i32) * m * q as f64 * kinf.powi(4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::kernel_eval;
    use crate::modarith::PrimeModulus;

    fn setup(q: u64) -> (ExpSumContext, PrimeModulus) {
        let pm = PrimeModulus::new(q).unwrap();
        (ExpSumContext::new(&pm).unwrap(), pm)
    }

    #[test]
    fn zero_coefficients_give_zero() {
        let (ctx, pm) = setup(101);
        let cfg = BilinearConfig {
            spec: KernelSpec::k2(1, 1, &pm).unwrap(),
            j: 2,
            n_start: 1,
            n_len: 10,
            alpha: vec![Complex64::new(0.0, 0.0); 10],
        };
        assert_eq!(bilinear_sum(&ctx, &cfg).unwrap().abs, 0.0);
    }

    #[test]
    fn matches_reversed_loop_resummation() {
        let (ctx, pm) = setup(101);
        let spec = KernelSpec::k2(1, 1, &pm).unwrap();
        let cfg = BilinearConfig {
            spec: spec.clone(),
            j: 2,
            n_start: 1,
            n_len: 10,
            alpha: AlphaSpec::Ones.generate(10),
        };
        let res = bilinear_sum(&ctx, &cfg).unwrap();
        // n outer, m inner, kernel from scratch
        let mut oracle = Complex64::new(0.0, 0.0);
        for n in (1..=10u64).rev() {
            for m in (1..=10u64).rev() {
                oracle += kernel_eval(&ctx, &spec, m * n * n % 101).unwrap();
            }
        }
        assert!((res.value - oracle).norm() < 1e-9);
        assert!(res.abs <= 3.0 * 10.0 * 10.0);
        assert!(res.abs <= res.trivial_bound);
    }

    #[test]
    fn warnings_instead_of_errors() {
        let (ctx, pm) = setup(101);
        let cfg = BilinearConfig {
            spec: KernelSpec::k1(1, 1, &pm).unwrap(),
            j: 1,
            n_start: 1,
            n_len: 3,
            alpha: AlphaSpec::Random(5).generate(50),
        };
        let res = bilinear_sum(&ctx, &cfg).unwrap();
        assert!(!res.flags.m_le_n_squared);
        assert!(!res.warnings.is_empty());
    }

    #[test]
    fn invalid_configs() {
        let (ctx, pm) = setup(101);
        let base = BilinearConfig {
            spec: KernelSpec::k1(1, 1, &pm).unwrap(),
            j: 1,
            n_start: 95,
            n_len: 10,
            alpha: AlphaSpec::Ones.generate(4),
        };
        assert!(bilinear_sum(&ctx, &base).is_err());
        let bad_alpha = BilinearConfig {
            n_start: 1,
            alpha: vec![Complex64::new(2.0, 0.0)],
            ..base.clone()
        };
        assert!(bilinear_sum(&ctx, &bad_alpha).is_err());
        let bad_j = BilinearConfig {
            n_start: 1,
            j: 3,
            ..base
        };
        assert!(bilinear_sum(&ctx, &bad_j).is_err());
    }

    #[test]
    fn random_alpha_in_unit_disc_and_reproducible() {
        let a = AlphaSpec::Random(11).generate(100);
        assert!(a.iter().all(|z| z.norm() <= 1.0));
        assert_eq!(a, AlphaSpec::Random(11).generate(100));
        assert_eq!(
            "random:11".parse::<AlphaSpec>().unwrap(),
            AlphaSpec::Random(11)
        );
        assert!("random:x".parse::<AlphaSpec>().is_err());
    }

    #[test]
    fn shift_choices() {
        // M = N = 64, j = 2: A = 64^{1/2} 64^{-1/4} = 2^{1.5}, B = 64^{1/2} 64^{1/4} = 2^{4.5}
        let s = ShiftParams::choose(64.0, 64.0, 2);
        assert_eq!(s, ShiftParams { a: 2, b: 22 });
        assert!(s.admissible(64.0, 64.0, 2, 1009));
        assert!(!s.admissible(64.0, 64.0, 2, 200));
    }

    #[test]
    fn theorem_exponent_forms_agree() {
        // j = 2: (q^4 / (M^3 N^6))^{1/16};  j = 1: (q^3 / (M^2 N^5))^{1/12}
        let (q, m, n) = (1009u64, 30.0, 40.0);
        let qf = q as f64;
        let t2 = theorem_bound(q, 2, m, n, 1.0, 1.0) / (m.powf(0.25) * n);
        assert!((t2 - (qf.powi(4) / (m.powi(3) * n.powi(6))).powf(1.0 / 16.0)).abs() < 1e-12);
        let t1 = theorem_bound(q, 1, m, n, 1.0, 1.0) / (m.powf(0.25) * n);
        assert!((t1 - (qf.powi(3) / (m.powi(2) * n.powi(5))).powf(1.0 / 12.0)).abs() < 1e-12);
    }
}
