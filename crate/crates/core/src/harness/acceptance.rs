use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::meta::{with_workers, RunConfig, RunMeta};
use super::table::sweep_table;
use crate::bilinear::{
    diagonal_control, diagonal_set, fourth_moment_split, nondiagonal_scan_with, ScanMode, ScanPlan,
    SigmaEngine,
};
use crate::error::{LabError, Result};
use crate::expsum::{ExpSumContext, KernelSpec};
use crate::modarith::{rat_is_square_closure, PrimeModulus};
use crate::sqfree::{
    error_terms_all, exponent_sweep, mu_square_decomposition_check, rational_to_f64, s_v_direct,
    s_v_poisson, Rational, SweepConfig,
};
use crate::square_lemmas::{
    exception_set, f_alpha_beta_is_square, two_pole_is_square, TwoPoleSpec,
};

/// Checks that fail for a documented reason in the statement being checked.
pub const KNOWN_UNATTAINABLE: &[&str] = &["1c"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Lemmas,
    Bilinear,
    Sqfree,
    All,
}

impl std::str::FromStr for Suite {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Self::Identities),
            "lemmas" => Ok(Self::Lemmas),
            "bilinear" => Ok(Self::Bilinear),
            "sqfree" => Ok(Self::Sqfree),
            "all" => Ok(Self::All),
            other => Err(LabError::Config(format!("unknown suite `{other}`"))),
        }
    }
}

impl Suite {
    pub fn criteria(self) -> &'static [u32] {
        match self {
            Suite::Identities => &[1, 2, 3],
            Suite::Lemmas => &[5],
            Suite::Bilinear => &[4, 6, 7],
            Suite::Sqfree => &[8, 9, 10, 11],
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Check {
    pub fn known_unattainable(&self) -> bool {
        KNOWN_UNATTAINABLE.contains(&self.id.as_str())
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{status}] {:<4} {} ({:.2?}): {}",
            self.id, self.title, self.elapsed, self.detail
        )
    }
}

/// Run `f`, failing the check on error or when `budget` is exceeded.
fn timed(
    id: &str,
    title: &str,
    budget: Option<Duration>,
    f: impl FnOnce() -> Result<(bool, String)>,
) -> Check {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(b) = budget {
        if elapsed > b {
            passed = false;
            detail.push_str(&format!("; over runtime budget {b:?}"));
        }
    }
    Check {
        id: id.to_string(),
        title: title.to_string(),
        passed,
        detail,
        elapsed,
    }
}

const SEC: Duration = Duration::from_secs(1);

fn criterion_1() -> Vec<Check> {
    let primes = [5u64, 7, 11, 101];
    let contexts = || {
        primes
            .iter()
            .map(|&q| ExpSumContext::for_prime(q))
            .collect::<Result<Vec<_>>>()
    };
    let a = timed("1a", "S(0,0;q) = q-1", Some(5 * SEC), || {
        let mut worst = 0.0f64;
        for ctx in contexts()? {
            worst = worst.max(
                (ctx.s_sum(0, 0).re - (ctx.q() - 1) as f64)
                    .abs()
                    .max(ctx.s_sum(0, 0).im.abs()),
            );
        }
        Ok((
            worst <= 1e-6,
            format!("q in {primes:?}, max error {worst:.2e}"),
        ))
    });
    let b = timed("1b", "S(0,n;q) = -1 for n != 0", Some(5 * SEC), || {
        let mut worst = 0.0f64;
        for ctx in contexts()? {
            for n in 1..ctx.q() {
                worst = worst.max((ctx.s_sum(0, n) + 1.0).norm());
            }
        }
        Ok((worst <= 1e-6, format!("max error {worst:.2e}")))
    });
    let c = timed(
        "1c",
        "|S(m,0;q)| = sqrt(q) for m != 0",
        Some(5 * SEC),
        || {
            let (mut worst, mut worst_at, mut gauss) = (0.0f64, (0, 0), 0.0f64);
            for ctx in contexts()? {
                let root = (ctx.q() as f64).sqrt();
                for m in 1..ctx.q() {
                    let s = ctx.s_sum(m, 0);
                    let dev = (s.norm() - root).abs();
                    if dev > worst {
                        (worst, worst_at) = (dev, (m, ctx.q()));
                    }
                    // the sum over units misses x = 0 of the Gauss sum
                    gauss = gauss.max(((s + 1.0).norm() - root).abs());
                }
            }
            Ok((
                worst <= 1e-6,
                format!(
                    "max ||S(m,0)| - sqrt(q)| = {worst:.4} at (m,q) = {worst_at:?}; \
                 ||S(m,0) + 1| - sqrt(q)| <= {gauss:.1e} (S(m,0) is a Gauss sum minus 1)"
                ),
            ))
        },
    );
    vec![a, b, c]
}

fn criterion_2() -> Vec<Check> {
    vec![timed(
        "2",
        "Weil bound |S(m,n;101)| <= 3 sqrt(q), all m != 0",
        Some(30 * SEC),
        || {
            let ctx = ExpSumContext::for_prime(101)?;
            let bound = 3.0 * 101f64.sqrt();
            let worst = (1..101u64)
                .into_par_iter()
                .map(|m| {
                    (0..101u64)
                        .map(|n| ctx.s_sum(m, n).norm())
                        .fold(0.0, f64::max)
                })
                .reduce(|| 0.0, f64::max);
            Ok((
                worst <= bound + 1e-6,
                format!("max |S| = {worst:.4}, bound {bound:.4}"),
            ))
        },
    )]
}

fn criterion_3() -> Vec<Check> {
    vec![timed(
        "3",
        "Deligne bound |Kl_k(t)| <= k, q = 13, k in {2,3}",
        None,
        || {
            let ctx = ExpSumContext::for_prime(13)?;
            let mut ok = true;
            let mut detail = Vec::new();
            for k in [2u32, 3] {
                let mut worst = 0.0f64;
                for t in 1..13 {
                    worst = worst.max(ctx.kloosterman_k(t, k)?.norm());
                }
                ok &= worst <= k as f64 + 1e-6;
                detail.push(format!("k={k}: max {worst:.4}"));
            }
            Ok((ok, detail.join(", ")))
        },
    )]
}

fn criterion_4() -> Vec<Check> {
    vec![timed(
        "4",
        "fourth-moment split, q in {5,7,13}, all unit (a,b)",
        Some(60 * SEC),
        || {
            let mut worst = 0.0f64;
            let mut cases = 0;
            for q in [5u64, 7, 13] {
                let ctx = ExpSumContext::for_prime(q)?;
                let pairs: Vec<(u64, u64)> =
                    (1..q).flat_map(|a| (1..q).map(move |b| (a, b))).collect();
                let errs = pairs
                    .par_iter()
                    .map(|&(a, b)| {
                        let spec = KernelSpec::k1(a, b, ctx.modulus())?;
                        let (lhs, rhs) = fourth_moment_split(&ctx, &spec)?;
                        Ok((lhs - rhs).norm())
                    })
                    .collect::<Result<Vec<f64>>>()?;
                cases += errs.len();
                worst = errs.into_iter().fold(worst, f64::max);
            }
            Ok((
                worst <= 1e-6,
                format!("{cases} cases, max |lhs - rhs| = {worst:.2e}"),
            ))
        },
    )]
}

fn criterion_5() -> Vec<Check> {
    let a = timed(
        "5a",
        "two-pole criterion agrees with the square test, q in {5,7}",
        None,
        || {
            let (mut total, mut mismatches) = (0, 0);
            for q in [5u64, 7] {
                for a in 1..q {
                    for b in 1..q {
                        for r1 in 0..q {
                            for r2 in 0..q {
                                if r1 == r2 {
                                    continue;
                                }
                                let spec = TwoPoleSpec::new(a, b, r1, r2, q)?;
                                total += 1;
                                if two_pole_is_square(&spec)
                                    != rat_is_square_closure(&spec.function())?.is_square
                                {
                                    mismatches += 1;
                                }
                            }
                        }
                    }
                }
            }
            Ok((
                mismatches == 0,
                format!("{total} specs, {mismatches} mismatches"),
            ))
        },
    );
    let b = timed(
        "5b",
        "square f_(alpha,beta) lies in the exception set, |E| <= 14",
        None,
        || {
            let mut ok = true;
            let mut detail = Vec::new();
            for q in [5u64, 7, 11, 13] {
                let pm = PrimeModulus::new(q)?;
                let set = exception_set(&pm)?;
                let mut squares = 0;
                for alpha in 0..q {
                    for beta in 0..q {
                        if f_alpha_beta_is_square(alpha, beta, &pm) == Some(true) {
                            squares += 1;
                            ok &= set.contains(alpha, beta);
                        }
                    }
                }
                ok &= set.len() <= 14;
                detail.push(format!("q={q}: {squares} squares, |E|={}", set.len()));
            }
            Ok((ok, detail.join("; ")))
        },
    );
    vec![a, b]
}

fn criterion_6() -> Vec<Check> {
    vec![timed(
        "6",
        "|diagonal set| <= 30 B^2, B in {4,8,16}, q in {53,101}",
        None,
        || {
            let mut ok = true;
            let mut detail = Vec::new();
            for q in [53u64, 101] {
                let pm = PrimeModulus::new(q)?;
                for big_b in [4u64, 8, 16] {
                    let n = diagonal_set(big_b, &pm)?.len() as u64;
                    ok &= n <= 30 * big_b * big_b;
                    detail.push(format!("q={q},B={big_b}: {n}/{}", 30 * big_b * big_b));
                }
            }
            Ok((ok, detail.join(", ")))
        },
    )]
}

/// Calibrate at q = 53 exhaustively, then compare seeded samples at larger q.
fn complete_sum_scale(j: u32, k2: bool, seed: u64) -> Result<(bool, String)> {
    let big_b = 6;
    let engine_for = |q: u64| -> Result<(SigmaEngine, PrimeModulus)> {
        let ctx = ExpSumContext::for_prime(q)?;
        let spec = if k2 {
            KernelSpec::k2(1, 1, ctx.modulus())?
        } else {
            KernelSpec::k1(1, 1, ctx.modulus())?
        };
        Ok((SigmaEngine::new(&ctx, &spec, j)?, ctx.modulus().clone()))
    };
    let (engine, pm) = engine_for(53)?;
    let calib = nondiagonal_scan_with(
        &engine,
        &diagonal_set(big_b, &pm)?,
        &ScanPlan {
            budget: u64::MAX,
            ..Default::default()
        },
    )?;
    if calib.mode != ScanMode::Exhaustive {
        return Err(LabError::Numeric(
            "calibration scan was not exhaustive".into(),
        ));
    }
    let c = calib.max_ratio;
    let mut ok = true;
    let mut detail = vec![format!(
        "C = {c:.4} (q=53, {} quadruples)",
        calib.nondiagonal
    )];
    for q in [101u64, 199] {
        let (engine, pm) = engine_for(q)?;
        let plan = ScanPlan {
            budget: 0,
            samples: 500,
            h_samples: 50,
            seed,
        };
        let rep = nondiagonal_scan_with(&engine, &diagonal_set(big_b, &pm)?, &plan)?;
        ok &= rep.max_ratio <= 1.5 * c;
        let control = diagonal_control(&engine, big_b).max_ratio;
        detail.push(format!(
            "q={q}: max {:.4} = {:.3} C, diagonal control {:.1}x",
            rep.max_ratio,
            rep.max_ratio / c,
            control / rep.max_ratio
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn criterion_7() -> Vec<Check> {
    let budget = Some(Duration::from_secs(600));
    vec![
        timed(
            "7a",
            "Sigma_2(K2(1,1)) / q stays within 1.5 C",
            budget,
            || complete_sum_scale(2, true, 7),
        ),
        timed(
            "7b",
            "Sigma_1(K1(1,1)) / q stays within 1.5 C",
            budget,
            || complete_sum_scale(1, false, 7),
        ),
    ]
}

fn criterion_8() -> Vec<Check> {
    vec![timed(
        "8",
        "Poisson dual sum matches the direct count, q = 101, M = N = 10, T = 8",
        None,
        || {
            let ctx = ExpSumContext::for_prime(101)?;
            let mut ok = true;
            let mut detail = Vec::new();
            for a in [1u64, 2] {
                let direct = s_v_direct(10.0, 10.0, &ctx, a)?;
                let dual = s_v_poisson(10.0, 10.0, &ctx, a, 8)?;
                let finer = s_v_poisson(10.0, 10.0, &ctx, a, 16)?;
                let err = (direct - dual.value.re).abs();
                let tol = 1e-4f64.max(1e-3 * direct.abs());
                let change = (finer.value - dual.value).norm();
                ok &= err <= tol && dual.tail_estimate > change;
                detail.push(format!(
                "a={a}: direct {direct:.6}, dual {:.6}{:+.1e}i, err {err:.1e} (tol {tol:.1e}), T->16 change {change:.1e} < tail {:.2e}",
                dual.value.re, dual.value.im, dual.tail_estimate
            ));
            }
            Ok((ok, detail.join("; ")))
        },
    )]
}

fn criterion_9() -> Vec<Check> {
    vec![timed(
        "9",
        "mu^2 decomposition for all n <= 10^5",
        Some(10 * SEC),
        || {
            let failures = (1..=100_000u64)
                .into_par_iter()
                .map(|n| mu_square_decomposition_check(n).map(|ok| u64::from(!ok)))
                .collect::<Result<Vec<u64>>>()?
                .into_iter()
                .sum::<u64>();
            Ok((failures == 0, format!("{failures} failures")))
        },
    )]
}

fn criterion_10() -> Vec<Check> {
    let budget = Some(Duration::from_secs(120));
    let a = timed(
        "10a",
        "E(X,q,a) two ways, exact, X = 10^4, q in {101,211}",
        budget,
        || {
            let mut ok = true;
            let mut detail = Vec::new();
            for q in [101u64, 211] {
                let recs = error_terms_all(10_000, &PrimeModulus::new(q)?)?;
                let agree = recs.iter().filter(|r| r.agrees()).count();
                let total: Rational = recs.iter().map(|r| r.e_direct).sum();
                ok &= agree == recs.len() && total == Rational::from_integer(0);
                detail.push(format!(
                    "q={q}: {agree}/{} equal, sum_a E = {total}",
                    recs.len()
                ));
            }
            Ok((ok, detail.join("; ")))
        },
    );
    let b = timed(
        "10b",
        "max_a |E| / Hooley bound at X = 10^6, q = 1009",
        budget,
        || {
            let recs = error_terms_all(1_000_000, &PrimeModulus::new(1009)?)?;
            let worst = recs
                .iter()
                .max_by(|r, s| r.ratio.total_cmp(&s.ratio))
                .expect("q > 2 has units");
            let exact = recs.iter().all(|r| r.agrees());
            Ok((
            worst.ratio.is_finite() && exact,
            format!(
                "max ratio {:.4} at a = {} (|E| = {:.3}, bound {:.3}); both paths equal for all a: {exact}",
                worst.ratio,
                worst.a,
                rational_to_f64(&worst.e_direct).abs(),
                worst.hooley_bound
            ),
        ))
        },
    );
    vec![a, b]
}

/// Fixed sweep used by the determinism check.
pub const DETERMINISM_SWEEP: &str =
    "X_grid = 100000, 1000000\ntheta_grid = 0.5, 13/19\nA_list = 1, 2, 5\nseed = 2024\n";

/// Render a sweep exactly as the `sweep` command does.
pub fn render_sweep_csv(cfg: &SweepConfig, workers: usize) -> Result<Vec<u8>> {
    let run = sweep_run_config(cfg, workers);
    let records = with_workers(workers, || exponent_sweep(cfg))??;
    let mut buf = Vec::new();
    sweep_table(&records, &cfg.a_list).write_csv(&RunMeta::for_config(&run), &mut buf)?;
    Ok(buf)
}

pub fn sweep_run_config(cfg: &SweepConfig, workers: usize) -> RunConfig {
    RunConfig::new("sweep", cfg.seed, workers).param("config", cfg.canonical())
}

fn criterion_11() -> Vec<Check> {
    vec![timed(
        "11",
        "sweep CSV is byte-identical for 1 and 8 workers",
        None,
        || {
            let cfg = SweepConfig::parse(DETERMINISM_SWEEP)?;
            let one = render_sweep_csv(&cfg, 1)?;
            let eight = render_sweep_csv(&cfg, 8)?;
            let rows = one
                .iter()
                .filter(|&&b| b == b'\n')
                .count()
                .saturating_sub(1);
            Ok((
                one == eight,
                format!(
                    "{rows} rows, {} bytes, identical: {}",
                    one.len(),
                    one == eight
                ),
            ))
        },
    )]
}

pub fn run_criterion(n: u32) -> Vec<Check> {
    match n {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        _ => Vec::new(),
    }
}

pub fn run_suite(suite: Suite) -> Vec<Check> {
    suite
        .criteria()
        .iter()
        .flat_map(|&n| run_criterion(n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_cover_all_criteria() {
        let mut seen: Vec<u32> = [
            Suite::Identities,
            Suite::Lemmas,
            Suite::Bilinear,
            Suite::Sqfree,
        ]
        .iter()
        .flat_map(|s| s.criteria().iter().copied())
        .collect();
        seen.sort_unstable();
        assert_eq!(seen, Suite::All.criteria());
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn timed_reports_errors_and_budget() {
        let c = timed("x", "t", None, || Err(LabError::Numeric("boom".into())));
        assert!(!c.passed && c.detail.contains("boom"));
        let c = timed("y", "t", Some(Duration::ZERO), || {
            std::thread::sleep(Duration::from_millis(2));
            Ok((true, String::new()))
        });
        assert!(!c.passed && c.detail.contains("budget"));
        assert!(c.to_string().starts_with("[FAIL] y"));
    }
}
