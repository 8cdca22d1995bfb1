use num_traits::Signed;
use serde::Serialize;

use super::mobius::mobius_sieve;
use super::progression::{
    error_term_decomp, error_terms_direct, hooley_bound, rational_to_f64, Rational,
};
use crate::error::{LabError, Result};
use crate::modarith::{next_prime, PrimeModulus};

/// Exponent of distribution singled out in sweep output.
pub const HEADLINE_THETA: f64 = 13.0 / 19.0;

/// Largest `X` in a sweep grid.
pub const SWEEP_X_LIMIT: u64 = 100_000_000;

/// Sweep configuration, read from flat `key = value` text. Lists are comma
/// separated; exponents may be written as fractions (`13/19`).
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub x_grid: Vec<u64>,
    /// `(as written, value)`
    pub theta_grid: Vec<(String, f64)>,
    pub a_list: Vec<f64>,
    pub seed: u64,
    /// Not part of the canonical form: output never depends on it.
    pub workers: Option<usize>,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Config(msg.into()))
}

fn parse_theta(s: &str) -> Result<f64> {
    let v = match s.split_once('/') {
        Some((p, q)) => match (p.trim().parse::<f64>(), q.trim().parse::<f64>()) {
            (Ok(p), Ok(q)) if q != 0.0 => p / q,
            _ => return config_err(format!("bad exponent `{s}`")),
        },
        None => s
            .parse::<f64>()
            .map_err(|_| LabError::Config(format!("bad exponent `{s}`")))?,
    };
    if !(v > 0.0 && v < 1.0) {
        return config_err(format!("exponent `{s}` outside (0, 1)"));
    }
    Ok(v)
}

fn parse_list<T>(key: &str, v: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let out: Vec<T> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(f)
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return config_err(format!("`{key}` is empty"));
    }
    Ok(out)
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let (mut x_grid, mut theta_grid, mut a_list, mut seed, mut workers) =
            (None, None, None, 0u64, None);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return config_err(format!(
                    "line {}: expected key=value, got `{raw}`",
                    lineno + 1
                ));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "X_grid" => {
                    x_grid = Some(parse_list(key, value, |s| {
                        let x: f64 = s
                            .parse()
                            .map_err(|_| LabError::Config(format!("bad X `{s}`")))?;
                        if x.fract() != 0.0 || !(1.0..=SWEEP_X_LIMIT as f64).contains(&x) {
                            return config_err(format!(
                                "X `{s}` must be an integer in 1..={SWEEP_X_LIMIT}"
                            ));
                        }
                        Ok(x as u64)
                    })?)
                }
                "theta_grid" => {
                    theta_grid = Some(parse_list(key, value, |s| {
                        Ok((s.replace(' ', ""), parse_theta(s)?))
                    })?)
                }
                "A_list" => {
                    a_list = Some(parse_list(key, value, |s| match s.parse::<f64>() {
                        Ok(a) if a > 0.0 => Ok(a),
                        _ => config_err(format!("A `{s}` must be positive")),
                    })?)
                }
                "seed" => {
                    seed = value
                        .parse()
                        .map_err(|_| LabError::Config(format!("bad seed `{value}`")))?
                }
                "workers" => match value.parse::<usize>() {
                    Ok(w) if w > 0 => workers = Some(w),
                    _ => {
                        return config_err(format!("workers `{value}` must be a positive integer"))
                    }
                },
                other => return config_err(format!("line {}: unknown key `{other}`", lineno + 1)),
            }
        }
        Ok(Self {
            x_grid: x_grid.ok_or_else(|| LabError::Config("missing `X_grid`".into()))?,
            theta_grid: theta_grid
                .ok_or_else(|| LabError::Config("missing `theta_grid`".into()))?,
            a_list: a_list.unwrap_or_else(|| vec![1.0, 2.0, 5.0]),
            seed,
            workers,
        })
    }

    /// Normalized text form; identical configurations give identical bytes.
    pub fn canonical(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        format!(
            "X_grid={}\ntheta_grid={}\nA_list={}\nseed={}\n",
            join(self.x_grid.iter().map(u64::to_string).collect()),
            join(self.theta_grid.iter().map(|(s, _)| s.clone()).collect()),
            join(self.a_list.iter().map(f64::to_string).collect()),
            self.seed
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRecord {
    #[serde(rename = "X")]
    pub x: u64,
    pub theta: String,
    pub theta_value: f64,
    pub q: u64,
    /// Unit attaining `max_a |E(X, q, a)|` (smallest on ties).
    pub a: u64,
    pub e_direct: Rational,
    pub e_decomp: Rational,
    pub max_abs_e: f64,
    pub hooley_bound: f64,
    pub ratio: f64,
    /// `(A, X / (q log^A X))`
    pub log_columns: Vec<(f64, f64)>,
    pub headline: bool,
}

fn sweep_cell(x: u64, theta: &(String, f64), a_list: &[f64]) -> Result<SweepRecord> {
    let q = next_prime((x as f64).powf(theta.1).ceil() as u64);
    if q >= x {
        return Err(LabError::Domain(format!(
            "X = {x}, theta = {}: prime {q} is not below X",
            theta.0
        )));
    }
    let pm = PrimeModulus::new(q)?;
    let direct = error_terms_direct(x, &pm)?;
    let (idx, e_direct) =
        direct
            .iter()
            .enumerate()
            .fold((0, Rational::from_integer(0)), |best, (i, e)| {
                if e.abs() > best.1.abs() {
                    (i, *e)
                } else {
                    best
                }
            });
    let a = idx as u64 + 1;
    let root = (x as f64).sqrt() as u64 + 1;
    let mu = mobius_sieve(root)?;
    let e_decomp = error_term_decomp(x, &pm, a, mu.values());
    let hb = hooley_bound(x, q);
    let max_abs_e = rational_to_f64(&e_direct).abs();
    let lx = (x as f64).ln();
    Ok(SweepRecord {
        x,
        theta: theta.0.clone(),
        theta_value: theta.1,
        q,
        a,
        e_direct,
        e_decomp,
        max_abs_e,
        hooley_bound: hb,
        ratio: max_abs_e / hb,
        log_columns: a_list
            .iter()
            .map(|&big_a| (big_a, x as f64 / (q as f64 * lx.powf(big_a))))
            .collect(),
        headline: (theta.1 - HEADLINE_THETA).abs() < 1e-9,
    })
}

/// For each `(X, theta)`: the smallest prime `q >= X^theta`, the largest
/// `|E(X, q, a)|` over units `a` (with the decomposition recomputed at the
/// maximizer), and comparison columns. Sorted by `(X, theta, q, a)`.
pub fn exponent_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let mut cells: Vec<(u64, &(String, f64))> = cfg
        .x_grid
        .iter()
        .flat_map(|&x| cfg.theta_grid.iter().map(move |t| (x, t)))
        .collect();
    cells.sort_by(|a, b| a.0.cmp(&b.0).then(a.1 .1.total_cmp(&b.1 .1)));
    cells.dedup_by(|a, b| a.0 == b.0 && a.1 .1 == b.1 .1);
    let mut out: Vec<SweepRecord> = cells
        .into_iter()
        .map(|(x, t)| sweep_cell(x, t, &cfg.a_list))
        .collect::<Result<_>>()?;
    out.sort_by(|r, s| {
        (r.x, r.theta_value, r.q, r.a)
            .partial_cmp(&(s.x, s.theta_value, s.q, s.a))
            .unwrap()
    });
    Ok(out)
}
