use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::diagonal::{all_quadruples, diagonal_set, DiagonalSet, Quadruple};
use super::sigma::SigmaEngine;
use crate::error::Result;
use crate::expsum::{ExpSumContext, KernelSpec};
use crate::rng::task_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Exhaustive,
    Sampled,
    /// Every quadruple for this `B` is diagonal.
    Empty,
}

#[derive(Clone, Copy, Debug)]
pub struct ScanPlan {
    /// Exhaustive when `|B \ B^Delta| * q <= budget`.
    pub budget: u64,
    pub samples: usize,
    pub h_samples: usize,
    pub seed: u64,
}

impl Default for ScanPlan {
    fn default() -> Self {
        Self {
            budget: 20_000,
            samples: 500,
            h_samples: 50,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub q: u64,
    pub j: u32,
    #[serde(rename = "B")]
    pub big_b: u64,
    pub b1: u64,
    pub b2: u64,
    pub b3: u64,
    pub b4: u64,
    pub h: u64,
    pub abs_sigma: f64,
    pub ratio: f64,
    pub in_diagonal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub q: u64,
    pub j: u32,
    pub big_b: u64,
    pub mode: ScanMode,
    pub nondiagonal: usize,
    pub diagonal: usize,
    pub evaluated: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub witness: Option<(Quadruple, u64)>,
    #[serde(skip)]
    pub rows: Vec<ScanRow>,
}

fn rows_for(
    engine: &SigmaEngine,
    big_b: u64,
    b: &Quadruple,
    hs: &[u64],
    in_diagonal: bool,
) -> Vec<ScanRow> {
    let q = engine.q();
    let all = engine.all_h(b);
    hs.iter()
        .map(|&h| {
            let abs_sigma = all[h as usize].norm();
            ScanRow {
                q,
                j: engine.j(),
                big_b,
                b1: b.0[0],
                b2: b.0[1],
                b3: b.0[2],
                b4: b.0[3],
                h,
                abs_sigma,
                ratio: abs_sigma / q as f64,
                in_diagonal,
            }
        })
        .collect()
}

fn summarize(
    engine: &SigmaEngine,
    big_b: u64,
    mode: ScanMode,
    diag: &DiagonalSet,
    nondiagonal: usize,
    rows: Vec<ScanRow>,
) -> ScanReport {
    let mut max_ratio = 0.0;
    let mut witness = None;
    for row in &rows {
        if row.ratio > max_ratio || witness.is_none() {
            max_ratio = row.ratio;
            witness = Some((Quadruple([row.b1, row.b2, row.b3, row.b4]), row.h));
        }
    }
    let mean_ratio = if rows.is_empty() {
        0.0
    } else {
        rows.iter().map(|r| r.ratio).sum::<f64>() / rows.len() as f64
    };
    ScanReport {
        q: engine.q(),
        j: engine.j(),
        big_b,
        mode,
        nondiagonal,
        diagonal: diag.len(),
        evaluated: rows.len(),
        max_ratio,
        mean_ratio,
        witness,
        rows,
    }
}

/// `|Sigma_j(K, b, h)| / q` over quadruples outside the diagonal set, either
/// for every `(b, h)` or for a seeded sample. Sample `i` draws from its own
/// stream, so the report does not depend on the worker count.
pub fn nondiagonal_scan(
    ctx: &ExpSumContext,
    spec: &KernelSpec,
    j: u32,
    big_b: u64,
    plan: &ScanPlan,
) -> Result<ScanReport> {
    let engine = SigmaEngine::new(ctx, spec, j)?;
    let diag = diagonal_set(big_b, ctx.modulus())?;
    nondiagonal_scan_with(&engine, &diag, plan)
}

pub fn nondiagonal_scan_with(
    engine: &SigmaEngine,
    diag: &DiagonalSet,
    plan: &ScanPlan,
) -> Result<ScanReport> {
    let q = engine.q();
    let big_b = diag.big_b;
    let candidates = diag.complement();
    if candidates.is_empty() {
        return Ok(summarize(
            engine,
            big_b,
            ScanMode::Empty,
            diag,
            0,
            Vec::new(),
        ));
    }
    let exhaustive = (candidates.len() as u64).saturating_mul(q) <= plan.budget;
    let rows: Vec<ScanRow> = if exhaustive {
        let hs: Vec<u64> = (0..q).collect();
        candidates
            .par_iter()
            .flat_map_iter(|b| rows_for(engine, big_b, b, &hs, false))
            .collect()
    } else {
        let h_count = plan.h_samples.min(q as usize);
        (0..plan.samples as u64)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut rng = task_rng(plan.seed, i);
                let b = candidates[rng.random_range(0..candidates.len())];
                let mut hs: Vec<u64> = sample(&mut rng, q as usize, h_count)
                    .into_iter()
                    .map(|h| h as u64)
                    .collect();
                hs.sort_unstable();
                rows_for(engine, big_b, &b, &hs, false)
            })
            .collect()
    };
    let mode = if exhaustive {
        ScanMode::Exhaustive
    } else {
        ScanMode::Sampled
    };
    Ok(summarize(engine, big_b, mode, diag, candidates.len(), rows))
}

/// `|Sigma_j(K, b, 0)| / q` over `b` in `D`: the contrast case where no
/// cancellation is expected.
pub fn diagonal_control(engine: &SigmaEngine, big_b: u64) -> ScanReport {
    let diag_d: Vec<Quadruple> = all_quadruples(big_b)
        .into_iter()
        .filter(Quadruple::in_d)
        .collect();
    let rows: Vec<ScanRow> = diag_d
        .par_iter()
        .flat_map_iter(|b| rows_for(engine, big_b, b, &[0], true))
        .collect();
    let d = DiagonalSet {
        members: diag_d.iter().copied().collect(),
        big_b,
        q: engine.q(),
    };
    summarize(engine, big_b, ScanMode::Exhaustive, &d, 0, rows)
}
