use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::time::Instant;

use kloost_core::bilinear::{
    bilinear_sum, diagonal_set, nondiagonal_scan_with, AlphaSpec, BilinearConfig, ScanPlan,
    SigmaEngine,
};
use kloost_core::expsum::{ExpSumContext, KernelSpec, KernelVariant};
use kloost_core::harness::acceptance::{run_suite, sweep_run_config, Suite};
use kloost_core::harness::{
    error_table, scan_table, sweep_table, with_workers, OutputFormat, ResultStore, RunConfig,
    RunLogEntry, RunMeta, Table,
};
use kloost_core::modarith::PrimeModulus;
use kloost_core::sqfree::{
    error_term, error_terms_all, exponent_sweep, s_v_direct, s_v_poisson, SweepConfig,
};
use kloost_core::square_lemmas::exception_set;
use kloost_core::{LabError, Result};
use serde_json::json;

use crate::{Cli, Command};

pub fn exit_code(e: &LabError) -> u8 {
    match e {
        LabError::Domain(_) | LabError::Config(_) | LabError::Io(_) => 2,
        LabError::Numeric(_) | LabError::Capacity { .. } | LabError::Csv(_) | LabError::Json(_) => {
            3
        }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn kernel(name: &str, a: u64, b: u64, k: u32, pm: &PrimeModulus) -> Result<KernelSpec> {
    KernelSpec::new(name.parse::<KernelVariant>()?, a, b, k, pm)
}

/// A finished experiment: its table and a one-line summary.
struct Outcome {
    table: Table,
    summary: serde_json::Value,
    line: String,
}

fn run_config(cli: &Cli, seed: u64, workers: usize) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(command_name(&cli.command), seed, workers)
        .param("args", format!("{:?}", cli.command));
    cfg.output = cli.output.clone();
    cfg.format = cli.format.parse::<OutputFormat>()?;
    Ok(cfg)
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Expsum { .. } => "expsum",
        Command::Exceptions { .. } => "exceptions",
        Command::Bilinear { .. } => "bilinear",
        Command::Scan { .. } => "scan",
        Command::SqfreeError { .. } => "sqfree-error",
        Command::PoissonCheck { .. } => "poisson-check",
        Command::Sweep { .. } => "sweep",
        Command::Acceptance { .. } => "acceptance",
    }
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    if cli.workers == Some(0) {
        return Err(LabError::Config("--workers must be positive".into()));
    }
    if let Command::Acceptance { suite } = &cli.command {
        let suite: Suite = suite.parse()?;
        let workers = cli.workers.unwrap_or_else(default_workers);
        let checks = with_workers(workers, || run_suite(suite))?;
        let passed = checks.iter().filter(|c| c.passed).count();
        for c in &checks {
            println!("{c}");
        }
        println!("{passed}/{} checks passed", checks.len());
        return Ok(if passed == checks.len() {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        });
    }

    let start = Instant::now();
    let (cfg, outcome) = if let Command::Sweep { config } = &cli.command {
        let text = std::fs::read_to_string(config)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", config.display())))?;
        let mut sweep = SweepConfig::parse(&text)?;
        if let Some(seed) = cli.seed {
            sweep.seed = seed;
        }
        let workers = cli
            .workers
            .or(sweep.workers)
            .unwrap_or_else(default_workers);
        let mut cfg = sweep_run_config(&sweep, workers);
        cfg.output = cli.output.clone();
        cfg.format = cli.format.parse()?;
        let records = cfg.install(|| exponent_sweep(&sweep))??;
        let worst = records.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio));
        let line = match worst {
            Some(r) => format!(
                "{} rows; max |E|/Hooley = {:.4} at X={}, theta={}, q={}",
                records.len(),
                r.ratio,
                r.x,
                r.theta,
                r.q
            ),
            None => "0 rows".into(),
        };
        let summary = json!({ "rows": records.len(), "max_ratio": worst.map(|r| r.ratio) });
        (
            cfg,
            Outcome {
                table: sweep_table(&records, &sweep.a_list),
                summary,
                line,
            },
        )
    } else {
        let workers = cli.workers.unwrap_or_else(default_workers);
        let cfg = run_config(cli, cli.seed.unwrap_or(0), workers)?;
        let outcome = cfg.install(|| execute(&cli.command, cfg.seed))??;
        (cfg, outcome)
    };

    let meta = RunMeta::for_config(&cfg);
    match &cfg.output {
        Some(path) => write_table(
            &outcome.table,
            &meta,
            cfg.format,
            BufWriter::new(File::create(path)?),
        )?,
        None => write_table(&outcome.table, &meta, cfg.format, io::stdout().lock())?,
    }
    eprintln!("{}: {}", cfg.command, outcome.line);
    if let Some(log) = &cli.run_log {
        ResultStore::open(log).append(&RunLogEntry::new(&cfg, start.elapsed(), outcome.summary))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn write_table<W: Write>(
    table: &Table,
    meta: &RunMeta,
    format: OutputFormat,
    mut w: W,
) -> Result<()> {
    match format {
        OutputFormat::Csv => table.write_csv(meta, &mut w)?,
        OutputFormat::Json => table.write_json(meta, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn execute(cmd: &Command, seed: u64) -> Result<Outcome> {
    match cmd {
        Command::Expsum { q, m, n } => {
            let ctx = ExpSumContext::for_prime(*q)?;
            let pm = ctx.modulus();
            let (mr, nr) = (pm.reduce(*m), pm.reduce(*n));
            let s = ctx.s_sum(mr, nr);
            let weil = 3.0 * (*q as f64).sqrt();
            let ratio = s.norm() / weil;
            let mut t = Table::new(&["q", "m", "n", "re", "im", "abs", "weil_bound", "ratio"]);
            t.push(vec![
                q.to_string(),
                mr.to_string(),
                nr.to_string(),
                s.re.to_string(),
                s.im.to_string(),
                s.norm().to_string(),
                weil.to_string(),
                ratio.to_string(),
            ]);
            Ok(Outcome {
                table: t,
                summary: json!({ "ratio": ratio }),
                line: format!("|S| / 3 sqrt(q) = {ratio:.6}"),
            })
        }
        Command::Exceptions { q } => {
            let set = exception_set(&PrimeModulus::new(*q)?)?;
            let mut t = Table::new(&["q", "alpha", "beta", "square", "listed", "quartic"]);
            for &(al, be) in &set.pairs {
                let has =
                    |s: &std::collections::BTreeSet<(u64, u64)>| s.contains(&(al, be)).to_string();
                t.push(vec![
                    q.to_string(),
                    al.to_string(),
                    be.to_string(),
                    has(&set.semantic),
                    has(&set.listed),
                    has(&set.quartic),
                ]);
            }
            Ok(Outcome {
                table: t,
                summary: json!({ "size": set.len() }),
                line: format!("{} pairs", set.len()),
            })
        }
        Command::Bilinear {
            q,
            j,
            kernel: name,
            a,
            b,
            k,
            m_len,
            n_len,
            n_start,
            alpha,
        } => {
            let ctx = ExpSumContext::for_prime(*q)?;
            let spec = kernel(name, *a, *b, *k, ctx.modulus())?;
            let cfg = BilinearConfig {
                spec,
                j: *j,
                n_start: *n_start,
                n_len: *n_len,
                alpha: alpha.parse::<AlphaSpec>()?.generate(*m_len),
            };
            let r = bilinear_sum(&ctx, &cfg)?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            let mut t = Table::new(&[
                "q",
                "j",
                "kernel",
                "M",
                "N",
                "re",
                "im",
                "abs",
                "trivial_bound",
                "cauchy_bound",
                "theorem_bound",
                "ratio",
                "hypotheses_hold",
            ]);
            t.push(vec![
                q.to_string(),
                j.to_string(),
                name.clone(),
                m_len.to_string(),
                n_len.to_string(),
                r.value.re.to_string(),
                r.value.im.to_string(),
                r.abs.to_string(),
                r.trivial_bound.to_string(),
                r.cauchy_bound.to_string(),
                r.theorem_bound.to_string(),
                r.ratio.to_string(),
                r.flags.all().to_string(),
            ]);
            let line = format!(
                "|S| = {:.4}, ratio to theorem bound {:.4}, {} warning(s)",
                r.abs,
                r.ratio,
                r.warnings.len()
            );
            Ok(Outcome {
                table: t,
                summary: json!({ "abs": r.abs, "ratio": r.ratio, "warnings": r.warnings }),
                line,
            })
        }
        Command::Scan {
            q,
            big_b,
            j,
            kernel: name,
            a,
            b,
            budget,
            samples,
            h_samples,
        } => {
            let ctx = ExpSumContext::for_prime(*q)?;
            let spec = kernel(name, *a, *b, 0, ctx.modulus())?;
            let engine = SigmaEngine::new(&ctx, &spec, *j)?;
            let diag = diagonal_set(*big_b, ctx.modulus())?;
            let plan = ScanPlan {
                budget: *budget,
                samples: *samples,
                h_samples: *h_samples,
                seed,
            };
            let rep = nondiagonal_scan_with(&engine, &diag, &plan)?;
            let witness = match &rep.witness {
                Some((b, h)) => format!(", at b = {:?}, h = {h}", b.0),
                None => String::new(),
            };
            let line = format!(
                "{} scan, {} evaluations, max |Sigma|/q = {:.4}, mean {:.4}{witness}",
                format!("{:?}", rep.mode).to_lowercase(),
                rep.evaluated,
                rep.max_ratio,
                rep.mean_ratio
            );
            let summary = serde_json::to_value(&rep)?;
            Ok(Outcome {
                table: scan_table(&rep.rows),
                summary,
                line,
            })
        }
        Command::SqfreeError { x, q, a, all_a } => {
            let pm = PrimeModulus::new(*q)?;
            let recs = if *all_a {
                error_terms_all(*x, &pm)?
            } else {
                vec![error_term(*x, &pm, a.expect("clap requires --a"))?]
            };
            let agree = recs.iter().all(|r| r.agrees());
            let worst = recs.iter().map(|r| r.ratio).fold(0.0, f64::max);
            if !agree {
                return Err(LabError::Numeric(
                    "direct and decomposed error terms differ".into(),
                ));
            }
            let line = format!(
                "{} rows, both computations agree, max |E|/Hooley = {worst:.4}",
                recs.len()
            );
            Ok(Outcome {
                table: error_table(&recs),
                summary: json!({ "rows": recs.len(), "max_ratio": worst }),
                line,
            })
        }
        Command::PoissonCheck {
            q,
            m_len,
            n_len,
            cutoff_t,
            a,
        } => {
            let ctx = ExpSumContext::for_prime(*q)?;
            let direct = s_v_direct(*m_len, *n_len, &ctx, *a)?;
            let dual = s_v_poisson(*m_len, *n_len, &ctx, *a, *cutoff_t)?;
            let diff = (direct - dual.value.re).abs();
            let tol = 1e-4f64.max(1e-3 * direct.abs());
            let agree = diff <= tol && dual.value.im.abs() <= 1e-4;
            let mut t = Table::new(&[
                "q",
                "M",
                "N",
                "T",
                "a",
                "direct",
                "dual_re",
                "dual_im",
                "abs_diff",
                "tolerance",
                "tail_estimate",
                "agree",
            ]);
            t.push(vec![
                q.to_string(),
                m_len.to_string(),
                n_len.to_string(),
                cutoff_t.to_string(),
                a.to_string(),
                direct.to_string(),
                dual.value.re.to_string(),
                dual.value.im.to_string(),
                diff.to_string(),
                tol.to_string(),
                dual.tail_estimate.to_string(),
                agree.to_string(),
            ]);
            let line = format!(
                "direct {direct:.6}, dual {:.6}, |diff| {diff:.2e}, agree: {agree}",
                dual.value.re
            );
            Ok(Outcome {
                table: t,
                summary: json!({ "diff": diff, "agree": agree }),
                line,
            })
        }
        Command::Sweep { .. } | Command::Acceptance { .. } => unreachable!("handled by run"),
    }
}
