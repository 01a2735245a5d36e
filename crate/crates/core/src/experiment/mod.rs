//! Experiment runner: resolves a configuration, runs one verification suite
//! and tabulates every result next to its target value.

mod config;
mod output;

pub use config::{
    parse_kinds, parse_usize_list, Command, ConfigOverrides, ExperimentConfig, OutputFormat,
    DEFAULT_BINS, M3_MIN_TRIALS,
};
pub use output::{write_csv, write_json, Row, RunRecord, TOOL, VERSION};

use std::time::Instant;

use rayon::prelude::*;

use crate::combinatorics::{
    count_odd_even_matched, count_opposite_sign_matched, enumerate_api, enumeration_budget,
    odd_even_closed_form, opposite_sign_asymptotic,
};
use crate::entries::{derive_seed, sample_entries};
use crate::error::{Error, Result};
use crate::joint::{limit_phi, phi_n_estimate_with};
use crate::matrix::MatrixKind;
use crate::spectra::{
    eigenvalues_fast, esd_moment, ks_distance, limit_moment, Histogram, LimitLaw, SpectralSample,
};
use crate::stats::{central_fourth_moment, log_log_slope, OnlineStats};
use crate::trace::verify_trace_with;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_ACCEPTANCE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Relative tolerance on even moment estimates in `lsd`.
pub const LSD_EVEN_REL_TOL: f64 = 0.10;
/// Absolute tolerance on odd moment estimates in `lsd`.
pub const LSD_ODD_ABS_TOL: f64 = 0.05;

pub fn exit_code_for_error(e: &Error) -> i32 {
    match e {
        Error::Resource { .. } => EXIT_BUDGET,
        Error::Io(_) => EXIT_IO,
        Error::InvalidDimension(_) | Error::IndexOutOfRange { .. } | Error::InvalidInput(_) => {
            EXIT_CONFIG
        }
    }
}

pub fn exit_code_for_record(r: &RunRecord) -> i32 {
    if r.passed() {
        EXIT_OK
    } else {
        EXIT_ACCEPTANCE
    }
}

/// Stable per-kind coordinate for seed derivation, so selecting a single kind
/// reproduces the same numbers as selecting both.
fn kind_code(kind: MatrixKind) -> u64 {
    match kind {
        MatrixKind::Reverse => 0,
        MatrixKind::Symmetric => 1,
    }
}

pub fn run(config: ExperimentConfig) -> Result<RunRecord> {
    let start = Instant::now();
    let rows = match config.command {
        Command::Lsd => cmd_lsd(&config)?,
        Command::M3 => cmd_m3(&config)?,
        Command::TraceVerify => cmd_trace_verify(&config)?,
        Command::Combinatorics => cmd_combinatorics(&config)?,
        Command::Joint => cmd_joint(&config)?,
    };
    let mut record = RunRecord::new(config, rows);
    record.wall_time_s = start.elapsed().as_secs_f64();
    Ok(record)
}

fn spectra_for(cfg: &ExperimentConfig, kind: MatrixKind, n: usize) -> Result<Vec<SpectralSample>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.seed, &[kind_code(kind), n as u64, t as u64]);
            sample_entries(&cfg.dist, n, seed).map(|x| eigenvalues_fast(kind, &x))
        })
        .collect()
}

/// Pooled KS distance, per-order moment estimates and a histogram against the
/// limit density, for each kind and `n`.
pub fn cmd_lsd(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &kind in &cfg.kinds {
        let law = LimitLaw::for_kind(kind);
        for &n in &cfg.n {
            let samples = spectra_for(cfg, kind, n)?;
            let pooled = SpectralSample::pooled(&samples);
            let base = |metric: &str, key: String| Row {
                kind: Some(kind.to_string()),
                n: Some(n),
                ..Row::new(metric, key)
            };

            let ks = ks_distance(&pooled, law)?;
            rows.push(Row {
                estimate: ks,
                target: Some(0.0),
                gap: Some(ks),
                threshold: Some(cfg.threshold),
                pass: Some(ks <= cfg.threshold),
                ..base("ks", law.to_string())
            });

            for &h in &cfg.h {
                let stats: OnlineStats = samples.iter().map(|s| esd_moment(s, h)).collect();
                let target = limit_moment(law, h);
                let tol = if h % 2 == 0 {
                    LSD_EVEN_REL_TOL * target
                } else {
                    LSD_ODD_ABS_TOL
                };
                let gap = (stats.mean() - target).abs();
                rows.push(Row {
                    estimate: stats.mean(),
                    target: Some(target),
                    gap: Some(gap),
                    std_error: Some(stats.std_error()),
                    threshold: Some(tol),
                    pass: Some(gap <= tol),
                    ..base("moment", format!("h={h}"))
                });
            }

            let hist = Histogram::from_sample(&pooled, cfg.bins)?;
            for (b, &count) in hist.counts.iter().enumerate() {
                let x = hist.center(b);
                let density = hist.density(b);
                let pdf = law.pdf(x);
                rows.push(Row {
                    x: Some(x),
                    count: Some(count as u128),
                    estimate: density,
                    target: Some(pdf),
                    gap: Some((density - pdf).abs()),
                    ..base("histogram", format!("bin={b}"))
                });
            }
        }
    }
    Ok(rows)
}

/// Fourth central moment of the `h`-th ESD moment across trials, per `n`, and
/// its log-log slope over the `n` ladder.
pub fn cmd_m3(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    if cfg.trials < M3_MIN_TRIALS {
        return Err(Error::InvalidInput(format!(
            "m3 needs at least {M3_MIN_TRIALS} trials"
        )));
    }
    let mut rows = Vec::new();
    for &kind in &cfg.kinds {
        let per_n = cfg
            .n
            .iter()
            .map(|&n| spectra_for(cfg, kind, n))
            .collect::<Result<Vec<_>>>()?;
        for &h in &cfg.h {
            let mut m4 = Vec::with_capacity(cfg.n.len());
            for (&n, samples) in cfg.n.iter().zip(&per_n) {
                let values: Vec<f64> = samples.iter().map(|s| esd_moment(s, h)).collect();
                let v = central_fourth_moment(&values);
                m4.push(v);
                rows.push(Row {
                    kind: Some(kind.to_string()),
                    n: Some(n),
                    estimate: v,
                    ..Row::new("m3", format!("h={h}"))
                });
            }
            let xs: Vec<f64> = cfg.n.iter().map(|&n| n as f64).collect();
            let slope = log_log_slope(&xs, &m4);
            rows.push(Row {
                kind: Some(kind.to_string()),
                estimate: slope.unwrap_or(f64::NAN),
                target: Some(-2.0),
                gap: slope.map(|s| (s + 2.0).abs()),
                threshold: Some(cfg.threshold),
                // all-zero statistics leave the slope undefined
                pass: slope.map(|s| s <= cfg.threshold),
                ..Row::new("m3_slope", format!("h={h}"))
            });
        }
    }
    Ok(rows)
}

/// Formula trace against direct product trace in exact arithmetic, one row per
/// kind, `n`, `h` and seed index.
pub fn cmd_trace_verify(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let mut cells = Vec::new();
    for &kind in &cfg.kinds {
        for &n in &cfg.n {
            for &h in &cfg.h {
                for s in 0..cfg.trials {
                    cells.push((kind, n, h, s));
                }
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(kind, n, h, s)| {
            let seed = derive_seed(cfg.seed, &[kind_code(kind), n as u64, h as u64, s as u64]);
            let c = verify_trace_with(kind, n, h as usize, &cfg.dist, seed)?;
            Ok(Row {
                kind: Some(kind.to_string()),
                n: Some(n),
                estimate: c.formula_value,
                target: Some(c.direct_value),
                gap: Some(c.abs_diff),
                threshold: Some(cfg.threshold),
                pass: Some(c.exact_equal && c.abs_diff <= cfg.threshold),
                ..Row::new("trace", format!("h={h};seed={s}"))
            })
        })
        .collect()
}

/// Counting identities for each `n` and half-length `p` (taken from `h`).
pub fn cmd_combinatorics(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &n in &cfg.n {
        for &p in &cfg.h {
            let p = p as usize;
            let key = format!("p={p}");

            let count = count_odd_even_matched(n, p)?;
            let closed = odd_even_closed_form(n, p);
            rows.push(Row {
                n: Some(n),
                count: Some(count),
                estimate: count as f64,
                target: Some(closed as f64),
                gap: Some(count.abs_diff(closed) as f64),
                threshold: Some(0.0),
                pass: Some(count == closed),
                ..Row::new("odd_even_count", key.clone())
            });

            let expected = (n as u128).pow(2 * p as u32 + 1);
            if expected <= enumeration_budget() {
                let mut total = 0u128;
                for i in 1..=n {
                    total += enumerate_api(n, p, i)?.count() as u128;
                }
                rows.push(Row {
                    n: Some(n),
                    count: Some(total),
                    estimate: total as f64,
                    target: Some(expected as f64),
                    gap: Some(total.abs_diff(expected) as f64),
                    threshold: Some(0.0),
                    pass: Some(total == expected),
                    ..Row::new("api_total", key.clone())
                });
            } else {
                // the union check is optional here; report it as not run
                rows.push(Row {
                    n: Some(n),
                    estimate: f64::NAN,
                    target: Some(expected as f64),
                    ..Row::new("api_total", format!("{key};skipped=budget"))
                });
            }

            let matched = count_opposite_sign_matched(n, p)?;
            let ratio = matched as f64 / opposite_sign_asymptotic(n, p);
            rows.push(Row {
                n: Some(n),
                count: Some(matched),
                estimate: ratio,
                target: Some(1.0),
                gap: Some((1.0 - ratio).abs()),
                threshold: Some(cfg.threshold),
                pass: Some(ratio >= cfg.threshold && ratio <= 1.0),
                ..Row::new("opposite_sign_ratio", key)
            });
        }
    }
    Ok(rows)
}

/// Monte Carlo mixed moments of each word against the limit value; passes
/// within `threshold` standard errors.
pub fn cmd_joint(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &kind in &cfg.kinds {
        for &n in &cfg.n {
            for q in &cfg.words {
                let seed = derive_seed(cfg.seed, &[kind_code(kind), n as u64]);
                let (est, se) = phi_n_estimate_with(kind, q, &cfg.dist, n, cfg.trials, seed)?;
                let target = limit_phi(kind, q);
                let gap = (est - target).abs();
                let tol = cfg.threshold * se;
                rows.push(Row {
                    kind: Some(kind.to_string()),
                    n: Some(n),
                    estimate: est,
                    target: Some(target),
                    gap: Some(gap),
                    std_error: Some(se),
                    threshold: Some(tol),
                    pass: Some(gap <= tol),
                    ..Row::new("joint", q.to_string())
                });
            }
        }
    }
    Ok(rows)
}
