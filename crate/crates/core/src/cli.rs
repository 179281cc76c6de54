//! Command-line front end. The `bbcd` binary parses [`Args`] and hands the
//! resulting [`RunConfig`] to [`run`].

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::dist::{self, build_table_capped, PoissonLimit, PoissonLimitParams, DEFAULT_MAX_CELLS};
use crate::error::{Error, Result};
use crate::infer::{
    chi_square_gof, chi_square_gof_params, fit_mle, fit_mle_profile_n, FitResult, MleOptions,
    SampleData,
};
use crate::params::Params;
use crate::sample::{exact_sample, gibbs_sample, GibbsConfig, SamplePairs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    /// Log-pmf and pmf at one cell.
    Pmf,
    /// The full joint table.
    Table,
    /// Means, variances, covariance and correlation.
    Moments,
    /// Draw a sample.
    Sample,
    /// Estimate parameters from data.
    Fit,
    /// Chi-square goodness of fit.
    Gof,
    /// Distance to the Poisson-conditionals limit along an n ladder.
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "bbcd",
    version,
    about = "Bivariate binomial conditionals distribution toolkit"
)]
pub struct Args {
    #[arg(value_enum)]
    pub subcommand: Subcommand,
    #[arg(long)]
    pub n1: Option<u32>,
    #[arg(long)]
    pub n2: Option<u32>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub x: Option<u32>,
    #[arg(long)]
    pub y: Option<u32>,
    /// CSV with header `x,y` (or `x,y,count` with --freq).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Defaults to csv for `table` and `sample`, json otherwise.
    #[arg(long, value_enum)]
    pub output_format: Option<OutputFormat>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 500)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, default_value_t = 1000)]
    pub n_samples: usize,
    /// Draw i.i.d. from the exact table instead of running the Gibbs chain.
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub n_min: Option<u32>,
    #[arg(long)]
    pub n_max: Option<u32>,
    #[arg(long)]
    pub equal_n: bool,
    /// Input rows are aggregated `x,y,count`.
    #[arg(long)]
    pub freq: bool,
    /// Largest joint table (in cells) any subcommand may materialize.
    #[arg(long, default_value_t = DEFAULT_MAX_CELLS)]
    pub mem_cap: usize,
    /// Parameters deducted from the chi-square dof when --p1/--p2/--t are supplied to `gof`.
    #[arg(long)]
    pub n_estimated: Option<usize>,
    /// Comma-separated n values for `limit`.
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
    pub ladder: Vec<u32>,
}

/// How `fit` and `gof` choose trial counts.
#[derive(Debug, Clone, PartialEq)]
pub enum FitPlan {
    Fixed {
        n1: u32,
        n2: u32,
    },
    Profile {
        n_min: Option<u32>,
        n_max: u32,
        equal_n: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub input_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub seed: Option<u64>,
    pub params: Option<Params>,
    pub cell: Option<(u32, u32)>,
    pub fit: Option<FitPlan>,
    pub gibbs: (usize, usize, usize),
    pub exact: bool,
    pub freq: bool,
    pub mem_cap: usize,
    pub n_estimated: Option<usize>,
    pub ladder: Vec<u32>,
}

impl RunConfig {
    pub fn from_args(args: Args) -> Result<Self> {
        use Subcommand::*;
        let params = match (args.n1, args.n2, args.p1, args.p2, args.t) {
            (Some(n1), Some(n2), Some(p1), Some(p2), Some(t)) => {
                Some(Params::new(n1, n2, p1, p2, t)?)
            }
            _ => None,
        };
        let needs_params = matches!(args.subcommand, Pmf | Table | Moments | Sample | Limit);
        if needs_params && params.is_none() {
            return Err(Error::Config(
                "--n1, --n2, --p1, --p2 and --t are required".into(),
            ));
        }
        let needs_input = matches!(args.subcommand, Fit | Gof);
        if needs_input && args.input.is_none() {
            return Err(Error::Config("--input is required".into()));
        }
        let cell = match (args.x, args.y) {
            (Some(x), Some(y)) => Some((x, y)),
            _ if args.subcommand == Pmf => {
                return Err(Error::Config("--x and --y are required".into()))
            }
            _ => None,
        };
        let fit = match (args.n1, args.n2, args.n_max) {
            (Some(n1), Some(n2), _) => Some(FitPlan::Fixed { n1, n2 }),
            (_, _, Some(n_max)) => Some(FitPlan::Profile {
                n_min: args.n_min,
                n_max,
                equal_n: args.equal_n,
            }),
            _ if args.subcommand == Fit || (args.subcommand == Gof && params.is_none()) => {
                return Err(Error::Config(
                    "either --n1 and --n2, or --n-max (with optional --n-min, --equal-n) is required"
                        .into(),
                ))
            }
            _ => None,
        };
        let output_format = args.output_format.unwrap_or(match args.subcommand {
            Table | Sample => OutputFormat::Csv,
            _ => OutputFormat::Json,
        });
        if args.subcommand == Limit && args.ladder.is_empty() {
            return Err(Error::Config("--ladder must list at least one n".into()));
        }
        Ok(RunConfig {
            subcommand: args.subcommand,
            input_path: args.input,
            output_format,
            seed: args.seed,
            params,
            cell,
            fit,
            gibbs: (args.n_samples, args.burn_in, args.thin),
            exact: args.exact,
            freq: args.freq,
            mem_cap: args.mem_cap,
            n_estimated: args.n_estimated,
            ladder: args.ladder,
        })
    }
}

fn parse_rows(text: &str, header: &[&str]) -> Result<Vec<(usize, Vec<u64>)>> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (_, first) = lines.next().unwrap_or((1, ""));
    let got: Vec<&str> = first.split(',').map(str::trim).collect();
    if got != header {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`, found `{first}`", header.join(",")),
        });
    }
    let mut rows = Vec::new();
    for (line, raw) in lines {
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() != header.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", header.len(), fields.len()),
            });
        }
        let values = fields
            .iter()
            .map(|f| {
                f.parse::<u64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("`{f}` is not a nonnegative integer"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((line, values));
    }
    if rows.is_empty() {
        return Err(Error::NoObservations);
    }
    Ok(rows)
}

fn to_u32(line: usize, v: u64) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Parse {
        line,
        message: format!("{v} exceeds the supported count range"),
    })
}

/// Parse `x,y` rows.
pub fn parse_csv_str(text: &str) -> Result<SampleData> {
    let pairs = parse_rows(text, &["x", "y"])?
        .into_iter()
        .map(|(line, v)| Ok((to_u32(line, v[0])?, to_u32(line, v[1])?)))
        .collect::<Result<Vec<_>>>()?;
    SampleData::from_pairs(pairs)
}

/// Parse aggregated `x,y,count` rows.
pub fn parse_freq_csv_str(text: &str) -> Result<SampleData> {
    let cells = parse_rows(text, &["x", "y", "count"])?
        .into_iter()
        .map(|(line, v)| Ok(((to_u32(line, v[0])?, to_u32(line, v[1])?), v[2] as f64)))
        .collect::<Result<Vec<_>>>()?;
    SampleData::from_cells(cells)
}

pub fn parse_csv(path: &Path) -> Result<SampleData> {
    parse_csv_str(&read(path)?)
}

pub fn parse_freq_csv(path: &Path) -> Result<SampleData> {
    parse_freq_csv_str(&read(path)?)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn check_cap(params: &Params, cap: usize) -> Result<()> {
    if params.cells() > cap as u128 {
        return Err(Error::Capacity {
            cells: params.cells(),
            cap,
        });
    }
    Ok(())
}

fn write_json<W: Write + ?Sized, T: Serialize>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// Seed used when none is given; echoed in the sample metadata.
fn entropy_seed() -> u64 {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    // splitmix64 finalizer over time and pid
    let mut z = nanos ^ ((std::process::id() as u64) << 32);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Serialize)]
struct Correlation {
    bbcd: f64,
    data: Option<f64>,
}

#[derive(Serialize)]
struct FitReport<'a> {
    #[serde(flatten)]
    fit: &'a FitResult,
    correlation: Correlation,
}

fn load_data(config: &RunConfig) -> Result<SampleData> {
    let path = config
        .input_path
        .as_deref()
        .expect("validated in from_args");
    if config.freq {
        parse_freq_csv(path)
    } else {
        parse_csv(path)
    }
}

fn fit_data(data: &SampleData, plan: &FitPlan, cap: usize) -> Result<FitResult> {
    let opts = MleOptions::default();
    match *plan {
        FitPlan::Fixed { n1, n2 } => {
            check_cap(&Params::new(n1, n2, 0.5, 0.5, 1.0)?, cap)?;
            fit_mle(data, n1, n2, &opts)
        }
        FitPlan::Profile {
            n_min,
            n_max,
            equal_n,
        } => {
            check_cap(&Params::new(n_max, n_max, 0.5, 0.5, 1.0)?, cap)?;
            let n_min = n_min.unwrap_or_else(|| data.max_x().max(data.max_y()).max(1));
            fit_mle_profile_n(data, n_min, n_max, equal_n, &opts)
        }
    }
}

/// Execute one subcommand, writing its report to `out` and sample metadata to `meta`.
pub fn run<W: Write + ?Sized, M: Write + ?Sized>(
    config: &RunConfig,
    out: &mut W,
    meta: &mut M,
) -> Result<()> {
    let csv = config.output_format == OutputFormat::Csv;
    match config.subcommand {
        Subcommand::Pmf => {
            let params = config.params.expect("validated");
            let (x, y) = config.cell.expect("validated");
            let log_pmf = dist::log_pmf(&params, x, y);
            let pmf = log_pmf.exp();
            if csv {
                writeln!(out, "x,y,log_pmf,pmf")?;
                writeln!(out, "{x},{y},{log_pmf},{pmf}")?;
            } else {
                let log_value = if log_pmf.is_finite() {
                    json!(log_pmf)
                } else {
                    json!("-inf")
                };
                write_json(
                    out,
                    &json!({ "params": params, "x": x, "y": y, "log_pmf": log_value, "pmf": pmf }),
                )?;
            }
        }
        Subcommand::Table => {
            let params = config.params.expect("validated");
            let table = build_table_capped(&params, config.mem_cap)?;
            if csv {
                writeln!(out, "x,y,prob")?;
                for (x, y, p) in table.iter() {
                    writeln!(out, "{x},{y},{p}")?;
                }
            } else {
                let cells: Vec<_> = table
                    .iter()
                    .map(|(x, y, p)| json!({ "x": x, "y": y, "prob": p }))
                    .collect();
                write_json(
                    out,
                    &json!({ "params": params, "log_norm": table.log_norm(), "cells": cells }),
                )?;
            }
        }
        Subcommand::Moments => {
            let params = config.params.expect("validated");
            let table = build_table_capped(&params, config.mem_cap)?;
            let m = table.moments();
            if csv {
                writeln!(out, "mean_x,mean_y,var_x,var_y,cov,corr")?;
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    m.mean_x, m.mean_y, m.var_x, m.var_y, m.cov, m.corr
                )?;
            } else {
                write_json(out, &json!({ "params": params, "moments": m }))?;
            }
        }
        Subcommand::Sample => {
            let params = config.params.expect("validated");
            let (n_samples, burn_in, thin) = config.gibbs;
            let (seed, seed_source) = match config.seed {
                Some(s) => (s, "argument"),
                None => (entropy_seed(), "entropy"),
            };
            let samples: SamplePairs = if config.exact {
                check_cap(&params, config.mem_cap)?;
                exact_sample(&params, n_samples, seed)?
            } else {
                let cfg = GibbsConfig::new(n_samples, seed)
                    .burn_in(burn_in)
                    .thin(thin);
                gibbs_sample(&params, &cfg)?
            };
            let metadata = json!({
                "params": samples.params_used,
                "config": samples.config_used,
                "rng": samples.rng_algorithm,
                "seed": seed,
                "seed_source": seed_source,
            });
            if csv {
                samples.write_csv(&mut *out)?;
                serde_json::to_writer(&mut *meta, &metadata)
                    .map_err(|e| Error::Io(e.to_string()))?;
                writeln!(meta)?;
            } else {
                write_json(
                    out,
                    &json!({ "metadata": metadata, "pairs": samples.pairs }),
                )?;
            }
        }
        Subcommand::Fit => {
            let data = load_data(config)?;
            let fit = fit_data(
                &data,
                config.fit.as_ref().expect("validated"),
                config.mem_cap,
            )?;
            let correlation = Correlation {
                bbcd: fit.model_moments.corr,
                data: fit.sample_moments.map(|s| s.corr),
            };
            if csv {
                let p = fit.params_hat;
                writeln!(
                    out,
                    "n1,n2,p1,p2,t,log_lik,converged,method,corr_bbcd,corr_data"
                )?;
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    p.n1(),
                    p.n2(),
                    p.p1(),
                    p.p2(),
                    p.t(),
                    fit.log_lik.map_or(String::new(), |v| v.to_string()),
                    fit.converged,
                    serde_json::to_value(fit.method)
                        .expect("enum")
                        .as_str()
                        .expect("string"),
                    correlation.bbcd,
                    correlation.data.map_or(String::new(), |v| v.to_string()),
                )?;
            } else {
                write_json(
                    out,
                    &FitReport {
                        fit: &fit,
                        correlation,
                    },
                )?;
            }
        }
        Subcommand::Gof => {
            let data = load_data(config)?;
            let report = match (config.params, &config.fit) {
                (Some(params), _) => {
                    check_cap(&params, config.mem_cap)?;
                    chi_square_gof_params(&data, &params, config.n_estimated.unwrap_or(3))?
                }
                (None, Some(plan)) => {
                    let fit = fit_data(&data, plan, config.mem_cap)?;
                    chi_square_gof(
                        &data,
                        &fit,
                        config.n_estimated.unwrap_or(fit.free_parameters),
                    )?
                }
                (None, None) => unreachable!("validated in from_args"),
            };
            if csv {
                writeln!(out, "statistic,dof,p_value,groups")?;
                writeln!(
                    out,
                    "{},{},{},{}",
                    report.statistic,
                    report.dof,
                    report.p_value,
                    report.pooled_cells.len()
                )?;
            } else {
                write_json(out, &report)?;
            }
        }
        Subcommand::Limit => {
            let params = config.params.expect("validated");
            let limit = PoissonLimitParams::from_params(&params)?;
            let bpd = PoissonLimit::auto(limit)?;
            let mut rows = Vec::with_capacity(config.ladder.len());
            for &n in &config.ladder {
                check_cap(&limit.approximant(n)?, config.mem_cap)?;
                rows.push((n, bpd.tv_distance(n)?));
            }
            if csv {
                writeln!(out, "n,tv")?;
                for (n, tv) in rows {
                    writeln!(out, "{n},{tv}")?;
                }
            } else {
                let ladder: Vec<_> = rows
                    .iter()
                    .map(|&(n, tv)| json!({ "n": n, "tv": tv }))
                    .collect();
                write_json(
                    out,
                    &json!({
                        "lambda1": limit.lambda1(),
                        "lambda2": limit.lambda2(),
                        "t": limit.t(),
                        "truncation": bpd.truncation(),
                        "ladder": ladder,
                    }),
                )?;
            }
        }
    }
    Ok(())
}

/// Machine-readable error object printed on failure.
pub fn error_object(err: &Error) -> serde_json::Value {
    json!({ "error": { "code": err.code(), "message": err.to_string() } })
}
