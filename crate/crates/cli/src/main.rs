// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! `qrecur` command-line front end.
//!
//! Exit codes: 0 ok, 1 invalid channel or specification, 2 parse or input
//! error, 3 quantization violated on a channel that is unital on the
//! relevant space.

mod reproduce;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qrecur::builders::BuilderSpec;
use qrecur::ensemble::{run_ensemble, samples_csv, stats_csv, EnsembleSpec, Sweep};
use qrecur::io::load_channel;
use qrecur::recurrence::{analyze, partial_return_times, quantization_verdict, return_series};
use qrecur::{Error, QuantumChannel, StateVector, Tolerance};

#[derive(Parser)]
#[command(name = "qrecur", version, about = "First-return times of iterated open quantum dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check trace preservation, complete positivity and unitality.
    Validate(ChannelArgs),
    /// Exact expected return time, relevant dimension and first-return series.
    ReturnTime {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 0)]
        psi: usize,
        /// Length of the q/p/partial_T series in the output.
        #[arg(long, default_value_t = 20)]
        horizon: usize,
    },
    /// First-return distribution as CSV `t,p,q`.
    Distribution {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 0)]
        psi: usize,
        #[arg(long)]
        horizon: usize,
    },
    /// One channel per grid value of a builder parameter.
    Sweep {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 0)]
        psi: usize,
        /// Builder parameter to vary (`d`, `radius` or `nodes`).
        #[arg(long)]
        param: String,
        /// Comma list `a,b,c` or range `start:step:stop`.
        #[arg(long)]
        grid: String,
        /// Horizons for extra `T^(L)` columns, comma separated.
        #[arg(long, value_delimiter = ',')]
        horizons: Vec<usize>,
    },
    /// Random-ensemble order statistics.
    Ensemble(EnsembleArgs),
    /// Write the data behind a figure preset.
    Reproduce(reproduce::ReproduceArgs),
}

#[derive(Args, Clone)]
struct ToleranceArgs {
    #[arg(long)]
    tol_rank: Option<f64>,
    #[arg(long)]
    tol_check: Option<f64>,
    #[arg(long)]
    tol_converge: Option<f64>,
    /// Allowed |T - dim| on channels unital on the relevant space.
    #[arg(long)]
    tol_quantize: Option<f64>,
}

impl ToleranceArgs {
    fn resolve(&self, base: Tolerance) -> Result<Tolerance, Error> {
        let tol = Tolerance {
            eps_rank: self.tol_rank.unwrap_or(base.eps_rank),
            eps_check: self.tol_check.unwrap_or(base.eps_check),
            eps_converge: self.tol_converge.unwrap_or(base.eps_converge),
            eps_quantize: self.tol_quantize.unwrap_or(base.eps_quantize),
        };
        tol.validate()?;
        Ok(tol)
    }
}

#[derive(Args, Clone)]
#[group(id = "source", required = true, multiple = false)]
struct SourceArgs {
    /// Channel file (`{"dim": .., "kraus": [[[re, im], ..], ..]}`).
    #[arg(long, group = "source")]
    channel: Option<PathBuf>,
    /// Builder spec, inline JSON or a path to a JSON file.
    #[arg(long, group = "source")]
    builder: Option<String>,
}

#[derive(Args, Clone)]
struct ChannelArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Seed for random builder ingredients.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tol: ToleranceArgs,
    /// Write output files here instead of printing to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnsembleArgs {
    /// Ensemble spec, inline JSON or a path to a JSON file.
    #[arg(long, conflicts_with = "builder")]
    spec: Option<String>,
    /// Builder spec, used together with --samples.
    #[arg(long)]
    builder: Option<String>,
    #[arg(long, requires = "builder")]
    samples: Option<usize>,
    #[arg(long)]
    psi: Option<usize>,
    #[arg(long, requires = "grid")]
    param: Option<String>,
    #[arg(long, requires = "param")]
    grid: Option<String>,
    #[arg(long, value_delimiter = ',')]
    horizons: Vec<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: logical cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    tol: ToleranceArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub(crate) struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::Io(_) => 2,
            Error::TheoremViolation { .. } => 3,
            Error::Sample { source, .. } => match **source {
                Error::Parse(_) | Error::Io(_) => 2,
                _ => 1,
            },
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

pub(crate) fn input_error(message: String) -> Failure {
    Failure { code: 2, message }
}

type CliResult<T = ()> = Result<T, Failure>;

/// Inline JSON when the text looks like an object, otherwise a file path.
pub(crate) fn read_json_arg<T: serde::de::DeserializeOwned>(arg: &str) -> CliResult<T> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_owned()
    } else {
        fs::read_to_string(arg).map_err(|e| input_error(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| input_error(format!("cannot parse {arg}: {e}")))
}

fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = |what: &str| input_error(format!("bad grid {text:?}: {what}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(s));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0) || stop < start {
                return Err(bad("need step > 0 and stop >= start"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            // k·step avoids accumulated drift; rounding strips the last-ulp noise
            Ok((0..=n)
                .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
                .collect())
        }
        [_] => text.split(',').map(num).collect(),
        _ => Err(bad("expected a,b,c or start:step:stop")),
    }
}

struct Resolved {
    channel: QuantumChannel,
    builder: Option<BuilderSpec>,
    tol: Tolerance,
}

fn resolve_channel(args: &ChannelArgs) -> CliResult<Resolved> {
    let tol = args.tol.resolve(Tolerance::default())?;
    match (&args.source.channel, &args.source.builder) {
        (Some(path), None) => Ok(Resolved {
            channel: load_channel(path)?,
            builder: None,
            tol,
        }),
        (None, Some(spec)) => {
            let builder: BuilderSpec = read_json_arg(spec)?;
            Ok(Resolved {
                channel: builder.build(args.seed)?,
                builder: Some(builder),
                tol,
            })
        }
        _ => Err(input_error("exactly one of --channel or --builder is required".into())),
    }
}

/// Rejects channels that are not trace preserving and completely positive.
fn require_valid(channel: &QuantumChannel, tol: &Tolerance) -> CliResult {
    let report = channel.validate(tol);
    if report.trace_preserving && report.completely_positive {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: format!(
                "invalid channel: {}",
                serde_json::to_string(&report).expect("report serializes")
            ),
        })
    }
}

fn emit(out: Option<&Path>, name: &str, content: &str) -> CliResult {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(Error::from)?;
            fs::write(dir.join(name), content).map_err(Error::from)?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_validate(args: &ChannelArgs) -> CliResult {
    let r = resolve_channel(args)?;
    let report = r.channel.validate(&r.tol);
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    emit(args.out.as_deref(), "validation.json", &json)?;
    if report.trace_preserving && report.completely_positive {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: format!(
                "channel is invalid (normalization defect {:.3e}, completely positive: {})",
                report.max_normalization_defect, report.completely_positive
            ),
        })
    }
}

fn psi_for(channel: &QuantumChannel, psi: usize) -> CliResult<StateVector> {
    Ok(StateVector::basis(channel.dim(), psi)?)
}

fn cmd_return_time(args: &ChannelArgs, psi: usize, horizon: usize) -> CliResult {
    let r = resolve_channel(args)?;
    require_valid(&r.channel, &r.tol)?;
    let psi = psi_for(&r.channel, psi)?;
    match quantization_verdict(&r.channel, &psi, horizon, &r.tol) {
        Ok(a) => emit(
            args.out.as_deref(),
            "return_time.json",
            &(serde_json::to_string(&a).expect("analysis serializes") + "\n"),
        ),
        Err(Error::TheoremViolation { defect, analysis }) => {
            emit(
                args.out.as_deref(),
                "return_time.json",
                &(serde_json::to_string(&analysis).expect("analysis serializes") + "\n"),
            )?;
            Err(Error::TheoremViolation { defect, analysis }.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_distribution(args: &ChannelArgs, psi: usize, horizon: usize) -> CliResult {
    if horizon == 0 {
        return Err(input_error("--horizon must be at least 1".into()));
    }
    let r = resolve_channel(args)?;
    require_valid(&r.channel, &r.tol)?;
    let psi = psi_for(&r.channel, psi)?;
    let s = return_series(&r.channel, &psi, horizon)?;
    let mut csv = String::from("t,p,q\n");
    for t in 1..=horizon {
        let _ = writeln!(csv, "{t},{},{}", s.p[t - 1], s.q[t]);
    }
    emit(args.out.as_deref(), "distribution.csv", &csv)
}

fn cmd_sweep(args: &ChannelArgs, psi: usize, param: &str, grid: &str, horizons: &[usize]) -> CliResult {
    let r = resolve_channel(args)?;
    let builder = r
        .builder
        .ok_or_else(|| input_error("sweep needs --builder".into()))?;
    let grid = parse_grid(grid)?;
    let mut csv = String::from("value,exact_T,relevant_dim,psi_unital,recurrent,method");
    for l in horizons {
        let _ = write!(csv, ",T_{l}");
    }
    csv.push('\n');
    for v in grid {
        let mut b = builder.clone();
        b.set_param(param, v)?;
        let channel = b.build(args.seed)?;
        let psi = psi_for(&channel, psi)?;
        let (a, _) = analyze(&channel, &psi, 0, &r.tol)?;
        let method = serde_json::to_value(a.method).expect("method serializes");
        let _ = write!(
            csv,
            "{v},{},{},{},{},{}",
            a.exact_t,
            a.relevant_dim,
            a.psi_unital,
            a.recurrent,
            method.as_str().unwrap_or_default()
        );
        if !horizons.is_empty() {
            for t in partial_return_times(&channel, &psi, horizons, &r.tol)? {
                let _ = write!(csv, ",{t}");
            }
        }
        csv.push('\n');
    }
    emit(args.out.as_deref(), "sweep.csv", &csv)
}

fn cmd_ensemble(args: &EnsembleArgs) -> CliResult {
    let mut spec: EnsembleSpec = match (&args.spec, &args.builder) {
        (Some(s), _) => read_json_arg(s)?,
        (None, Some(b)) => {
            let samples = args
                .samples
                .ok_or_else(|| input_error("--builder needs --samples".into()))?;
            EnsembleSpec::new(read_json_arg(b)?, samples, 0)
        }
        (None, None) => return Err(input_error("one of --spec or --builder is required".into())),
    };
    if let Some(n) = args.samples {
        spec.n_samples = n;
    }
    if let Some(psi) = args.psi {
        spec.psi = psi;
    }
    if let (Some(param), Some(grid)) = (&args.param, &args.grid) {
        spec.sweep = Some(Sweep {
            param: param.clone(),
            grid: parse_grid(grid)?,
        });
    }
    if !args.horizons.is_empty() {
        spec.horizons = args.horizons.clone();
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if args.jobs.is_some() {
        spec.jobs = args.jobs;
    }
    spec.tolerance = args.tol.resolve(spec.tolerance)?;
    let stats = run_ensemble(&spec)?;
    match &args.out {
        Some(dir) => {
            emit(Some(dir), "ensemble_stats.csv", &stats_csv(&stats))?;
            emit(Some(dir), "ensemble_samples.csv", &samples_csv(&stats))?;
            let spec_json = serde_json::to_string_pretty(&spec).expect("spec serializes") + "\n";
            emit(Some(dir), "ensemble_spec.json", &spec_json)
        }
        None => emit(None, "", &stats_csv(&stats)),
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Validate(args) => cmd_validate(&args),
        Command::ReturnTime { channel, psi, horizon } => cmd_return_time(&channel, psi, horizon),
        Command::Distribution { channel, psi, horizon } => cmd_distribution(&channel, psi, horizon),
        Command::Sweep {
            channel,
            psi,
            param,
            grid,
            horizons,
        } => cmd_sweep(&channel, psi, &param, &grid, &horizons),
        Command::Ensemble(args) => cmd_ensemble(&args),
        Command::Reproduce(args) => reproduce::run(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qrecur: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("0.1,0.5").unwrap(), vec![0.1, 0.5]);
        let g = parse_grid("0:0.25:1").unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let fine = parse_grid("0:0.05:1").unwrap();
        assert_eq!(fine.len(), 21);
        assert_eq!(fine[3], 0.15);
        assert_eq!(fine[20], 1.0);
        assert!(parse_grid("0:0:1").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
