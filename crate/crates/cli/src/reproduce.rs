// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! Figure presets. Each writes CSV data plus `manifest.json` recording
//! every seed and parameter used.
//!
//! | figure | content |
//! |--------|---------|
//! | 2 | star-graph first-return distributions, two hopping sets, d ∈ {0, 0.1, 0.5} |
//! | 3 | star-graph decile bands of `T^(L)` vs d for L ∈ {700, 7000, ∞} |
//! | 5 | population-transfer decile bands vs d, cases a, b and c |
//! | 7 | loop-walk distributions with a near-identity unitary |

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use qrecur::builders::{star_channel, BuilderSpec, StarGraphSpec, UnitarySpec};
use qrecur::ensemble::{run_ensemble, EnsembleSpec, EnsembleStats, Summary};
use qrecur::recurrence::{analyze, return_series};
use qrecur::rng::split_seed;
use qrecur::{Error, QuantumChannel, StateVector, Tolerance};
use serde_json::{json, Value};

use crate::{input_error, Failure};

const NODES: usize = 6;
const DEFAULT_SAMPLES: usize = 2000;

#[derive(Args)]
pub struct ReproduceArgs {
    /// Figure preset: 2, 3, 5 or 7.
    #[arg(long)]
    figure: u8,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Samples per grid point for figures 3 and 5.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Distribution length for figures 2 and 7.
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn rate_grid() -> Vec<f64> {
    (0..=20).map(|k| k as f64 / 20.0).collect()
}

fn write(dir: &Path, name: &str, content: &str, files: &mut Vec<String>) -> Result<(), Failure> {
    fs::write(dir.join(name), content).map_err(Error::from)?;
    files.push(name.to_owned());
    Ok(())
}

fn distribution_rows(
    csv: &mut String,
    prefix: &str,
    channel: &QuantumChannel,
    horizon: usize,
) -> Result<f64, Failure> {
    let psi = StateVector::basis(NODES, 0)?;
    let s = return_series(channel, &psi, horizon)?;
    for t in 1..=horizon {
        let _ = writeln!(csv, "{prefix},{t},{},{}", s.p[t - 1], s.q[t]);
    }
    Ok(analyze(channel, &psi, 0, &Tolerance::default())?.0.exact_t)
}

fn figure2(args: &ReproduceArgs, dir: &Path, files: &mut Vec<String>) -> Result<Value, Failure> {
    let horizon = args.horizon.unwrap_or(60);
    let rates = [0.0, 0.1, 0.5];
    let mut csv = String::from("set,d,t,p,q\n");
    let mut summary = String::from("set,d,exact_T\n");
    let mut seeds = Vec::new();
    for set in 0..2u64 {
        let seed = split_seed(args.seed, 2, set);
        seeds.push(seed);
        for d in rates {
            let channel = star_channel(&StarGraphSpec::random(NODES, d, seed)?)?;
            let t = distribution_rows(&mut csv, &format!("{set},{d}"), &channel, horizon)?;
            let _ = writeln!(summary, "{set},{d},{t}");
        }
    }
    write(dir, "fig2_distributions.csv", &csv, files)?;
    write(dir, "fig2_summary.csv", &summary, files)?;
    Ok(json!({ "nodes": NODES, "rates": rates, "horizon": horizon, "hopping_seeds": seeds }))
}

fn run_spec(spec: &EnsembleSpec) -> Result<EnsembleStats, Failure> {
    Ok(run_ensemble(spec)?)
}

fn figure3(args: &ReproduceArgs, dir: &Path, files: &mut Vec<String>) -> Result<Value, Failure> {
    let mut spec = EnsembleSpec::new(
        BuilderSpec::Star {
            nodes: NODES,
            hoppings: None,
            d: 0.0,
        },
        args.samples,
        split_seed(args.seed, 3, 0),
    )
    .with_sweep("d", rate_grid())
    .with_horizons(vec![700, 7000]);
    spec.jobs = args.jobs;
    let stats = run_spec(&spec)?;
    let mut csv = String::from("d,L,lower,median,upper\n");
    for p in &stats.points {
        let d = fmt_opt(p.value);
        let rows = p
            .partial
            .iter()
            .map(|h| (h.horizon.to_string(), &h.summary))
            .chain(std::iter::once(("inf".to_string(), &p.exact)));
        for (l, s) in rows {
            let _ = writeln!(
                csv,
                "{d},{l},{},{},{}",
                fmt_opt(s.lower_decile),
                fmt_opt(s.median),
                fmt_opt(s.upper_decile)
            );
        }
    }
    write(dir, "fig3_bands.csv", &csv, files)?;
    Ok(json!({ "ensemble": spec }))
}

fn band_csv(stats: &EnsembleStats) -> String {
    let mut csv = String::from("d,lower,median,upper,mean,count_infinite\n");
    for p in &stats.points {
        let s: &Summary = &p.exact;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            fmt_opt(p.value),
            fmt_opt(s.lower_decile),
            fmt_opt(s.median),
            fmt_opt(s.upper_decile),
            fmt_opt(s.mean),
            s.count_infinite
        );
    }
    csv
}

fn figure5(args: &ReproduceArgs, dir: &Path, files: &mut Vec<String>) -> Result<Value, Failure> {
    // target site of the transfer; the source is the next site mod M
    let cases = [("a", 5usize), ("b", 0), ("c", 2)];
    let mut specs = serde_json::Map::new();
    for (k, (name, target)) in cases.into_iter().enumerate() {
        let mut spec = EnsembleSpec::new(
            BuilderSpec::Transfer {
                nodes: NODES,
                target,
                source: None,
                d: 0.0,
                unitary: UnitarySpec::Cue,
            },
            args.samples,
            split_seed(args.seed, 5, k as u64),
        )
        .with_sweep("d", rate_grid());
        spec.jobs = args.jobs;
        let stats = run_spec(&spec)?;
        write(dir, &format!("fig5_case_{name}.csv"), &band_csv(&stats), files)?;
        specs.insert(name.to_owned(), json!(spec));
    }
    Ok(Value::Object(specs))
}

fn figure7(args: &ReproduceArgs, dir: &Path, files: &mut Vec<String>) -> Result<Value, Failure> {
    let horizon = args.horizon.unwrap_or(30);
    let rates = [0.05, 0.25, 0.5, 0.75, 0.95];
    let seed = split_seed(args.seed, 7, 0);
    let mut csv = String::from("d,t,p,q\n");
    let mut summary = String::from("d,exact_T\n");
    for d in rates {
        let channel = BuilderSpec::Loop {
            nodes: NODES,
            d,
            unitary: UnitarySpec::DiskHamiltonian { radius: 0.1 },
        }
        .build(seed)?;
        let t = distribution_rows(&mut csv, &d.to_string(), &channel, horizon)?;
        let _ = writeln!(summary, "{d},{t}");
    }
    write(dir, "fig7_distributions.csv", &csv, files)?;
    write(dir, "fig7_summary.csv", &summary, files)?;
    Ok(json!({ "nodes": NODES, "rates": rates, "horizon": horizon, "radius": 0.1, "unitary_seed": seed }))
}

pub fn run(args: &ReproduceArgs) -> Result<(), Failure> {
    if args.samples < 2 {
        return Err(input_error("--samples must be at least 2".into()));
    }
    fs::create_dir_all(&args.out).map_err(Error::from)?;
    let dir = args.out.as_path();
    let mut files = Vec::new();
    let parameters = match args.figure {
        2 => figure2(args, dir, &mut files)?,
        3 => figure3(args, dir, &mut files)?,
        5 => figure5(args, dir, &mut files)?,
        7 => figure7(args, dir, &mut files)?,
        f => return Err(input_error(format!("no preset for figure {f}; choose 2, 3, 5 or 7"))),
    };
    let manifest = json!({
        "figure": args.figure,
        "seed": args.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "parameters": parameters,
        "files": files,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(dir.join("manifest.json"), text).map_err(Error::from)?;
    Ok(())
}
