// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs as a plain binary (`harness = false`) so the report is
//! always printed.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use qrecur::builders::{dark_states, star_channel, star_hamiltonian, BuilderSpec, StarGraphSpec, UnitarySpec};
use qrecur::ensemble::{decile_band_width, run_ensemble, EnsembleSpec, EnsembleStats};
use qrecur::numerics::{max_abs, max_abs_diff};
use qrecur::recurrence::{
    analyze, classical_kac_oracle, conditional_orbit_projector, conditional_spectral_radius,
    conditional_step, quantization_verdict, relevant_subspace, return_series, tilde_rho,
};
use qrecur::rng::split_seed;
use qrecur::{DensityOperator, QuantumChannel, StateVector};

use common::{random_kraus_channel, random_unitary_mixture, tol};

const M: usize = 6;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ensemble(builder: BuilderSpec, n: usize, seed: u64, grid: &[f64]) -> EnsembleStats {
    let spec = EnsembleSpec::new(builder, n, seed).with_sweep("d", grid.to_vec());
    run_ensemble(&spec).expect("ensemble runs")
}

/// Largest `|T − target|` over all samples, and whether every sample has
/// relevant dimension `dim` (when given).
fn worst_sample(stats: &EnsembleStats, target: f64, dim: Option<usize>) -> (f64, bool) {
    let mut worst: f64 = 0.0;
    let mut dims_ok = true;
    for p in &stats.points {
        for s in &p.samples {
            worst = worst.max((s.exact_t - target).abs());
            if let Some(r) = dim {
                dims_ok &= s.relevant_dim == r;
            }
        }
    }
    (worst, dims_ok)
}

fn star(d: f64) -> BuilderSpec {
    BuilderSpec::Star {
        nodes: M,
        hoppings: None,
        d,
    }
}

fn transfer(target: usize, d: f64) -> BuilderSpec {
    BuilderSpec::Transfer {
        nodes: M,
        target,
        source: None,
        d,
        unitary: UnitarySpec::Cue,
    }
}

fn median(stats: &EnsembleStats, point: usize) -> f64 {
    stats.points[point].exact.median.expect("finite samples")
}

fn c1_star_coherent() -> Outcome {
    let stats = ensemble(star(0.0), 100, 1, &[0.0]);
    let (worst, dims) = worst_sample(&stats, 2.0, Some(2));
    check(worst < 1e-6 && dims, format!("max |T-2| = {worst:.2e}, relevant_dim = 2 for all: {dims}"))
}

fn c2_star_decoherent() -> Outcome {
    let grid = [0.01, 0.1, 0.5, 1.0];
    let stats = ensemble(star(0.1), 100, 2, &grid);
    let (worst, dims) = worst_sample(&stats, 6.0, Some(6));
    check(worst < 1e-6 && dims, format!("max |T-6| = {worst:.2e} over d in {grid:?}, relevant_dim = 6 for all: {dims}"))
}

fn c3_loop_cue() -> Outcome {
    let builder = BuilderSpec::Loop {
        nodes: M,
        d: 0.5,
        unitary: UnitarySpec::Cue,
    };
    let stats = ensemble(builder, 200, 3, &[0.1, 0.5, 0.9]);
    let (worst, _) = worst_sample(&stats, 6.0, None);
    check(worst < 1e-6, format!("max |T-6| = {worst:.2e} over 600 samples"))
}

fn c4_transfer_away() -> Outcome {
    let grid = [0.2, 0.5, 0.8, 0.9, 0.95, 0.99];
    let stats = ensemble(transfer(5, 0.5), 200, 4, &grid);
    let medians: Vec<f64> = (0..grid.len()).map(|k| median(&stats, k)).collect();
    let increasing = medians[..5].windows(2).all(|w| w[0] < w[1])
        && [0, 1, 2, 4].windows(2).all(|w| medians[w[0]] < medians[w[1]]);
    let ratio = medians[5] / medians[3];
    check(
        increasing && (5.0..=20.0).contains(&ratio),
        format!("medians {medians:.3?}; median(0.99)/median(0.9) = {ratio:.2}"),
    )
}

fn c5_transfer_toward() -> Outcome {
    let stats = ensemble(transfer(0, 0.99), 2000, 5, &[0.99]);
    let m = median(&stats, 0);
    check((2.5..=3.5).contains(&m), format!("median T = {m:.4} at d = 0.99"))
}

fn c6_transfer_neutral() -> Outcome {
    let grid = [0.05, 0.1, 0.9];
    let stats = ensemble(transfer(2, 0.5), 2000, 6, &grid);
    let (m01, m09) = (median(&stats, 1), median(&stats, 2));
    let rel = (m09 - m01).abs() / m01;
    let w005 = decile_band_width(&stats, 0, None).map_err(|e| e.to_string())?;
    let w09 = decile_band_width(&stats, 2, None).map_err(|e| e.to_string())?;
    check(
        rel <= 0.1 && w09 > w005,
        format!("median {m01:.4} (d=0.1) vs {m09:.4} (d=0.9), rel diff {rel:.3}; width {w005:.3} (d=0.05) < {w09:.3} (d=0.9)"),
    )
}

fn c7_loop_near_identity() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for seed in 0..20u64 {
        for (d, t_peak, bound) in [(0.05, 1usize, 0.9), (0.95, 6, 0.5)] {
            let ch = BuilderSpec::Loop {
                nodes: M,
                d,
                unitary: UnitarySpec::DiskHamiltonian { radius: 0.1 },
            }
            .build(split_seed(7, 0, seed))
            .map_err(|e| e.to_string())?;
            let psi = StateVector::basis(M, 0).unwrap();
            let a = analyze(&ch, &psi, 20, &tol()).map_err(|e| e.to_string())?.0;
            let peak = a.p[t_peak - 1];
            let good = peak > bound && (a.exact_t - 6.0).abs() < 1e-6;
            ok &= good;
            if seed == 0 || !good {
                lines.push(format!("seed {seed} d={d}: p_{t_peak} = {peak:.4}, T = {:.9}", a.exact_t));
            }
        }
    }
    check(ok, format!("20 unitaries; {}", lines.join("; ")))
}

fn c8_oracle_equivalence() -> Outcome {
    let mut compared = 0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for k in 0..50u64 {
        let seed = split_seed(8, 0, k);
        let dim = 2 + (k as usize % 4);
        let ch = if k % 2 == 0 {
            random_unitary_mixture(dim, 1 + (k as usize / 2) % 3, seed)
        } else {
            random_kraus_channel(dim, 1 + (k as usize / 2) % 3, seed)
        };
        let psi = StateVector::basis(dim, 0).unwrap();
        let gap = 1.0 - conditional_spectral_radius(&ch, &psi, &tol()).map_err(|e| e.to_string())?;
        if gap <= 1e-3 {
            continue;
        }
        let spectral = analyze(&ch, &psi, 0, &tol()).map_err(|e| e.to_string())?.0.exact_t;
        let summed = *return_series(&ch, &psi, 10_000).map_err(|e| e.to_string())?.partial_t.last().unwrap();
        let diff = (spectral - summed).abs();
        compared += 1;
        worst = worst.max(diff);
        if diff >= 1e-5 {
            failures.push(format!("channel {k}: {spectral} vs {summed}"));
        }
    }
    let mut kac_worst: f64 = 0.0;
    let mut kac_integer: f64 = 0.0;
    for k in 0..20u64 {
        let spec = StarGraphSpec::random(M, 1.0, split_seed(8, 1, k)).unwrap();
        let ch = star_channel(&spec).unwrap();
        let psi = StateVector::basis(M, 0).unwrap();
        let t = analyze(&ch, &psi, 0, &tol()).map_err(|e| e.to_string())?.0.exact_t;
        let kac = classical_kac_oracle(&ch.diagonal_action(), 0, &tol()).map_err(|e| e.to_string())?;
        kac_worst = kac_worst.max((t - kac).abs());
        kac_integer = kac_integer.max((kac - kac.round()).abs());
        if (t - kac).abs() > 1e-6 || (kac - kac.round()).abs() > 1e-9 {
            failures.push(format!("star chain {k}: T = {t}, Kac = {kac}"));
        }
    }
    check(
        failures.is_empty() && compared >= 40,
        format!(
            "{compared}/50 channels with gap > 1e-3, max |spectral - T^(10^4)| = {worst:.2e}; 20 classical star chains, max |T - Kac| = {kac_worst:.2e}, max distance of Kac from an integer = {kac_integer:.2e}{}",
            if failures.is_empty() { String::new() } else { format!("; failures: {}", failures.join("; ")) }
        ),
    )
}

struct Instance {
    name: String,
    channel: QuantumChannel,
    star: Option<StarGraphSpec>,
}

fn instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for (k, d) in [0.0, 0.1, 0.5, 1.0].into_iter().enumerate() {
        let spec = StarGraphSpec::random(M, d, split_seed(9, 0, k as u64)).unwrap();
        out.push(Instance {
            name: format!("star d={d}"),
            channel: star_channel(&spec).unwrap(),
            star: Some(spec),
        });
    }
    let builders = [
        ("decoherence d=0.3", BuilderSpec::Decoherence { nodes: M, d: 0.3 }),
        ("transfer (a) d=0.5", transfer(5, 0.5)),
        ("transfer (b) d=0.5", transfer(0, 0.5)),
        ("transfer (c) d=0.5", transfer(2, 0.5)),
        ("loop cue d=0.3", BuilderSpec::Loop { nodes: M, d: 0.3, unitary: UnitarySpec::Cue }),
        (
            "loop disk d=0.6",
            BuilderSpec::Loop {
                nodes: M,
                d: 0.6,
                unitary: UnitarySpec::DiskHamiltonian { radius: 0.1 },
            },
        ),
        ("cue", BuilderSpec::Cue { nodes: M }),
        (
            "disk hamiltonian",
            BuilderSpec::DiskHamiltonian {
                nodes: M,
                radius: 1.0,
                include_diagonal: true,
            },
        ),
    ];
    for (k, (name, b)) in builders.into_iter().enumerate() {
        out.push(Instance {
            name: name.to_owned(),
            channel: b.build(split_seed(9, 1, k as u64)).unwrap(),
            star: None,
        });
    }
    out
}

fn c9_properties() -> Outcome {
    let mut failures = Vec::new();
    let mut unital_cases = 0;
    let psi = StateVector::basis(M, 0).unwrap();
    for inst in instances() {
        let ch = &inst.channel;
        let mut fail = |what: String| failures.push(format!("{}: {what}", inst.name));

        let series = return_series(ch, &psi, 200).unwrap();
        if series.q.windows(2).any(|w| w[1] > w[0] + 1e-12) {
            fail("q not monotone".into());
        }

        let mut rho = DensityOperator::pure(&psi);
        for t in 1..=60 {
            rho = conditional_step(ch, &psi, &rho).unwrap();
            let min = rho.min_eigenvalue(&tol()).unwrap();
            if min < -1e-12 {
                fail(format!("rho_cond({t}) has eigenvalue {min:.2e}"));
                break;
            }
        }

        let (pi, _) = relevant_subspace(ch, &psi, &tol()).unwrap();
        let cond = conditional_orbit_projector(ch, &psi, &tol()).unwrap();
        let diff = max_abs_diff(pi.matrix().as_ref(), cond.matrix().as_ref());
        if diff > 1e-8 {
            fail(format!("orbit projectors differ by {diff:.2e}"));
        }

        if ch.is_unital_on(&pi, &tol()).unwrap() {
            unital_cases += 1;
            let tr = tilde_rho(ch, &psi, &tol()).unwrap();
            let diff = max_abs_diff(tr.as_ref(), pi.matrix().as_ref());
            if diff > 1e-6 {
                fail(format!("tilde rho differs from the relevant projector by {diff:.2e}"));
            }
            if let Err(e) = quantization_verdict(ch, &psi, 0, &tol()) {
                fail(format!("quantization: {e}"));
            }
        }

        if ch.validate(&tol()).unital_global {
            for x in ch.fixed_points(&tol()).unwrap() {
                for a in ch.kraus() {
                    let comm = a * &x - &x * a;
                    let c = max_abs(comm.as_ref());
                    if c > 1e-8 {
                        fail(format!("fixed point fails to commute with a Kraus operator ({c:.2e})"));
                    }
                }
            }
        }

        if let Some(spec) = &inst.star {
            let h = star_hamiltonian(spec);
            for s in dark_states(spec).unwrap() {
                let hs = &h * s.amplitudes();
                let n = (0..hs.nrows()).map(|i| hs[i].norm()).fold(0.0, f64::max);
                if n > 1e-10 {
                    fail(format!("dark state not annihilated ({n:.2e})"));
                }
            }
        }
    }
    let n = instances().len();
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{n} builder instances, {unital_cases} unital on their relevant space; all properties hold")
        } else {
            failures.join("; ")
        },
    )
}

fn c10_band_shrinks() -> Outcome {
    let grid: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    let spec = EnsembleSpec::new(star(0.5), 500, 10)
        .with_sweep("d", grid.clone())
        .with_horizons(vec![700, 7000]);
    let stats = run_ensemble(&spec).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, d) in grid.iter().enumerate() {
        let w700 = decile_band_width(&stats, k, Some(700)).map_err(|e| e.to_string())?;
        let w7000 = decile_band_width(&stats, k, Some(7000)).map_err(|e| e.to_string())?;
        ok &= w7000 < w700;
        parts.push(format!("d={d}: {w700:.2e} > {w7000:.2e}"));
    }
    check(ok, parts.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 star graph d=0: T = 2, relevant_dim = 2", c1_star_coherent),
        ("2 star graph d>0: T = 6, relevant_dim = 6", c2_star_decoherent),
        ("3 loop transfer after CUE: T = 6", c3_loop_cue),
        ("4 transfer away from origin: median grows like 1/(1-d)", c4_transfer_away),
        ("5 transfer toward origin, d = 0.99: median near M/2", c5_transfer_toward),
        ("6 neutral transfer: flat median, wider band", c6_transfer_neutral),
        ("7 loop walk with near-identity U: peaked distribution, T = 6", c7_loop_near_identity),
        ("8 spectral vs summation vs classical oracle", c8_oracle_equivalence),
        ("9 property suite over builder instances", c9_properties),
        ("10 decile band of T^(L) shrinks from L=700 to L=7000", c10_band_shrinks),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] criterion {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
