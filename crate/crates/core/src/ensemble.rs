// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! Random-ensemble experiments.
//!
//! For every grid value of the swept parameter and every sample index `k`,
//! a channel is built from `split_seed(seed, grid_index, k)` and analysed.
//! Order statistics use nearest rank: the `q`-quantile of `n` finite values
//! is the `⌈q n⌉`-th smallest. Infinite return times are counted and left
//! out of the order statistics.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builders::BuilderSpec;
use crate::error::{Error, Result};
use crate::numerics::Tolerance;
use crate::recurrence::{analyze, partial_return_times_from};
use crate::rng::split_seed;
use crate::states::StateVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub param: String,
    pub grid: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub builder: BuilderSpec,
    /// Site index of `|Ψ⟩`.
    #[serde(default)]
    pub psi: usize,
    pub n_samples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    /// Horizons `L` for partial return times `T^(L)`.
    #[serde(default)]
    pub horizons: Vec<usize>,
    /// Reuse the seed of sample 0 for every sample (degenerate ensemble).
    #[serde(default)]
    pub identical_samples: bool,
    /// Worker threads; `None` uses all logical cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub tolerance: Tolerance,
}

impl EnsembleSpec {
    pub fn new(builder: BuilderSpec, n_samples: usize, seed: u64) -> Self {
        Self {
            builder,
            psi: 0,
            n_samples,
            seed,
            sweep: None,
            horizons: Vec::new(),
            identical_samples: false,
            jobs: None,
            tolerance: Tolerance::default(),
        }
    }

    pub fn with_sweep(mut self, param: &str, grid: Vec<f64>) -> Self {
        self.sweep = Some(Sweep {
            param: param.to_owned(),
            grid,
        });
        self
    }

    pub fn with_horizons(mut self, horizons: Vec<usize>) -> Self {
        self.horizons = horizons;
        self
    }

    /// Builder for each grid point; a single unswept point without a sweep.
    fn grid_builders(&self) -> Result<Vec<(Option<f64>, BuilderSpec)>> {
        match &self.sweep {
            None => Ok(vec![(None, self.builder.clone())]),
            Some(sweep) => {
                if sweep.grid.is_empty() {
                    return Err(Error::InvalidSpec("sweep grid is empty".into()));
                }
                sweep
                    .grid
                    .iter()
                    .map(|&v| {
                        let mut b = self.builder.clone();
                        b.set_param(&sweep.param, v)?;
                        Ok((Some(v), b))
                    })
                    .collect()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::InvalidSpec(format!(
                "an ensemble needs at least 2 samples, got {}",
                self.n_samples
            )));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidSpec("jobs must be positive".into()));
        }
        if self.psi >= self.builder.nodes() {
            return Err(Error::IndexOutOfRange {
                index: self.psi,
                dim: self.builder.nodes(),
            });
        }
        self.tolerance.validate()?;
        self.grid_builders().map(|_| ())
    }
}

/// Order statistics of one column of samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub count_infinite: usize,
    /// `None` when every sample is infinite.
    pub median: Option<f64>,
    pub lower_decile: Option<f64>,
    pub upper_decile: Option<f64>,
    /// Mean of the finite samples.
    pub mean: Option<f64>,
}

/// Nearest-rank quantile of sorted finite values, `0 < q ≤ 1`.
pub fn nearest_rank(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let mut finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
        finite.sort_by(f64::total_cmp);
        let mean = if finite.is_empty() {
            None
        } else {
            Some(finite.iter().sum::<f64>() / finite.len() as f64)
        };
        Self {
            n: values.len(),
            count_infinite: values.len() - finite.len(),
            median: nearest_rank(&finite, 0.5),
            lower_decile: nearest_rank(&finite, 0.1),
            upper_decile: nearest_rank(&finite, 0.9),
            mean,
        }
    }

    /// `upper_decile − lower_decile`.
    pub fn band_width(&self) -> Result<f64> {
        match (self.count_infinite, self.lower_decile, self.upper_decile) {
            (0, Some(lo), Some(hi)) => Ok(hi - lo),
            _ => Err(Error::UndefinedBand {
                count_infinite: self.count_infinite,
                n: self.n,
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub seed: u64,
    #[serde(with = "crate::ensemble::inf_float")]
    pub exact_t: f64,
    /// `T^(L)` in the order of [`EnsembleSpec::horizons`].
    pub partial_t: Vec<f64>,
    pub relevant_dim: usize,
    pub psi_unital: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizonSummary {
    pub horizon: usize,
    pub summary: Summary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPointStats {
    pub value: Option<f64>,
    pub exact: Summary,
    pub partial: Vec<HorizonSummary>,
    pub samples: Vec<SampleRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub param: Option<String>,
    pub horizons: Vec<usize>,
    pub points: Vec<GridPointStats>,
}

mod inf_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad float {s:?}"))),
        }
    }
}

fn run_sample(
    builder: &BuilderSpec,
    psi: &StateVector,
    horizons: &[usize],
    tol: &Tolerance,
    index: usize,
    seed: u64,
) -> Result<SampleRecord> {
    let channel = builder.build(seed)?;
    let (analysis, data) = analyze(&channel, psi, 0, tol)?;
    let partial_t = if horizons.is_empty() {
        Vec::new()
    } else {
        partial_return_times_from(&channel, psi, &data, horizons, tol)?
    };
    Ok(SampleRecord {
        index,
        seed,
        exact_t: analysis.exact_t,
        partial_t,
        relevant_dim: analysis.relevant_dim,
        psi_unital: analysis.psi_unital,
    })
}

pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleStats> {
    spec.validate()?;
    let psi = StateVector::basis(spec.builder.nodes(), spec.psi)?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(jobs) = spec.jobs {
            b = b.num_threads(jobs);
        }
        b.build()
            .map_err(|e| Error::InvalidSpec(format!("cannot start worker pool: {e}")))?
    };
    let mut points = Vec::new();
    for (grid_index, (value, builder)) in spec.grid_builders()?.into_iter().enumerate() {
        let seeds: Vec<u64> = (0..spec.n_samples)
            .map(|k| {
                let k = if spec.identical_samples { 0 } else { k };
                split_seed(spec.seed, grid_index as u64, k as u64)
            })
            .collect();
        let results: Vec<Result<SampleRecord>> = pool.install(|| {
            seeds
                .par_iter()
                .enumerate()
                .map(|(k, &seed)| run_sample(&builder, &psi, &spec.horizons, &spec.tolerance, k, seed))
                .collect()
        });
        let mut samples = Vec::with_capacity(results.len());
        for (k, r) in results.into_iter().enumerate() {
            match r {
                Ok(s) => samples.push(s),
                Err(e) => {
                    return Err(Error::Sample {
                        sample: k,
                        seed: seeds[k],
                        source: Box::new(e),
                    })
                }
            }
        }
        let exact: Vec<f64> = samples.iter().map(|s| s.exact_t).collect();
        let partial = spec
            .horizons
            .iter()
            .enumerate()
            .map(|(h, &horizon)| {
                let col: Vec<f64> = samples.iter().map(|s| s.partial_t[h]).collect();
                HorizonSummary {
                    horizon,
                    summary: Summary::of(&col),
                }
            })
            .collect();
        points.push(GridPointStats {
            value,
            exact: Summary::of(&exact),
            partial,
            samples,
        });
    }
    Ok(EnsembleStats {
        param: spec.sweep.as_ref().map(|s| s.param.clone()),
        horizons: spec.horizons.clone(),
        points,
    })
}

/// Decile band width at grid point `point`, for the exact return time
/// (`horizon = None`) or `T^(L)`.
pub fn decile_band_width(stats: &EnsembleStats, point: usize, horizon: Option<usize>) -> Result<f64> {
    let p = stats.points.get(point).ok_or(Error::IndexOutOfRange {
        index: point,
        dim: stats.points.len(),
    })?;
    match horizon {
        None => p.exact.band_width(),
        Some(l) => p
            .partial
            .iter()
            .find(|h| h.horizon == l)
            .ok_or_else(|| Error::InvalidSpec(format!("horizon {l} was not computed")))?
            .summary
            .band_width(),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// One row per (grid value, horizon, statistic). The exact return time
/// has horizon `inf`.
pub fn stats_csv(stats: &EnsembleStats) -> String {
    let mut out = String::from("grid_value,horizon,statistic,value\n");
    for p in &stats.points {
        let g = fmt_opt(p.value);
        let rows = std::iter::once(("inf".to_string(), &p.exact))
            .chain(p.partial.iter().map(|h| (h.horizon.to_string(), &h.summary)));
        for (horizon, s) in rows {
            for (name, v) in [
                ("median", fmt_opt(s.median)),
                ("lower_decile", fmt_opt(s.lower_decile)),
                ("upper_decile", fmt_opt(s.upper_decile)),
                ("mean", fmt_opt(s.mean)),
                ("count_infinite", s.count_infinite.to_string()),
            ] {
                let _ = writeln!(out, "{g},{horizon},{name},{v}");
            }
        }
    }
    out
}

/// Long-form raw samples: one row per (grid value, sample, horizon).
pub fn samples_csv(stats: &EnsembleStats) -> String {
    let mut out = String::from("grid_value,sample,seed,horizon,T\n");
    for p in &stats.points {
        let g = fmt_opt(p.value);
        for s in &p.samples {
            let _ = writeln!(out, "{g},{},{},inf,{}", s.index, s.seed, s.exact_t);
            for (l, t) in stats.horizons.iter().zip(&s.partial_t) {
                let _ = writeln!(out, "{g},{},{},{l},{t}", s.index, s.seed);
            }
        }
    }
    out
}
