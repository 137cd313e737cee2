// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! Channel families and special states.
//!
//! Sites are labelled `0..M`; the walk starts from site 0 unless a caller
//! says otherwise. Each family follows the same pattern: a coherent step
//! (a unitary) followed by an incoherent channel.

use faer::{Col, Mat};
use serde::{Deserialize, Serialize};

use crate::channel::{compose, QuantumChannel};
use crate::error::{Error, Result};
use crate::numerics::{
    c64, unitary_from_hamiltonian, ComplexMatrix, ComplexVector, Tolerance, ONE, ZERO,
};
use crate::rng::{complex_normal, rng_from_seed, uniform_disk, uniform_symmetric};
use crate::states::StateVector;

/// Star graph: hub 0 coupled to leaves `1..M` with amplitudes `v_j`,
/// followed by uniform decoherence at rate `d`.
#[derive(Clone, Debug)]
pub struct StarGraphSpec {
    hoppings: Vec<c64>,
    decoherence_rate: f64,
}

impl StarGraphSpec {
    /// `hoppings[j - 1]` is `v_j` for leaf `j`.
    pub fn new(hoppings: Vec<c64>, decoherence_rate: f64) -> Result<Self> {
        if hoppings.is_empty() {
            return Err(Error::InvalidSpec("a star graph needs at least 2 nodes".into()));
        }
        if let Some(k) = hoppings.iter().position(|v| v.norm() == 0.0) {
            return Err(Error::ZeroHopping { index: k + 1 });
        }
        check_rate(decoherence_rate)?;
        Ok(Self {
            hoppings,
            decoherence_rate,
        })
    }

    /// Hoppings drawn uniformly from the unit disk.
    pub fn random(nodes: usize, decoherence_rate: f64, seed: u64) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InvalidSpec("a star graph needs at least 2 nodes".into()));
        }
        Self::new(random_hoppings(nodes - 1, seed), decoherence_rate)
    }

    pub fn nodes(&self) -> usize {
        self.hoppings.len() + 1
    }

    pub fn hoppings(&self) -> &[c64] {
        &self.hoppings
    }

    pub fn decoherence_rate(&self) -> f64 {
        self.decoherence_rate
    }

    pub fn with_rate(&self, decoherence_rate: f64) -> Result<Self> {
        Self::new(self.hoppings.clone(), decoherence_rate)
    }

    /// `v̄ = (Σ |v_j|²)^{1/2}`.
    pub fn vbar(&self) -> f64 {
        self.hoppings.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferMode {
    SingleEdge,
    FullLoop,
}

/// Incoherent population transfer. In `SingleEdge` mode population moves
/// from `source` to `target`; in `FullLoop` mode it moves `j+1 → j` around
/// all sites and `source`/`target` are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferSpec {
    pub nodes: usize,
    pub source: usize,
    pub target: usize,
    pub rate: f64,
    pub mode: TransferMode,
}

impl TransferSpec {
    pub fn validate(&self) -> Result<()> {
        check_rate(self.rate)?;
        if self.nodes == 0 {
            return Err(Error::InvalidSpec("nodes must be positive".into()));
        }
        if self.mode == TransferMode::SingleEdge {
            for idx in [self.source, self.target] {
                if idx >= self.nodes {
                    return Err(Error::IndexOutOfRange {
                        index: idx,
                        dim: self.nodes,
                    });
                }
            }
            if self.source == self.target {
                return Err(Error::InvalidSpec("source and target must differ".into()));
            }
        }
        Ok(())
    }

    pub fn channel(&self) -> Result<QuantumChannel> {
        self.validate()?;
        match self.mode {
            TransferMode::FullLoop => loop_transfer(self.nodes, self.rate),
            TransferMode::SingleEdge => {
                let (m, s, t, d) = (self.nodes, self.source, self.target, self.rate);
                let mut b0 = Mat::<c64>::zeros(m, m);
                b0[(t, s)] = c64::new(d.sqrt(), 0.0);
                let mut b1 = Mat::<c64>::identity(m, m);
                b1[(s, s)] = c64::new((1.0 - d).sqrt(), 0.0);
                QuantumChannel::new(vec![b0, b1], &Tolerance::default())
            }
        }
    }
}

fn check_rate(d: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::RateOutOfRange(d));
    }
    Ok(())
}

fn ket_bra(dim: usize, row: usize, col: usize, amp: f64) -> ComplexMatrix {
    let mut m = Mat::zeros(dim, dim);
    m[(row, col)] = c64::new(amp, 0.0);
    m
}

/// `H = Σ_j v_j |j⟩⟨0| + h.c.`
pub fn star_hamiltonian(spec: &StarGraphSpec) -> ComplexMatrix {
    let m = spec.nodes();
    let mut h = Mat::zeros(m, m);
    for (k, &v) in spec.hoppings.iter().enumerate() {
        h[(k + 1, 0)] = v;
        h[(0, k + 1)] = v.conj();
    }
    h
}

/// `𝒮[ρ] = 𝒟[U ρ U†]` with `U = e^{-iH}` and `𝒟` the uniform decoherence.
pub fn star_channel(spec: &StarGraphSpec) -> Result<QuantumChannel> {
    let tol = Tolerance::default();
    let u = unitary_from_hamiltonian(star_hamiltonian(spec).as_ref(), &tol)?;
    let coherent = QuantumChannel::unitary(u, &tol)?;
    compose(
        &uniform_decoherence(spec.nodes(), spec.decoherence_rate)?,
        &coherent,
    )
}

/// Dephasing in the site basis: off-diagonal entries shrink by `1 − d`.
/// Kraus set `{√d |j⟩⟨j|}_{j<M} ∪ {√(1−d) 𝕀}`.
pub fn uniform_decoherence(nodes: usize, d: f64) -> Result<QuantumChannel> {
    check_rate(d)?;
    let mut kraus: Vec<ComplexMatrix> = (0..nodes).map(|j| ket_bra(nodes, j, j, d.sqrt())).collect();
    kraus.push(Mat::from_fn(nodes, nodes, |i, j| {
        if i == j {
            c64::new((1.0 - d).sqrt(), 0.0)
        } else {
            ZERO
        }
    }));
    QuantumChannel::new(kraus, &Tolerance::default())
}

/// Partial transfer of population from site `(j+1) mod M` onto site `j`.
///
/// Kraus operators `B₀ = √d |j⟩⟨j+1|` and
/// `B₁ = 𝕀 + (√(1−d) − 1) |j+1⟩⟨j+1|`. The damping in `B₁` sits on the
/// source site; that is what makes `B₀†B₀ + B₁†B₁ = 𝕀`.
pub fn population_transfer(nodes: usize, target: usize, d: f64) -> Result<QuantumChannel> {
    if target >= nodes {
        return Err(Error::IndexOutOfRange {
            index: target,
            dim: nodes,
        });
    }
    TransferSpec {
        nodes,
        source: (target + 1) % nodes,
        target,
        rate: d,
        mode: TransferMode::SingleEdge,
    }
    .channel()
}

/// Transfer around the loop `j+1 → j` (and `0 → M−1`) at uniform rate `d`.
/// Both `Σ B†B` and `Σ BB†` equal 𝕀, so the channel is unital.
pub fn loop_transfer(nodes: usize, d: f64) -> Result<QuantumChannel> {
    check_rate(d)?;
    if nodes == 0 {
        return Err(Error::InvalidSpec("nodes must be positive".into()));
    }
    let mut kraus: Vec<ComplexMatrix> = (0..nodes.saturating_sub(1))
        .map(|j| ket_bra(nodes, j, j + 1, d.sqrt()))
        .collect();
    kraus.push(ket_bra(nodes, nodes - 1, 0, d.sqrt()));
    kraus.push(Mat::from_fn(nodes, nodes, |i, j| {
        if i == j {
            c64::new((1.0 - d).sqrt(), 0.0)
        } else {
            ZERO
        }
    }));
    QuantumChannel::new(kraus, &Tolerance::default())
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal moved back into `Q`.
pub fn cue_unitary(nodes: usize, seed: u64) -> ComplexMatrix {
    let mut rng = rng_from_seed(seed);
    // fill row by row so the stream layout does not depend on storage order
    let mut z = Mat::<c64>::zeros(nodes, nodes);
    for i in 0..nodes {
        for j in 0..nodes {
            z[(i, j)] = complex_normal(&mut rng);
        }
    }
    let qr = z.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    Mat::from_fn(nodes, nodes, |i, k| {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { ONE };
        q[(i, k)] * phase
    })
}

/// Random Hermitian matrix with every entry inside the disk of radius `r`.
///
/// Off-diagonal entries `H_lm` (`l < m`) are uniform on the open complex
/// disk; `H_ml = conj(H_lm)`. Diagonal entries are real, uniform on
/// `(-r, r)`, or zero when `include_diagonal` is false.
pub fn random_disk_hamiltonian_with(
    nodes: usize,
    radius: f64,
    include_diagonal: bool,
    seed: u64,
) -> Result<ComplexMatrix> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidSpec(format!("radius must be positive, got {radius}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut h = Mat::<c64>::zeros(nodes, nodes);
    for l in 0..nodes {
        if include_diagonal {
            h[(l, l)] = c64::new(uniform_symmetric(&mut rng, radius), 0.0);
        }
        for m in (l + 1)..nodes {
            let z = uniform_disk(&mut rng, radius);
            h[(l, m)] = z;
            h[(m, l)] = z.conj();
        }
    }
    Ok(h)
}

pub fn random_disk_hamiltonian(nodes: usize, radius: f64, seed: u64) -> Result<ComplexMatrix> {
    random_disk_hamiltonian_with(nodes, radius, true, seed)
}

/// `count` nonzero amplitudes uniform on the unit disk.
pub fn random_hoppings(count: usize, seed: u64) -> Vec<c64> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = uniform_disk(&mut rng, 1.0);
        if v.norm() > 0.0 {
            out.push(v);
        }
    }
    out
}

/// Zero-energy eigenstates of the star Hamiltonian with no weight on the hub:
/// `|Ψ_j⟩ ∝ Σ_{l=1}^{M−1} e^{2πi jl/(M−1)} / v_l* |l⟩` for `j = 1..M−2`.
///
/// The phase period is the number of leaves, `M − 1`; with that period the
/// hub amplitude `Σ_l e^{2πi jl/(M−1)}` cancels exactly.
pub fn dark_states(spec: &StarGraphSpec) -> Result<Vec<StateVector>> {
    let m = spec.nodes();
    let leaves = (m - 1) as f64;
    (1..m.saturating_sub(1))
        .map(|j| {
            let v = Col::from_fn(m, |l| {
                if l == 0 {
                    ZERO
                } else {
                    let theta = 2.0 * std::f64::consts::PI * (j * l) as f64 / leaves;
                    c64::new(theta.cos(), theta.sin()) / spec.hoppings[l - 1].conj()
                }
            });
            StateVector::normalized(v)
        })
        .collect()
}

/// `|±⟩ = (|0⟩ ± |v⟩)/√2` with `|v⟩ = v̄⁻¹ Σ v_j |j⟩`; `H|±⟩ = ±v̄|±⟩`.
pub fn plus_minus_states(spec: &StarGraphSpec) -> Result<(StateVector, StateVector)> {
    let m = spec.nodes();
    let vbar = spec.vbar();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let make = |sign: f64| -> ComplexVector {
        Col::from_fn(m, |l| {
            if l == 0 {
                c64::new(s, 0.0)
            } else {
                spec.hoppings[l - 1] * (sign * s / vbar)
            }
        })
    };
    let tol = Tolerance::default();
    Ok((StateVector::new(make(1.0), &tol)?, StateVector::new(make(-1.0), &tol)?))
}

/// Coherent part of a composite family.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnitarySpec {
    Identity,
    #[default]
    Cue,
    DiskHamiltonian {
        radius: f64,
    },
}

impl UnitarySpec {
    pub fn sample(&self, nodes: usize, seed: u64) -> Result<ComplexMatrix> {
        match self {
            UnitarySpec::Identity => Ok(Mat::identity(nodes, nodes)),
            UnitarySpec::Cue => Ok(cue_unitary(nodes, seed)),
            UnitarySpec::DiskHamiltonian { radius } => {
                let h = random_disk_hamiltonian(nodes, *radius, seed)?;
                unitary_from_hamiltonian(h.as_ref(), &Tolerance::default())
            }
        }
    }
}

fn default_true() -> bool {
    true
}

/// Declarative channel description, as used in config files and on the
/// command line. Random ingredients are drawn from the seed passed to
/// [`BuilderSpec::build`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BuilderSpec {
    /// Star graph with decoherence. Hoppings are `[re, im]` pairs for
    /// leaves `1..M`; omitted means uniform on the unit disk.
    Star {
        nodes: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hoppings: Option<Vec<[f64; 2]>>,
        d: f64,
    },
    Decoherence {
        nodes: usize,
        d: f64,
    },
    /// Single-edge transfer after a unitary. `source` defaults to
    /// `(target + 1) mod nodes`.
    Transfer {
        nodes: usize,
        target: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        source: Option<usize>,
        d: f64,
        #[serde(default)]
        unitary: UnitarySpec,
    },
    Loop {
        nodes: usize,
        d: f64,
        #[serde(default)]
        unitary: UnitarySpec,
    },
    Cue {
        nodes: usize,
    },
    DiskHamiltonian {
        nodes: usize,
        radius: f64,
        #[serde(default = "default_true")]
        include_diagonal: bool,
    },
}

impl BuilderSpec {
    pub fn nodes(&self) -> usize {
        match *self {
            BuilderSpec::Star { nodes, .. }
            | BuilderSpec::Decoherence { nodes, .. }
            | BuilderSpec::Transfer { nodes, .. }
            | BuilderSpec::Loop { nodes, .. }
            | BuilderSpec::Cue { nodes }
            | BuilderSpec::DiskHamiltonian { nodes, .. } => nodes,
        }
    }

    /// Whether `build` consumes randomness.
    pub fn is_random(&self) -> bool {
        match self {
            BuilderSpec::Star { hoppings, .. } => hoppings.is_none(),
            BuilderSpec::Decoherence { .. } => false,
            BuilderSpec::Transfer { unitary, .. } | BuilderSpec::Loop { unitary, .. } => {
                *unitary != UnitarySpec::Identity
            }
            BuilderSpec::Cue { .. } | BuilderSpec::DiskHamiltonian { .. } => true,
        }
    }

    /// Sets a numeric parameter by name (`d`, `radius` or `nodes`).
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        let unknown = || Error::InvalidSpec(format!("builder has no parameter `{name}`"));
        match (name, self) {
            (
                "d",
                BuilderSpec::Star { d, .. }
                | BuilderSpec::Decoherence { d, .. }
                | BuilderSpec::Transfer { d, .. }
                | BuilderSpec::Loop { d, .. },
            ) => {
                check_rate(value)?;
                *d = value;
            }
            ("radius", BuilderSpec::DiskHamiltonian { radius, .. }) => *radius = value,
            (
                "radius",
                BuilderSpec::Transfer { unitary, .. } | BuilderSpec::Loop { unitary, .. },
            ) => match unitary {
                UnitarySpec::DiskHamiltonian { radius } => *radius = value,
                _ => return Err(unknown()),
            },
            ("nodes", spec) => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidSpec(format!("nodes must be a positive integer, got {value}")));
                }
                let n = value as usize;
                match spec {
                    BuilderSpec::Star { nodes, .. }
                    | BuilderSpec::Decoherence { nodes, .. }
                    | BuilderSpec::Transfer { nodes, .. }
                    | BuilderSpec::Loop { nodes, .. }
                    | BuilderSpec::Cue { nodes }
                    | BuilderSpec::DiskHamiltonian { nodes, .. } => *nodes = n,
                }
            }
            _ => return Err(unknown()),
        }
        Ok(())
    }

    pub fn build(&self, seed: u64) -> Result<QuantumChannel> {
        let tol = Tolerance::default();
        match self {
            BuilderSpec::Star { nodes, hoppings, d } => {
                let spec = match hoppings {
                    Some(h) => {
                        if h.len() + 1 != *nodes {
                            return Err(Error::InvalidSpec(format!(
                                "star graph with {nodes} nodes needs {} hoppings, got {}",
                                nodes.saturating_sub(1),
                                h.len()
                            )));
                        }
                        StarGraphSpec::new(h.iter().map(|&[re, im]| c64::new(re, im)).collect(), *d)?
                    }
                    None => StarGraphSpec::random(*nodes, *d, seed)?,
                };
                star_channel(&spec)
            }
            BuilderSpec::Decoherence { nodes, d } => uniform_decoherence(*nodes, *d),
            BuilderSpec::Transfer {
                nodes,
                target,
                source,
                d,
                unitary,
            } => {
                if *target >= *nodes {
                    return Err(Error::IndexOutOfRange {
                        index: *target,
                        dim: *nodes,
                    });
                }
                let transfer = TransferSpec {
                    nodes: *nodes,
                    source: source.unwrap_or((target + 1) % nodes),
                    target: *target,
                    rate: *d,
                    mode: TransferMode::SingleEdge,
                }
                .channel()?;
                let u = QuantumChannel::unitary(unitary.sample(*nodes, seed)?, &tol)?;
                compose(&transfer, &u)
            }
            BuilderSpec::Loop { nodes, d, unitary } => {
                let u = QuantumChannel::unitary(unitary.sample(*nodes, seed)?, &tol)?;
                compose(&loop_transfer(*nodes, *d)?, &u)
            }
            BuilderSpec::Cue { nodes } => QuantumChannel::unitary(cue_unitary(*nodes, seed), &tol),
            BuilderSpec::DiskHamiltonian {
                nodes,
                radius,
                include_diagonal,
            } => {
                let h = random_disk_hamiltonian_with(*nodes, *radius, *include_diagonal, seed)?;
                QuantumChannel::unitary(unitary_from_hamiltonian(h.as_ref(), &tol)?, &tol)
            }
        }
    }
}
