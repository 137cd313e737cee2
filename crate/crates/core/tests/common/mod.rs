// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! Test-side channel generators and an independent return-time oracle.

#![allow(dead_code)]

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use qrecur::builders::cue_unitary;
use qrecur::rng::{complex_normal, rng_from_seed};
use qrecur::{c64, ComplexMatrix, QuantumChannel, StateVector, Tolerance};
use rand::Rng;

pub fn tol() -> Tolerance {
    Tolerance::default()
}

/// Gaussian Kraus set `G_j` completed to trace preservation as
/// `A_j = G_j S^{-1/2}` with `S = Σ G_j†G_j`. Generically not unital.
pub fn random_kraus_channel(dim: usize, n_ops: usize, seed: u64) -> QuantumChannel {
    let mut rng = rng_from_seed(seed);
    let g: Vec<ComplexMatrix> = (0..n_ops)
        .map(|_| Mat::from_fn(dim, dim, |_, _| complex_normal(&mut rng)))
        .collect();
    let mut s = Mat::<c64>::zeros(dim, dim);
    for gj in &g {
        s += gj.adjoint() * gj;
    }
    let eig = s.self_adjoint_eigen(Side::Lower).expect("Hermitian eigensolver");
    let u = eig.U();
    let vals = eig.S().column_vector();
    let inv_sqrt = Mat::from_fn(dim, dim, |i, j| {
        let mut acc = c64::new(0.0, 0.0);
        for k in 0..dim {
            acc += u[(i, k)] * u[(j, k)].conj() / vals[k].re.sqrt();
        }
        acc
    });
    let kraus = g.iter().map(|gj| gj * &inv_sqrt).collect();
    QuantumChannel::new(kraus, &tol()).expect("completed Kraus set is trace preserving")
}

/// `ρ ↦ Σ_j w_j U_j ρ U_j†` with CUE unitaries and random weights; unital.
pub fn random_unitary_mixture(dim: usize, n_ops: usize, seed: u64) -> QuantumChannel {
    let mut rng = rng_from_seed(seed);
    let w: Vec<f64> = (0..n_ops).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    let kraus = w
        .iter()
        .enumerate()
        .map(|(j, &wj)| {
            let u = cue_unitary(dim, seed.wrapping_mul(31).wrapping_add(j as u64 + 1));
            let s = c64::new((wj / total).sqrt(), 0.0);
            Mat::from_fn(dim, dim, |a, b| u[(a, b)] * s)
        })
        .collect();
    QuantumChannel::new(kraus, &tol()).expect("unitary mixture is trace preserving")
}

/// `T = Tr[(𝕀 − K)^{-1} vec(|Ψ⟩⟨Ψ|)]` with `K` the full-space matrix of
/// the filtered step, assembled entrywise here and solved by LU. Valid
/// only when the conditional dynamics is recurrent.
pub fn resolvent_oracle(channel: &QuantumChannel, psi: &StateVector) -> f64 {
    let d = channel.dim();
    let n = d * d;
    let v = psi.amplitudes();
    let filter = Mat::from_fn(d, d, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        c64::new(id, 0.0) - v[i] * v[j].conj()
    });
    let mut lhs = Mat::<c64>::identity(n, n);
    for a in channel.kraus() {
        let fa = &filter * a;
        // (ΠAρA†Π)[r, c] = Σ fa[r, r'] ρ[r', c'] conj(fa[c, c'])
        for r in 0..d {
            for c in 0..d {
                for rp in 0..d {
                    for cp in 0..d {
                        lhs[(c * d + r, cp * d + rp)] -= fa[(r, rp)] * fa[(c, cp)].conj();
                    }
                }
            }
        }
    }
    let mut rhs = Mat::<c64>::zeros(n, 1);
    for r in 0..d {
        for c in 0..d {
            rhs[(c * d + r, 0)] = v[r] * v[c].conj();
        }
    }
    let x = lhs.partial_piv_lu().solve(&rhs);
    (0..d).map(|i| x[(i * d + i, 0)].re).sum()
}
