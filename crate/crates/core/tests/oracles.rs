// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! Return times against closed forms and independent computations.

mod common;

use approx::assert_relative_eq;
use faer::Mat;
use qrecur::builders::{star_channel, uniform_decoherence, StarGraphSpec};
use qrecur::channel::compose;
use qrecur::recurrence::{
    analyze, classical_kac_oracle, expected_return_spectral, expected_return_summation,
    partial_return_times, quantization_verdict, return_series, tilde_rho, Method,
    DEFAULT_MAX_HORIZON,
};
use qrecur::{c64, QuantumChannel, StateVector};

use common::{random_kraus_channel, random_unitary_mixture, resolvent_oracle, tol};

fn real(x: f64) -> c64 {
    c64::new(x, 0.0)
}

/// Real rotation by `theta` followed by amplitude damping towards `|0⟩`
/// with rate `gamma`.
fn rotated_damping(theta: f64, gamma: f64) -> QuantumChannel {
    let (c, s) = (theta.cos(), theta.sin());
    let u = Mat::from_fn(2, 2, |i, j| real([[c, -s], [s, c]][i][j]));
    let k0 = Mat::from_fn(2, 2, |i, j| real([[1.0, 0.0], [0.0, (1.0 - gamma).sqrt()]][i][j]));
    let k1 = Mat::from_fn(2, 2, |i, j| real([[0.0, gamma.sqrt()], [0.0, 0.0]][i][j]));
    let damping = QuantumChannel::new(vec![k0, k1], &tol()).unwrap();
    compose(&damping, &QuantumChannel::unitary(u, &tol()).unwrap()).unwrap()
}

#[test]
fn rotated_damping_matches_geometric_closed_form() {
    // From |0⟩ the walker misses with probability (1-γ)sin²θ and then sits
    // in |1⟩, where each further miss has probability (1-γ)cos²θ. Hence
    // q_t = q_1 c^{t-1} and T = 1 + q_1/(1 - c).
    for &(theta, gamma) in &[(0.3_f64, 0.2_f64), (1.1, 0.5), (0.7, 0.05)] {
        let q1 = (1.0 - gamma) * theta.sin().powi(2);
        let c = (1.0 - gamma) * theta.cos().powi(2);
        let expected = 1.0 + q1 / (1.0 - c);

        let ch = rotated_damping(theta, gamma);
        let psi = StateVector::basis(2, 0).unwrap();
        let (a, _) = analyze(&ch, &psi, 10, &tol()).unwrap();
        assert!(!a.psi_unital);
        assert_relative_eq!(a.exact_t, expected, max_relative = 1e-10);
        for t in 1..=10 {
            assert_relative_eq!(a.q[t], q1 * c.powi(t as i32 - 1), max_relative = 1e-10);
        }
    }
}

#[test]
fn damping_without_rotation_never_returns_to_excited_state() {
    let ch = rotated_damping(0.0, 0.4);
    let psi = StateVector::basis(2, 1).unwrap();
    let (a, _) = expected_return_spectral(&ch, &psi, &tol()).unwrap();
    // a decay to |0⟩ is permanent: q_t = 0.4 for all t ≥ 1
    assert!(!a.recurrent);
    assert!(a.exact_t.is_infinite());
    let ground = StateVector::basis(2, 0).unwrap();
    assert_relative_eq!(
        expected_return_spectral(&ch, &ground, &tol()).unwrap().0.exact_t,
        1.0,
        max_relative = 1e-12
    );
}

#[test]
fn spectral_agrees_with_resolvent_and_summation() {
    for k in 0..30u64 {
        let dim = 2 + (k as usize % 4);
        let ch = if k % 3 == 0 {
            random_unitary_mixture(dim, 2, k)
        } else {
            random_kraus_channel(dim, 1 + (k as usize % 3), k)
        };
        let psi = StateVector::basis(dim, k as usize % dim).unwrap();
        let (a, _) = expected_return_spectral(&ch, &psi, &tol()).unwrap();
        let oracle = resolvent_oracle(&ch, &psi);
        assert_relative_eq!(a.exact_t, oracle, max_relative = 1e-8);
        let summed = expected_return_summation(&ch, &psi, &tol(), DEFAULT_MAX_HORIZON).unwrap();
        assert_relative_eq!(a.exact_t, summed, max_relative = 1e-7);
    }
}

#[test]
fn spectral_partial_times_match_direct_series() {
    let ch = random_kraus_channel(4, 2, 99);
    let psi = StateVector::basis(4, 1).unwrap();
    let series = return_series(&ch, &psi, 40).unwrap();
    let horizons: Vec<usize> = (1..=40).collect();
    let spectral = partial_return_times(&ch, &psi, &horizons, &tol()).unwrap();
    for (l, t) in horizons.iter().zip(spectral) {
        assert_relative_eq!(t, series.partial_t[l - 1], max_relative = 1e-10);
        assert_relative_eq!(series.partial_from_p(*l), series.partial_t[l - 1], max_relative = 1e-12);
    }
}

#[test]
fn tilde_rho_trace_is_the_return_time() {
    let ch = random_kraus_channel(3, 2, 5);
    let psi = StateVector::basis(3, 0).unwrap();
    let t = expected_return_spectral(&ch, &psi, &tol()).unwrap().0.exact_t;
    let tr = tilde_rho(&ch, &psi, &tol()).unwrap();
    assert_relative_eq!(tr.trace(), t, max_relative = 1e-9);
}

#[test]
fn block_diagonal_unitary_quantizes_to_block_size() {
    // 3-cycle on sites 0..3, site 3 left alone: relevant space {0, 1, 2}
    let u = Mat::from_fn(4, 4, |i, j| match (i, j) {
        (1, 0) | (2, 1) | (0, 2) | (3, 3) => real(1.0),
        _ => real(0.0),
    });
    let ch = QuantumChannel::unitary(u, &tol()).unwrap();
    let psi = StateVector::basis(4, 0).unwrap();
    let a = quantization_verdict(&ch, &psi, 6, &tol()).unwrap();
    assert_eq!(a.relevant_dim, 3);
    assert!(a.psi_unital);
    assert_relative_eq!(a.exact_t, 3.0, max_relative = 1e-12);
    assert_relative_eq!(a.p[2], 1.0, max_relative = 1e-12);
}

#[test]
fn uniform_decoherence_returns_at_once() {
    let ch = uniform_decoherence(5, 0.7).unwrap();
    let psi = StateVector::basis(5, 3).unwrap();
    let a = quantization_verdict(&ch, &psi, 3, &tol()).unwrap();
    assert_eq!(a.relevant_dim, 1);
    assert_relative_eq!(a.exact_t, 1.0, max_relative = 1e-12);
}

/// Stationary distribution by power iteration, independent of the LU
/// route inside the oracle.
fn stationary_by_power(p: &[Vec<f64>]) -> Vec<f64> {
    let n = p.len();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..20_000 {
        let mut next = vec![0.0; n];
        for a in 0..n {
            for b in 0..n {
                // lazy chain: same stationary law, no periodicity
                next[b] += pi[a] * 0.5 * (p[a][b] + if a == b { 1.0 } else { 0.0 });
            }
        }
        pi = next;
    }
    pi
}

#[test]
fn kac_oracle_matches_power_iteration() {
    let p = vec![
        vec![0.1, 0.6, 0.3, 0.0],
        vec![0.4, 0.0, 0.5, 0.1],
        vec![0.0, 0.2, 0.2, 0.6],
        vec![0.5, 0.0, 0.25, 0.25],
    ];
    let pi = stationary_by_power(&p);
    for j in 0..4 {
        assert_relative_eq!(classical_kac_oracle(&p, j, &tol()).unwrap(), 1.0 / pi[j], max_relative = 1e-10);
    }
}

#[test]
fn fully_dephased_star_is_the_classical_chain() {
    for seed in 0..10 {
        let ch = star_channel(&StarGraphSpec::random(5, 1.0, seed).unwrap()).unwrap();
        let psi = StateVector::basis(5, 0).unwrap();
        let (a, _) = analyze(&ch, &psi, 0, &tol()).unwrap();
        let kac = classical_kac_oracle(&ch.diagonal_action(), 0, &tol()).unwrap();
        assert_relative_eq!(kac, 5.0, max_relative = 1e-10);
        assert_relative_eq!(a.exact_t, kac, max_relative = 1e-8);
        assert!(matches!(a.method, Method::Spectral | Method::Summation));
    }
}
