// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! First-return statistics of monitored open dynamics.
//!
//! After every channel step a two-outcome measurement asks whether the
//! system is back in `|Ψ⟩`. Conditioned on "no return so far" the state
//! evolves as `ρ_cond(t+1) = ℳ[𝒮[ρ_cond(t)]]` with `ℳ[σ] = Π σ Π`,
//! `Π = 𝕀 − |Ψ⟩⟨Ψ|` and `ρ_cond(0) = |Ψ⟩⟨Ψ|`. Then
//!
//! * `q_t = Tr ρ_cond(t)` is the probability of no return up to `t`,
//! * `p_t = q_{t−1} − q_t` is the first-return distribution,
//! * `T = Σ_t t p_t = Σ_{t≥0} q_t`, and the truncated
//!   `T^(L) = Σ_{t≤L} t p_t + (L+1)(1 − Σ_{t≤L} p_t) = Σ_{t=0}^{L} q_t`.
//!
//! The conditional state never leaves the relevant subspace (the smallest
//! subspace containing `|Ψ⟩` and invariant under every Kraus operator), so
//! the exact return time is computed from the spectrum of `ℳ𝒮` restricted
//! to operators on that subspace. When the channel maps the projector onto
//! the relevant subspace to itself, `T` equals its dimension.

use faer::{Col, Mat};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::channel::{measurement_filter, vec_index, vectorize, QuantumChannel};
use crate::error::{Error, Result};
use crate::numerics::{
    self, c64, eig_general, orthogonal_residual, spectral_radius, support_projector, ComplexMatrix,
    ComplexVector, Projector, Tolerance, ONE, ZERO,
};
use crate::states::{DensityOperator, StateVector};

/// Step cap for summation-based evaluation.
pub const DEFAULT_MAX_HORIZON: usize = 1_000_000;

/// Consecutive steps the geometric tail estimate has to stay below the
/// threshold before a summation is accepted.
const TAIL_WINDOW: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spectral,
    Summation,
}

/// Survival and first-return series up to a horizon `L`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReturnSeries {
    /// `q[t] = q_t` for `t = 0..=L`; `q[0] = 1`.
    pub q: Vec<f64>,
    /// `p[t - 1] = p_t` for `t = 1..=L`.
    pub p: Vec<f64>,
    /// `partial_t[l - 1] = T^(l)` for `l = 1..=L`.
    pub partial_t: Vec<f64>,
}

impl ReturnSeries {
    pub fn horizon(&self) -> usize {
        self.p.len()
    }

    /// `T^(L)` through the first-return form
    /// `Σ_{t≤L} t p_t + (L+1)(1 − Σ_{t≤L} p_t)`.
    pub fn partial_from_p(&self, l: usize) -> f64 {
        let p = &self.p[..l];
        let weighted: f64 = p.iter().enumerate().map(|(k, &pt)| (k + 1) as f64 * pt).sum();
        let total: f64 = p.iter().sum();
        weighted + (l as f64 + 1.0) * (1.0 - total)
    }
}

/// Full result of a return-time analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnAnalysis {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    #[serde(rename = "partial_T")]
    pub partial_t: Vec<f64>,
    #[serde(rename = "exact_T", with = "float_or_inf")]
    pub exact_t: f64,
    pub recurrent: bool,
    pub relevant_dim: usize,
    pub psi_unital: bool,
    pub method: Method,
}

impl ReturnAnalysis {
    pub fn series(&self) -> ReturnSeries {
        ReturnSeries {
            q: self.q.clone(),
            p: self.p.clone(),
            partial_t: self.partial_t.clone(),
        }
    }

    fn with_series(mut self, series: ReturnSeries) -> Self {
        self.q = series.q;
        self.p = series.p;
        self.partial_t = series.partial_t;
        self
    }
}

/// `+∞` is written as the string `"inf"`.
mod float_or_inf {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
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

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}

/// Spectral decomposition of the conditional step `ℳ𝒮`, taken on operators
/// over the relevant subspace.
#[derive(Clone, Debug)]
pub struct SpectralData {
    /// `α_n`.
    pub eigenvalues: Vec<c64>,
    /// `c_n` with `|Ψ⟩⟨Ψ| = Σ_n c_n χ_n`; empty when defective.
    pub coefficients: Vec<c64>,
    /// `Tr χ_n`.
    pub traces: Vec<c64>,
    /// Right eigenvectors `vec(χ_n)` as columns, in relevant-subspace
    /// coordinates.
    pub modes: ComplexMatrix,
    pub defective: bool,
    pub condition: f64,
    /// Dimension `r` of the relevant subspace; the operator space has
    /// dimension `r²`.
    pub basis_dim: usize,
}

impl SpectralData {
    /// Terms `c_n Tr χ_n` that survive the `eps_converge` cut.
    fn weights<'a>(&'a self, tol: &'a Tolerance) -> impl Iterator<Item = (c64, c64)> + 'a {
        self.eigenvalues
            .iter()
            .zip(self.coefficients.iter().zip(&self.traces))
            .map(|(&a, (&c, &tr))| (a, c * tr))
            .filter(move |(_, w)| w.norm() >= tol.eps_converge)
    }

    /// `Σ_n c_n Tr χ_n / (1 − α_n)`, or `None` when some excited mode has
    /// `|α_n| ≥ 1 − eps_rank` (non-recurrent). The imaginary residue is
    /// returned alongside.
    pub fn expected_return_time(&self, tol: &Tolerance) -> Option<(f64, f64)> {
        let mut total = ZERO;
        for (alpha, w) in self.weights(tol) {
            if alpha.norm() >= 1.0 - tol.eps_rank || (ONE - alpha).norm() < tol.eps_rank {
                return None;
            }
            total += w / (ONE - alpha);
        }
        Some((total.re, total.im))
    }

    /// `T^(L) = Σ_n c_n Tr χ_n (α_n^{L+1} − 1)/(α_n − 1)`.
    pub fn partial_return_time(&self, horizon: usize, tol: &Tolerance) -> f64 {
        let mut total = ZERO;
        for (alpha, w) in self.weights(tol) {
            let geometric = if (alpha - ONE).norm() < tol.eps_rank {
                c64::new(horizon as f64 + 1.0, 0.0)
            } else {
                (alpha.powi(horizon as i32 + 1) - ONE) / (alpha - ONE)
            };
            total += w * geometric;
        }
        total.re
    }

    /// `Σ_n c_n χ_n` in relevant-subspace coordinates (`r × r`).
    pub fn reconstruct_initial(&self) -> Option<ComplexMatrix> {
        if self.defective {
            return None;
        }
        let r = self.basis_dim;
        let c = Col::from_fn(self.coefficients.len(), |k| self.coefficients[k]);
        let v = &self.modes * &c;
        Some(Mat::from_fn(r, r, |i, j| v[vec_index(i, j, r)]))
    }
}

/// Orthonormal basis of the relevant subspace, obtained by closing
/// `{|Ψ⟩}` under the Kraus operators.
#[derive(Clone, Debug)]
pub struct RelevantSubspace {
    pub basis: Vec<ComplexVector>,
    pub projector: Projector,
}

impl RelevantSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `dim × r` matrix with the basis vectors as columns.
    pub fn isometry(&self) -> ComplexMatrix {
        let n = self.projector.dim();
        Mat::from_fn(n, self.basis.len(), |i, k| self.basis[k][i])
    }
}

fn check_psi(channel: &QuantumChannel, psi: &StateVector) -> Result<()> {
    if psi.dim() != channel.dim() {
        return Err(Error::DimensionMismatch {
            expected: channel.dim(),
            found: psi.dim(),
        });
    }
    Ok(())
}

/// Breadth-first closure of `span{start}` under `ops`: every operator is
/// applied to every newly found direction until a full round adds none.
pub fn orbit_closure(
    ops: &[ComplexMatrix],
    start: &ComplexVector,
    tol: &Tolerance,
) -> Vec<ComplexVector> {
    let mut basis: Vec<ComplexVector> = Vec::new();
    if let Some(v) = orthogonal_residual(&basis, start, tol.eps_rank) {
        basis.push(v);
    }
    let dim = start.nrows();
    let mut frontier: Vec<usize> = (0..basis.len()).collect();
    while !frontier.is_empty() && basis.len() < dim {
        let mut next = Vec::new();
        for &k in &frontier {
            for a in ops {
                let cand = a * &basis[k];
                if let Some(v) = orthogonal_residual(&basis, &cand, tol.eps_rank) {
                    next.push(basis.len());
                    basis.push(v);
                }
            }
        }
        frontier = next;
    }
    basis
}

/// Relevant subspace with its orthonormal basis.
pub fn relevant_basis(
    channel: &QuantumChannel,
    psi: &StateVector,
    tol: &Tolerance,
) -> Result<RelevantSubspace> {
    check_psi(channel, psi)?;
    let basis = orbit_closure(channel.kraus(), psi.amplitudes(), tol);
    let projector = Projector::from_orthonormal(&basis, channel.dim());
    Ok(RelevantSubspace { basis, projector })
}

/// Projector onto the relevant subspace and its dimension.
pub fn relevant_subspace(
    channel: &QuantumChannel,
    psi: &StateVector,
    tol: &Tolerance,
) -> Result<(Projector, usize)> {
    let rel = relevant_basis(channel, psi, tol)?;
    let dim = rel.dim();
    Ok((rel.projector, dim))
}

/// Same closure, but under the filtered operators `(𝕀 − |Ψ⟩⟨Ψ|) A_j`.
pub fn conditional_orbit_projector(
    channel: &QuantumChannel,
    psi: &StateVector,
    tol: &Tolerance,
) -> Result<Projector> {
    check_psi(channel, psi)?;
    let filter = measurement_filter(psi, tol)?;
    let ops: Vec<ComplexMatrix> = channel.kraus().iter().map(|a| filter.matrix() * a).collect();
    let basis = orbit_closure(&ops, psi.amplitudes(), tol);
    Ok(Projector::from_orthonormal(&basis, channel.dim()))
}

/// `supp(Σ_{t=0}^{terms} 𝒮^t[|Ψ⟩⟨Ψ|])`, the series form of the relevant
/// projector. Each term is trace normalized, so the support is unchanged.
pub fn series_support_projector(
    channel: &QuantumChannel,
    psi: &StateVector,
    terms: usize,
    tol: &Tolerance,
) -> Result<Projector> {
    check_psi(channel, psi)?;
    let mut rho = psi.projector();
    let mut sum = rho.clone();
    for _ in 0..terms {
        rho = channel.apply_unchecked(rho.as_ref());
        sum += &rho;
    }
    let sym = Mat::from_fn(sum.nrows(), sum.ncols(), |i, j| (sum[(i, j)] + sum[(j, i)].conj()) * 0.5);
    support_projector(sym.as_ref(), tol)
}

/// `(𝕀 − |Ψ⟩⟨Ψ|) 𝒮[ρ] (𝕀 − |Ψ⟩⟨Ψ|)`.
pub fn conditional_step(
    channel: &QuantumChannel,
    psi: &StateVector,
    rho: &DensityOperator,
) -> Result<DensityOperator> {
    check_psi(channel, psi)?;
    let stepped = channel.apply(rho)?;
    let filter = measurement_filter(psi, &Tolerance::default())?;
    Ok(DensityOperator::from_matrix_unchecked(
        filter.sandwich(stepped.as_ref()),
    ))
}

/// Iterates the conditional dynamics with the filtered Kraus operators
/// `Π A_j`, calling `visit(t, ρ_cond(t))` for `t = 0, 1, ...` until it
/// returns `false` or `max_steps` is reached.
fn iterate_conditional(
    channel: &QuantumChannel,
    psi: &StateVector,
    max_steps: usize,
    mut visit: impl FnMut(usize, &ComplexMatrix) -> bool,
) -> Result<()> {
    check_psi(channel, psi)?;
    let filter = measurement_filter(psi, &Tolerance::default())?;
    let ops: Vec<ComplexMatrix> = channel.kraus().iter().map(|a| filter.matrix() * a).collect();
    let dim = channel.dim();
    let mut rho = psi.projector();
    if !visit(0, &rho) {
        return Ok(());
    }
    for t in 1..=max_steps {
        let mut next = Mat::<c64>::zeros(dim, dim);
        for k in &ops {
            next += k * &rho * k.adjoint();
        }
        rho = next;
        if !visit(t, &rho) {
            break;
        }
    }
    Ok(())
}

/// `q_t`, `p_t` and `T^(L')` for `t, L' ≤ horizon`, by direct iteration.
pub fn return_series(
    channel: &QuantumChannel,
    psi: &StateVector,
    horizon: usize,
) -> Result<ReturnSeries> {
    if horizon == 0 {
        return Err(Error::InvalidSpec("horizon must be at least 1".into()));
    }
    let mut q = Vec::with_capacity(horizon + 1);
    iterate_conditional(channel, psi, horizon, |_, rho| {
        q.push(numerics::trace(rho.as_ref()).re);
        true
    })?;
    let p: Vec<f64> = q.windows(2).map(|w| w[0] - w[1]).collect();
    let mut partial_t = Vec::with_capacity(horizon);
    let mut acc = q[0];
    for &qt in &q[1..] {
        acc += qt;
        partial_t.push(acc);
    }
    Ok(ReturnSeries { q, p, partial_t })
}

/// `ℳ𝒮` on operators over the relevant subspace, plus `vec(|Ψ⟩⟨Ψ|)` in
/// the same coordinates.
pub fn restricted_conditional_matrix(
    channel: &QuantumChannel,
    psi: &StateVector,
    rel: &RelevantSubspace,
) -> Result<(ComplexMatrix, ComplexVector)> {
    let q = rel.isometry();
    let r = rel.dim();
    let kraus: Vec<ComplexMatrix> = channel.kraus().iter().map(|a| q.adjoint() * a * &q).collect();
    let local_psi: ComplexVector = q.adjoint() * psi.amplitudes();
    let filter = Mat::from_fn(r, r, |i, j| {
        let id = if i == j { ONE } else { ZERO };
        id - local_psi[i] * local_psi[j].conj()
    });
    let tol = Tolerance::default();
    let restricted = QuantumChannel::from_kraus_unchecked(kraus)?;
    let filter = Projector::new(filter, &tol)?;
    let matrix = restricted.to_superoperator_matrix(Some(&filter))?;
    let v0 = vectorize(numerics::outer(&local_psi, &local_psi).as_ref());
    Ok((matrix, v0))
}

/// Eigenvalues of `ℳ𝒮` restricted to the relevant subspace.
pub fn conditional_spectrum(
    channel: &QuantumChannel,
    psi: &StateVector,
    tol: &Tolerance,
) -> Result<Vec<c64>> {
    let rel = relevant_basis(channel, psi, tol)?;
    let (matrix, _) = restricted_conditional_matrix(channel, psi, &rel)?;
    Ok(eig_general(matrix.as_ref(), tol)?.eigenvalues)
}

/// Spectral radius of the restricted conditional step.
pub fn conditional_spectral_radius(
    channel: &QuantumChannel,
    psi: &StateVector,
    tol: &Tolerance,
) -> Result<f64> {
    Ok(spectral_radius(&conditional_spectrum(channel, psi, tol)?))
}

fn spectral_data(
    channel: &QuantumChannel,
    psi: &StateVector,
    rel: &RelevantSubspace,
    tol: &Tolerance,
) -> Result<SpectralData> {
    let (matrix, v0) = restricted_conditional_matrix(channel, psi, rel)?;
    let eig = eig_general(matrix.as_ref(), tol)?;
    let r = rel.dim();
    let traces = (0..eig.eigenvalues.len())
        .map(|n| (0..r).map(|i| eig.right[(vec_index(i, i, r), n)]).sum())
        .collect();
    let coefficients = match eig.coefficients(&v0) {
        Some(c) => (0..c.nrows()).map(|k| c[k]).collect(),
        None => Vec::new(),
    };
    Ok(SpectralData {
        eigenvalues: eig.eigenvalues,
        coefficients,
        traces,
        modes: eig.right,
        defective: eig.defective,
        condition: eig.condition,
        basis_dim: r,
    })
}

/// `T = Σ_{t≥0} q_t` by direct summation, stopped once the geometric tail
/// estimate `q_L ρ̂/(1 − ρ̂)` with `ρ̂ = q_L/q_{L−1}` has stayed below
/// `eps_check` for a few consecutive steps. The tail estimate is a
/// heuristic: it is exact only for a single decaying mode.
pub fn expected_return_summation(
    channel: &QuantumChannel,
    psi: &StateVector,
    tol: &Tolerance,
    max_horizon: usize,
) -> Result<f64> {
    let mut total = 0.0;
    let mut prev = f64::NAN;
    let mut settled = 0usize;
    let mut last_tail = f64::INFINITY;
    let mut done = None;
    iterate_conditional(channel, psi, max_horizon, |_, rho| {
        let q = numerics::trace(rho.as_ref()).re.max(0.0);
        total += q;
        if q <= f64::MIN_POSITIVE {
            done = Some(total);
            return false;
        }
        if prev.is_finite() && prev > 0.0 {
            let ratio = q / prev;
            last_tail = if ratio < 1.0 {
                q * ratio / (1.0 - ratio)
            } else {
                f64::INFINITY
            };
            if last_tail < tol.eps_check {
                settled += 1;
                if settled >= TAIL_WINDOW {
                    done = Some(total + last_tail);
                    return false;
                }
            } else {
                settled = 0;
            }
        }
        prev = q;
        true
    })?;
    done.ok_or(Error::NonConvergent {
        horizon: max_horizon,
        tail: last_tail,
    })
}

/// Exact expected return time from the spectrum of the conditional step.
///
/// Falls back to [`expected_return_summation`] when the eigenvector basis
/// is too ill-conditioned to expand `|Ψ⟩⟨Ψ|` in, or the spectral sum comes
/// out with a non-negligible imaginary part. The returned analysis has
/// empty series fields and `psi_unital = false`; see
/// [`quantization_verdict`] for the full picture.
pub fn expected_return_spectral(
    channel: &QuantumChannel,
    psi: &StateVector,
    tol: &Tolerance,
) -> Result<(ReturnAnalysis, SpectralData)> {
    let rel = relevant_basis(channel, psi, tol)?;
    expected_return_with(channel, psi, &rel, tol, DEFAULT_MAX_HORIZON)
}

fn expected_return_with(
    channel: &QuantumChannel,
    psi: &StateVector,
    rel: &RelevantSubspace,
    tol: &Tolerance,
    max_horizon: usize,
) -> Result<(ReturnAnalysis, SpectralData)> {
    let data = spectral_data(channel, psi, rel, tol)?;
    let base = ReturnAnalysis {
        q: Vec::new(),
        p: Vec::new(),
        partial_t: Vec::new(),
        exact_t: f64::INFINITY,
        recurrent: false,
        relevant_dim: rel.dim(),
        psi_unital: false,
        method: Method::Spectral,
    };
    if !data.defective {
        match data.expected_return_time(tol) {
            None => return Ok((base, data)),
            Some((re, im)) if im.abs() <= tol.eps_check * re.abs().max(1.0) => {
                return Ok((
                    ReturnAnalysis {
                        exact_t: re,
                        recurrent: true,
                        ..base
                    },
                    data,
                ));
            }
            Some(_) => {}
        }
    }
    let t = expected_return_summation(channel, psi, tol, max_horizon)?;
    Ok((
        ReturnAnalysis {
            exact_t: t,
            recurrent: true,
            method: Method::Summation,
            ..base
        },
        data,
    ))
}

/// `T^(L)` for each requested horizon, from the spectral expansion when it
/// is usable and by direct iteration otherwise.
pub fn partial_return_times(
    channel: &QuantumChannel,
    psi: &StateVector,
    horizons: &[usize],
    tol: &Tolerance,
) -> Result<Vec<f64>> {
    let rel = relevant_basis(channel, psi, tol)?;
    let data = spectral_data(channel, psi, &rel, tol)?;
    partial_return_times_from(channel, psi, &data, horizons, tol)
}

/// [`partial_return_times`] reusing an existing decomposition.
pub fn partial_return_times_from(
    channel: &QuantumChannel,
    psi: &StateVector,
    data: &SpectralData,
    horizons: &[usize],
    tol: &Tolerance,
) -> Result<Vec<f64>> {
    if !data.defective {
        return Ok(horizons.iter().map(|&l| data.partial_return_time(l, tol)).collect());
    }
    let max = horizons.iter().copied().max().unwrap_or(1).max(1);
    let series = return_series(channel, psi, max)?;
    Ok(horizons
        .iter()
        .map(|&l| if l == 0 { 1.0 } else { series.partial_t[l - 1] })
        .collect())
}

/// Full analysis: relevant subspace, Ψ-unitality, exact return time and
/// the series up to `horizon`.
///
/// When the channel is unital on the relevant subspace the return time
/// must equal the subspace dimension; a miss by more than `eps_quantize`
/// is returned as [`Error::TheoremViolation`] carrying the analysis.
pub fn quantization_verdict(
    channel: &QuantumChannel,
    psi: &StateVector,
    horizon: usize,
    tol: &Tolerance,
) -> Result<ReturnAnalysis> {
    let (analysis, _) = analyze(channel, psi, horizon, tol)?;
    if analysis.psi_unital {
        let defect = (analysis.exact_t - analysis.relevant_dim as f64).abs();
        if !(defect < tol.eps_quantize) {
            return Err(Error::TheoremViolation {
                defect,
                analysis: Box::new(analysis),
            });
        }
    }
    Ok(analysis)
}

/// Like [`quantization_verdict`] but never rejects; also returns the
/// spectral data.
pub fn analyze(
    channel: &QuantumChannel,
    psi: &StateVector,
    horizon: usize,
    tol: &Tolerance,
) -> Result<(ReturnAnalysis, SpectralData)> {
    tol.validate()?;
    let rel = relevant_basis(channel, psi, tol)?;
    let psi_unital = channel.is_unital_on(&rel.projector, tol)?;
    let (analysis, data) = expected_return_with(channel, psi, &rel, tol, DEFAULT_MAX_HORIZON)?;
    let analysis = ReturnAnalysis {
        psi_unital,
        ..analysis
    };
    let analysis = if horizon > 0 {
        analysis.with_series(return_series(channel, psi, horizon)?)
    } else {
        analysis
    };
    Ok((analysis, data))
}

/// `ρ̃_cond = Σ_{t≥0} ρ_cond(t)`, summed until the trace increment drops
/// below `eps_converge`.
pub fn tilde_rho(
    channel: &QuantumChannel,
    psi: &StateVector,
    tol: &Tolerance,
) -> Result<DensityOperator> {
    let radius = conditional_spectral_radius(channel, psi, tol)?;
    if radius >= 1.0 - tol.eps_rank {
        return Err(Error::NonRecurrent {
            spectral_radius: radius,
        });
    }
    let dim = channel.dim();
    let mut sum = Mat::<c64>::zeros(dim, dim);
    let mut last = f64::INFINITY;
    iterate_conditional(channel, psi, DEFAULT_MAX_HORIZON, |_, rho| {
        sum += rho;
        last = numerics::trace(rho.as_ref()).re;
        last >= tol.eps_converge
    })?;
    if last >= tol.eps_converge {
        return Err(Error::NonConvergent {
            horizon: DEFAULT_MAX_HORIZON,
            tail: last,
        });
    }
    Ok(DensityOperator::from_matrix_unchecked(sum))
}

/// Partial sums `Σ_{t≤L} ρ_cond(t)` for `L = 0..=horizon`, reporting the
/// largest eigenvalue of each.
pub fn tilde_rho_partial_max_eigenvalues(
    channel: &QuantumChannel,
    psi: &StateVector,
    horizon: usize,
    tol: &Tolerance,
) -> Result<Vec<f64>> {
    let dim = channel.dim();
    let mut sum = Mat::<c64>::zeros(dim, dim);
    let mut out = Vec::with_capacity(horizon + 1);
    let mut err = None;
    iterate_conditional(channel, psi, horizon, |_, rho| {
        sum += rho;
        match numerics::hermitian_eigen(sum.as_ref(), tol) {
            Ok(e) => {
                out.push(e.values.last().copied().unwrap_or(0.0));
                true
            }
            Err(e) => {
                err = Some(e);
                false
            }
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Classical expected return time to state `j` of a row-stochastic chain:
/// `1/π_j` for the stationary distribution `π` of the closed class
/// containing `j`, or `+∞` when `j` is transient. Transitions with
/// probability below `eps_converge` are treated as absent.
pub fn classical_kac_oracle(p: &[Vec<f64>], j: usize, tol: &Tolerance) -> Result<f64> {
    let n = p.len();
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, dim: n });
    }
    for (row, r) in p.iter().enumerate() {
        if r.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        let sum: f64 = r.iter().sum();
        if (sum - 1.0).abs() > tol.eps_check || r.iter().any(|&x| x < -tol.eps_check) {
            return Err(Error::NotStochastic { row, sum });
        }
    }
    let edge = |a: usize, b: usize| p[a][b] > tol.eps_converge;
    let reach = |from: usize| -> Vec<bool> {
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(a) = stack.pop() {
            for b in 0..n {
                if !seen[b] && edge(a, b) {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    };
    let from_j = reach(j);
    let class: Vec<usize> = (0..n).filter(|&k| from_j[k]).collect();
    if class.iter().any(|&k| !reach(k)[j]) {
        return Ok(f64::INFINITY);
    }

    // π (P_C − 𝕀) = 0 with Σ π = 1: transpose, and swap the last equation
    // for the normalization.
    let m = class.len();
    let mut a = Mat::<f64>::from_fn(m, m, |r, c| {
        let (from, to) = (class[c], class[r]);
        let id = if r == c { 1.0 } else { 0.0 };
        let w = if edge(from, to) { p[from][to] } else { 0.0 };
        w - id
    });
    let mut b = Mat::<f64>::zeros(m, 1);
    for c in 0..m {
        a[(m - 1, c)] = 1.0;
    }
    b[(m - 1, 0)] = 1.0;
    use faer::linalg::solvers::Solve;
    let pi = a.partial_piv_lu().solve(&b);
    let idx = class.iter().position(|&k| k == j).expect("j is in its own class");
    let weight = pi[(idx, 0)];
    if !(weight.is_finite() && weight > 0.0) {
        return Err(Error::Eigen(format!("stationary weight {weight} is not positive")));
    }
    Ok(1.0 / weight)
}
