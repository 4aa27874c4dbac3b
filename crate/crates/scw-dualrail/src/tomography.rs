//! Polarization-qubit tomography: six-projector measurement simulation with
//! Poisson count noise and iterative maximum-likelihood reconstruction.
//!
//! The measurement set is the standard over-complete analyzer basis
//! `{H, V, D, A, R, L}`. Counts follow the linear click model
//! `(γ + (ε/δt)·⟨n_Π⟩)·duration` per projector, with `⟨n_Π⟩` the mean photon
//! number the projector passes. Dark counts are not subtracted before
//! reconstruction; they bias the estimate exactly the way a real analyzer's
//! background does.
//!
//! Reconstruction uses the `RρR` fixed point: `R = Σ_j (f_j/p_j)·Π_j` with
//! observed frequencies `f_j` and predicted probabilities `p_j = Tr(Π_j ρ)`,
//! iterating `ρ ← N[RρR]` until the largest entry change drops below `1e-10`
//! (cap `10⁴` iterations).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::interface::{polarization_amplitudes, DetectorSpec};
use crate::math::{bessel_j, C64};

/// Convergence threshold on the largest entry change per iteration.
const MLE_TOL: f64 = 1e-10;
/// Iteration cap of the fixed-point loop.
const MLE_MAX_ITERS: usize = 10_000;
/// Poisson means above this are split into equal chunks (a sum of
/// independent Poisson draws is again Poisson, so chunking is exact).
const POISSON_CHUNK: f64 = 500.0;

/// Analyzer setting of one tomography acquisition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProjectorLabel {
    /// Horizontal, `|H⟩`.
    H,
    /// Vertical, `|V⟩`.
    V,
    /// Diagonal, `(|H⟩+|V⟩)/√2`.
    D,
    /// Anti-diagonal, `(|H⟩−|V⟩)/√2`.
    A,
    /// Right circular, `(|H⟩+i|V⟩)/√2`.
    R,
    /// Left circular, `(|H⟩−i|V⟩)/√2`.
    L,
}

impl ProjectorLabel {
    /// All six settings in the canonical acquisition (and RNG stream) order.
    pub const ALL: [ProjectorLabel; 6] = [
        ProjectorLabel::H,
        ProjectorLabel::V,
        ProjectorLabel::D,
        ProjectorLabel::A,
        ProjectorLabel::R,
        ProjectorLabel::L,
    ];

    /// Single-letter name used in CSV records.
    pub fn name(self) -> &'static str {
        match self {
            ProjectorLabel::H => "H",
            ProjectorLabel::V => "V",
            ProjectorLabel::D => "D",
            ProjectorLabel::A => "A",
            ProjectorLabel::R => "R",
            ProjectorLabel::L => "L",
        }
    }

    /// Parses the single-letter name (case-insensitive).
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "H" => Ok(ProjectorLabel::H),
            "V" => Ok(ProjectorLabel::V),
            "D" => Ok(ProjectorLabel::D),
            "A" => Ok(ProjectorLabel::A),
            "R" => Ok(ProjectorLabel::R),
            "L" => Ok(ProjectorLabel::L),
            other => Err(Error::Config(format!("unknown projector label '{other}'"))),
        }
    }

    /// The analyzer's pass state as a normalized ket `(c_H, c_V)`.
    pub fn ket(self) -> (C64, C64) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            ProjectorLabel::H => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
            ProjectorLabel::V => (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
            ProjectorLabel::D => (C64::new(s, 0.0), C64::new(s, 0.0)),
            ProjectorLabel::A => (C64::new(s, 0.0), C64::new(-s, 0.0)),
            ProjectorLabel::R => (C64::new(s, 0.0), C64::new(0.0, s)),
            ProjectorLabel::L => (C64::new(s, 0.0), C64::new(0.0, -s)),
        }
    }
}

impl std::fmt::Display for ProjectorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Complex 2×2 matrix in the `{|H⟩, |V⟩}` basis.
///
/// Doubles as the density-matrix type; reconstruction outputs satisfy the
/// density-matrix invariants (Hermitian, unit trace, positive semidefinite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    entries: [[C64; 2]; 2],
}

impl DensityMatrix2 {
    /// Matrix from explicit row-major entries.
    pub fn new(entries: [[C64; 2]; 2]) -> Self {
        DensityMatrix2 { entries }
    }

    /// The zero matrix.
    pub fn zero() -> Self {
        DensityMatrix2::new([[C64::new(0.0, 0.0); 2]; 2])
    }

    /// The identity matrix.
    pub fn identity() -> Self {
        let mut m = DensityMatrix2::zero();
        m.entries[0][0] = C64::new(1.0, 0.0);
        m.entries[1][1] = C64::new(1.0, 0.0);
        m
    }

    /// Rank-1 outer product `|v⟩⟨v|`.
    pub fn outer(v: (C64, C64)) -> Self {
        let (a, b) = v;
        DensityMatrix2::new([
            [a * a.conj(), a * b.conj()],
            [b * a.conj(), b * b.conj()],
        ])
    }

    /// Entry at `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row][col]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[[C64; 2]; 2] {
        &self.entries
    }

    /// Element-wise sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = DensityMatrix2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.entries[i][j] = self.entries[i][j] + other.entries[i][j];
            }
        }
        out
    }

    /// Element-wise difference `self − other`.
    pub fn sub(&self, other: &Self) -> Self {
        let mut out = DensityMatrix2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.entries[i][j] = self.entries[i][j] - other.entries[i][j];
            }
        }
        out
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = DensityMatrix2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.entries[i][j] = self.entries[i][0] * other.entries[0][j]
                    + self.entries[i][1] * other.entries[1][j];
            }
        }
        out
    }

    /// Real scalar multiple.
    pub fn scale(&self, factor: f64) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.entries[i][j] *= factor;
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        DensityMatrix2::new([
            [self.entries[0][0].conj(), self.entries[1][0].conj()],
            [self.entries[0][1].conj(), self.entries[1][1].conj()],
        ])
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        self.entries[0][0] + self.entries[1][1]
    }

    /// Determinant.
    pub fn det(&self) -> C64 {
        self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]
    }

    /// Largest absolute entry-wise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                max = max.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        max
    }

    /// Whether the matrix is Hermitian within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.entries[0][0].im.abs() <= tol
            && self.entries[1][1].im.abs() <= tol
            && (self.entries[0][1] - self.entries[1][0].conj()).norm() <= tol
    }

    /// Eigenvalues of a Hermitian matrix, ordered `(low, high)`.
    pub fn eigenvalues_hermitian(&self) -> (f64, f64) {
        let t = self.trace().re;
        let d = self.det().re;
        let disc = (t * t - 4.0 * d).max(0.0).sqrt();
        ((t - disc) / 2.0, (t + disc) / 2.0)
    }

    /// Trace distance `Tr|self − other|` (sum of absolute eigenvalues of the
    /// Hermitian difference).
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let (lo, hi) = self.sub(other).eigenvalues_hermitian();
        lo.abs() + hi.abs()
    }

    /// `Re Tr(ρ·Π)`: the Born probability of projector `proj` under `self`.
    pub fn expectation(&self, proj: &Self) -> f64 {
        self.mul(proj).trace().re
    }
}

/// Rank-1 projector `|label⟩⟨label|` of one analyzer setting.
pub fn projector(label: ProjectorLabel) -> DensityMatrix2 {
    DensityMatrix2::outer(label.ket())
}

/// One acquisition: projector setting, click count, accumulation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomographyRecord {
    /// Analyzer setting.
    pub projector: ProjectorLabel,
    /// Number of detector clicks.
    pub counts: u64,
    /// Accumulation time in seconds.
    pub duration_s: f64,
}

/// Exact Poisson draw by chunked inversion.
///
/// Means above [`POISSON_CHUNK`] are split into equal sub-means so the
/// inversion product never underflows; the chunk sum is distributed exactly
/// as the requested Poisson law.
fn sample_poisson(rng: &mut ChaCha12Rng, mean: f64) -> u64 {
    debug_assert!(mean >= 0.0 && mean.is_finite());
    if mean == 0.0 {
        return 0;
    }
    let chunks = (mean / POISSON_CHUNK).ceil().max(1.0) as u64;
    let lambda = mean / chunks as f64;
    let threshold = (-lambda).exp();
    let mut total = 0u64;
    for _ in 0..chunks {
        let mut k = 0u64;
        let mut p = 1.0f64;
        loop {
            p *= rng.gen::<f64>();
            if p <= threshold {
                break;
            }
            k += 1;
        }
        total += k;
    }
    total
}

fn projection_mean(state: (C64, C64), label: ProjectorLabel) -> f64 {
    let (ph, pv) = label.ket();
    // ⟨π|ψ⟩ with ψ unnormalized: |·|² is the mean photon number passed.
    (ph.conj() * state.0 + pv.conj() * state.1).norm_sqr()
}

fn check_qubit_state(state: (C64, C64)) -> Result<f64> {
    let n = state.0.norm_sqr() + state.1.norm_sqr();
    if !n.is_finite() {
        return Err(Error::domain("simulate_counts", "state amplitudes must be finite"));
    }
    if n > 1.0 + 1e-9 {
        return Err(Error::domain(
            "simulate_counts",
            format!("mean photon number {n} exceeds 1; outside the linear click regime"),
        ));
    }
    Ok(n)
}

/// Simulates one tomography acquisition set over the six projectors.
///
/// `state` is the unnormalized dual-rail amplitude pair `(c_H, c_V)`; its
/// squared norm is the mean photon number per gate and must not exceed 1.
/// Counts are Poisson with mean `(γ + (ε/δt)·⟨n_Π⟩)·duration`.
///
/// Determinism: the stream is `ChaCha12` seeded with `seed`, consumed by one
/// Poisson draw per projector in the fixed order `H, V, D, A, R, L`. The
/// seed→stream mapping is a stability contract relied on by regression tests.
pub fn simulate_counts(
    state: (C64, C64),
    det: &DetectorSpec,
    duration: f64,
    seed: u64,
) -> Result<Vec<TomographyRecord>> {
    check_qubit_state(state)?;
    if !duration.is_finite() || duration <= 0.0 {
        return Err(Error::domain(
            "simulate_counts",
            format!("duration {duration} must be positive"),
        ));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(6);
    for label in ProjectorLabel::ALL {
        let mean =
            (det.gamma_hz + det.epsilon / det.gate_s * projection_mean(state, label)) * duration;
        records.push(TomographyRecord {
            projector: label,
            counts: sample_poisson(&mut rng, mean),
            duration_s: duration,
        });
    }
    Ok(records)
}

/// Noiseless variant of [`simulate_counts`]: counts are the rounded expected
/// means, with no sampling.
pub fn expected_records(
    state: (C64, C64),
    det: &DetectorSpec,
    duration: f64,
) -> Result<Vec<TomographyRecord>> {
    check_qubit_state(state)?;
    if !duration.is_finite() || duration <= 0.0 {
        return Err(Error::domain(
            "expected_records",
            format!("duration {duration} must be positive"),
        ));
    }
    Ok(ProjectorLabel::ALL
        .iter()
        .map(|&label| {
            let mean = (det.gamma_hz
                + det.epsilon / det.gate_s * projection_mean(state, label))
                * duration;
            TomographyRecord {
                projector: label,
                counts: mean.round() as u64,
                duration_s: duration,
            }
        })
        .collect())
}

/// Rank of the projector set under vectorization, via Gram-Schmidt in `C⁴`.
fn projector_rank(records: &[TomographyRecord]) -> usize {
    let mut basis: Vec<[C64; 4]> = Vec::new();
    for rec in records {
        let p = projector(rec.projector);
        let mut v = [p.get(0, 0), p.get(0, 1), p.get(1, 0), p.get(1, 1)];
        for b in &basis {
            // v -= ⟨b, v⟩ b with orthonormal b.
            let ip: C64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            for k in 0..4 {
                v[k] -= ip * b[k];
            }
        }
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-9 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
        }
        if basis.len() == 4 {
            break;
        }
    }
    basis.len()
}

/// Full outcome of a maximum-likelihood reconstruction.
#[derive(Debug, Clone)]
pub struct MleOutcome {
    /// Reconstructed density matrix.
    pub rho: DensityMatrix2,
    /// Log-likelihood `Σ_j f_j ln p_j(ρ)` after each iteration, starting
    /// with the maximally mixed initial state.
    pub log_likelihoods: Vec<f64>,
    /// Number of `RρR` updates performed.
    pub iterations: usize,
    /// Whether the entry-change threshold was reached before the cap.
    pub converged: bool,
}

/// Maximum-likelihood density-matrix estimate from count records.
///
/// See [`mle_reconstruct_with_history`] for the algorithm; this wrapper
/// returns only the state.
pub fn mle_reconstruct(records: &[TomographyRecord]) -> Result<DensityMatrix2> {
    mle_reconstruct_with_history(records).map(|o| o.rho)
}

/// Maximum-likelihood reconstruction, keeping the per-iteration likelihood
/// history for convergence diagnostics.
///
/// Frequencies are rate-normalized (`counts/duration`, then normalized to
/// sum to one) so records with different accumulation times mix correctly.
/// Requires at least four linearly independent projectors; fewer make the
/// problem ill-posed.
pub fn mle_reconstruct_with_history(records: &[TomographyRecord]) -> Result<MleOutcome> {
    if records.is_empty() {
        return Err(Error::IllPosed("no tomography records".into()));
    }
    for rec in records {
        if !rec.duration_s.is_finite() || rec.duration_s <= 0.0 {
            return Err(Error::domain(
                "mle_reconstruct",
                format!("record duration {} must be positive", rec.duration_s),
            ));
        }
    }
    if projector_rank(records) < 4 {
        return Err(Error::IllPosed(
            "projector set spans fewer than 4 dimensions; the state is not identifiable".into(),
        ));
    }
    let rates: Vec<f64> = records
        .iter()
        .map(|r| r.counts as f64 / r.duration_s)
        .collect();
    let total: f64 = rates.iter().sum();
    if total <= 0.0 {
        return Err(Error::Model("zero total counts in tomography records".into()));
    }
    let freqs: Vec<f64> = rates.iter().map(|r| r / total).collect();
    let projs: Vec<DensityMatrix2> = records.iter().map(|r| projector(r.projector)).collect();

    let log_likelihood = |rho: &DensityMatrix2| -> f64 {
        freqs
            .iter()
            .zip(projs.iter())
            .filter(|(f, _)| **f > 0.0)
            .map(|(f, p)| f * rho.expectation(p).max(f64::MIN_POSITIVE).ln())
            .sum()
    };

    let mut rho = DensityMatrix2::identity().scale(0.5);
    let mut history = vec![log_likelihood(&rho)];
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..MLE_MAX_ITERS {
        let mut r_op = DensityMatrix2::zero();
        for (f, p) in freqs.iter().zip(projs.iter()) {
            if *f == 0.0 {
                continue;
            }
            let prob = rho.expectation(p).max(f64::MIN_POSITIVE);
            r_op = r_op.add(&p.scale(f / prob));
        }
        let mut next = r_op.mul(&rho).mul(&r_op);
        // Restore exact hermiticity lost to rounding before normalizing.
        next = next.add(&next.adjoint()).scale(0.5);
        let tr = next.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::Model("tomography iteration lost normalization".into()));
        }
        next = next.scale(1.0 / tr);
        iterations += 1;
        let delta = next.max_abs_diff(&rho);
        rho = next;
        history.push(log_likelihood(&rho));
        if delta < MLE_TOL {
            converged = true;
            break;
        }
    }
    Ok(MleOutcome {
        rho,
        log_likelihoods: history,
        iterations,
        converged,
    })
}

/// Fidelity `⟨ψ|ρ|ψ⟩` of a reconstructed state with a pure target ket.
///
/// The target must be normalized; the result is clamped to `[0, 1]` against
/// rounding spill. Invariant under a global phase of the target.
pub fn fidelity(rho: &DensityMatrix2, target: (C64, C64)) -> Result<f64> {
    let norm = target.0.norm_sqr() + target.1.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::domain(
            "fidelity",
            format!("target norm² {norm} is not 1"),
        ));
    }
    Ok(rho.expectation(&DensityMatrix2::outer(target)).clamp(0.0, 1.0))
}

/// How tomography counts are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountSampling {
    /// Deterministic rounded expected counts (no shot noise).
    Expected,
    /// Poisson sampling with the given base seed; the pipeline derives the
    /// per-state seed as `base + state index`.
    Poisson(u64),
}

/// One reconstructed preparation of the four-state pipeline.
#[derive(Debug, Clone)]
pub struct TomographyRun {
    /// Phase difference the state was prepared at.
    pub delta_phi: f64,
    /// Name of the ideal target polarization.
    pub target: &'static str,
    /// Ideal target ket.
    pub target_ket: (C64, C64),
    /// Simulated acquisition records.
    pub records: Vec<TomographyRecord>,
    /// Reconstructed density matrix.
    pub rho: DensityMatrix2,
    /// Fidelity of `rho` with the target.
    pub fidelity: f64,
}

/// Phase settings and ideal targets of the four canonical preparations.
pub const FOUR_STATE_CASES: [(f64, &str); 4] = [
    (0.0, "H"),
    (std::f64::consts::PI, "V"),
    (std::f64::consts::FRAC_PI_2, "D"),
    (1.5 * std::f64::consts::PI, "A"),
];

/// Prepares, measures and reconstructs the four first-order polarization
/// states at `Δφ ∈ {0, π, π/2, 3π/2}` (targets `H, V, D, A`).
///
/// The prepared state is the ideal first-order qubit scaled by the physical
/// amplitude `√2·α₀·J₁(β)`; `v_phase_offset` adds a static phase on the V
/// arm (0 reproduces the ideal preparation, nonzero values model a path
/// length offset which shows up as imaginary off-diagonal elements).
pub fn four_state_pipeline(
    alpha0: f64,
    beta: f64,
    v_phase_offset: f64,
    det: &DetectorSpec,
    duration: f64,
    sampling: CountSampling,
) -> Result<Vec<TomographyRun>> {
    if !alpha0.is_finite() || alpha0 <= 0.0 {
        return Err(Error::domain(
            "four_state_pipeline",
            format!("carrier amplitude {alpha0} must be positive"),
        ));
    }
    if !v_phase_offset.is_finite() {
        return Err(Error::domain(
            "four_state_pipeline",
            "V-arm phase offset must be finite",
        ));
    }
    let scale = std::f64::consts::SQRT_2 * alpha0 * bessel_j(1, beta)?;
    let offset = C64::from_polar(1.0, v_phase_offset);
    let mut runs = Vec::with_capacity(FOUR_STATE_CASES.len());
    for (index, (delta_phi, target)) in FOUR_STATE_CASES.iter().enumerate() {
        let (th, tv) = polarization_amplitudes(*delta_phi, 1)?;
        let prepared = (th * scale, tv * offset * scale);
        let records = match sampling {
            CountSampling::Expected => expected_records(prepared, det, duration)?,
            CountSampling::Poisson(base) => {
                simulate_counts(prepared, det, duration, base.wrapping_add(index as u64))?
            }
        };
        let rho = mle_reconstruct(&records)?;
        let f = fidelity(&rho, (th, tv))?;
        runs.push(TomographyRun {
            delta_phi: *delta_phi,
            target,
            target_ket: (th, tv),
            records,
            rho,
            fidelity: f,
        });
    }
    Ok(runs)
}
