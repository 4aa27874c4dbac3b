//! Multimode coherent states, the carrier re-modulation interface, and
//! interference observables (phase scans, fringe visibility).
//!
//! A phase modulator driven at angular frequency `Ω` with depth `β` and phase
//! `φ` turns a coherent carrier `|α₀⟩` into a comb of coherent sidebands with
//! amplitudes `α₀·J_m(β)·e^{imφ}`. The interface modeled by
//! [`interface_transform`] taps the carrier with a spectral filter (power
//! coefficient `r`, sideband suppression `ϱ`), re-modulates it locally with
//! the same depth, and interferes the result with the incoming sidebands on a
//! balanced beamsplitter. The two output ports become the H and V rails of a
//! polarization qubit.
//!
//! The filter coefficients enter the port amplitudes exactly as the factors
//! `r`, `(1−r)`, `(1−ϱ)`; an alternative mode treating them as power
//! coefficients (amplitude factors `√r`, `√(1−r)`, `√(1−ϱ)`) is available
//! via [`FilterConvention::PhysicalSqrt`], default off.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::math::{bessel_j_row, C64};
use crate::Port;

/// Default tail-energy tolerance used when choosing a sideband truncation.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-12;

/// Smallest sideband truncation ever returned by [`choose_truncation`].
pub const MIN_TRUNCATION: usize = 5;

/// Reference modulation angular frequency in rad/s (4.8 GHz tone). Carried
/// as metadata only; none of the frequency-domain formulas depend on it.
pub const DEFAULT_OMEGA: f64 = TAU * 4.8e9;

/// Default phase factor of the V arm relative to the H arm, `e^{iφ_V} = −i`.
/// With this choice the first-order qubit has the real form
/// `cos(Δφ/2)|H⟩ ± sin(Δφ/2)|V⟩`.
pub const DEFAULT_PATH_PHASE: C64 = C64 { re: 0.0, im: -1.0 };

/// Sinusoidal phase-modulation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams {
    /// Modulation depth `β` (dimensionless, ≥ 0).
    pub beta: f64,
    /// Modulation angular frequency `Ω` in rad/s. Metadata only.
    pub omega: f64,
    /// Subcarrier phase `φ` in rad, stored reduced to `[0, 2π)`.
    pub phi: f64,
}

impl ModulationParams {
    /// Creates modulation parameters; `phi` is reduced to `[0, 2π)`.
    pub fn new(beta: f64, omega: f64, phi: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::domain(
                "ModulationParams",
                format!("modulation depth {beta} must be finite and non-negative"),
            ));
        }
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::domain(
                "ModulationParams",
                format!("modulation frequency {omega} must be finite and non-negative"),
            ));
        }
        if !phi.is_finite() {
            return Err(Error::domain(
                "ModulationParams",
                format!("modulation phase {phi} must be finite"),
            ));
        }
        Ok(ModulationParams {
            beta,
            omega,
            phi: phi.rem_euclid(TAU),
        })
    }

    /// Modulation with the default tone frequency [`DEFAULT_OMEGA`].
    pub fn with_phase(beta: f64, phi: f64) -> Result<Self> {
        Self::new(beta, DEFAULT_OMEGA, phi)
    }
}

/// How the spectral filter coefficients act on amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterConvention {
    /// `r`, `(1−r)`, `(1−ϱ)` multiply amplitudes as written. Default.
    AsWritten,
    /// Power-coefficient reading: amplitudes pick up `√r`, `√(1−r)`, `√(1−ϱ)`.
    PhysicalSqrt,
}

/// Spectral filter separating the carrier from the sidebands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    /// Carrier power reflection coefficient `r` in `[0, 1]`; the reflected
    /// part feeds the local re-modulation arm.
    pub r: f64,
    /// Sideband suppression factor `ϱ` in `[0, 1]`; sidebands pass with
    /// `(1−ϱ)`.
    pub rho: f64,
    /// Amplitude convention, [`FilterConvention::AsWritten`] by default.
    pub convention: FilterConvention,
}

impl FilterSpec {
    /// Creates a filter with the default (as-written) convention.
    pub fn new(r: f64, rho: f64) -> Result<Self> {
        if !r.is_finite() || !(0.0..=1.0).contains(&r) {
            return Err(Error::domain(
                "FilterSpec",
                format!("carrier reflection {r} outside [0, 1]"),
            ));
        }
        if !rho.is_finite() || !(0.0..=1.0).contains(&rho) {
            return Err(Error::domain(
                "FilterSpec",
                format!("sideband suppression {rho} outside [0, 1]"),
            ));
        }
        Ok(FilterSpec {
            r,
            rho,
            convention: FilterConvention::AsWritten,
        })
    }

    /// Returns the same filter with a different amplitude convention.
    pub fn with_convention(mut self, convention: FilterConvention) -> Self {
        self.convention = convention;
        self
    }

    /// Amplitude factors `(carrier tap, carrier leak, sideband pass)`
    /// according to the active convention.
    pub(crate) fn amplitude_factors(&self) -> (f64, f64, f64) {
        match self.convention {
            FilterConvention::AsWritten => (self.r, 1.0 - self.r, 1.0 - self.rho),
            FilterConvention::PhysicalSqrt => {
                (self.r.sqrt(), (1.0 - self.r).sqrt(), (1.0 - self.rho).sqrt())
            }
        }
    }
}

/// Single-photon detector parameters for the linear click model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec {
    /// Quantum efficiency `ε` in `[0, 1]`.
    pub epsilon: f64,
    /// Dark count rate `γ` in Hz.
    pub gamma_hz: f64,
    /// Detection gate duration `δt` in seconds.
    pub gate_s: f64,
    /// Pulse repetition period `T` in seconds.
    pub period_s: f64,
}

impl DetectorSpec {
    /// Creates a detector after range-checking every field.
    pub fn new(epsilon: f64, gamma_hz: f64, gate_s: f64, period_s: f64) -> Result<Self> {
        if !epsilon.is_finite() || !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::domain(
                "DetectorSpec",
                format!("quantum efficiency {epsilon} outside [0, 1]"),
            ));
        }
        if !gamma_hz.is_finite() || gamma_hz < 0.0 {
            return Err(Error::domain(
                "DetectorSpec",
                format!("dark count rate {gamma_hz} must be finite and non-negative"),
            ));
        }
        if !gate_s.is_finite() || gate_s <= 0.0 {
            return Err(Error::domain(
                "DetectorSpec",
                format!("gate duration {gate_s} must be positive"),
            ));
        }
        if !period_s.is_finite() || period_s <= 0.0 {
            return Err(Error::domain(
                "DetectorSpec",
                format!("repetition period {period_s} must be positive"),
            ));
        }
        Ok(DetectorSpec {
            epsilon,
            gamma_hz,
            gate_s,
            period_s,
        })
    }
}

/// Coherent state spread over `2S+1` spectral modes `m = −S…S`.
///
/// Mode `m = 0` is the carrier. Amplitudes are in photon-amplitude units:
/// `|amps[m]|²` is the mean photon number of mode `m` per gate.
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodeCoherentState {
    alpha0: C64,
    modulation: ModulationParams,
    amps: Vec<C64>,
}

impl MultimodeCoherentState {
    pub(crate) fn from_parts(alpha0: C64, modulation: ModulationParams, amps: Vec<C64>) -> Self {
        debug_assert!(amps.len() % 2 == 1);
        MultimodeCoherentState {
            alpha0,
            modulation,
            amps,
        }
    }

    /// Carrier amplitude `α₀` the comb was built from.
    pub fn alpha0(&self) -> C64 {
        self.alpha0
    }

    /// Modulation parameters that shaped this comb.
    pub fn modulation(&self) -> &ModulationParams {
        &self.modulation
    }

    /// Truncation order `S`.
    pub fn truncation(&self) -> usize {
        (self.amps.len() - 1) / 2
    }

    /// Amplitudes ordered `m = −S…S`.
    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    /// Amplitude of mode `m`.
    ///
    /// # Panics
    /// Panics if `|m|` exceeds the truncation order.
    pub fn amp(&self, m: i32) -> C64 {
        let s = self.truncation() as i32;
        assert!(
            m.abs() <= s,
            "mode index {m} outside truncation ±{s}"
        );
        self.amps[(m + s) as usize]
    }

    /// Total mean photon number per gate, `Σ_m |amps[m]|²`.
    pub fn total_mean_photons(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// The same state after a power transmission `η ∈ [0, 1]` (every
    /// amplitude scaled by `√η`).
    pub fn attenuated(&self, eta: f64) -> Result<Self> {
        if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
            return Err(Error::domain(
                "attenuated",
                format!("transmission {eta} outside [0, 1]"),
            ));
        }
        let root = eta.sqrt();
        Ok(MultimodeCoherentState {
            alpha0: self.alpha0 * root,
            modulation: self.modulation,
            amps: self.amps.iter().map(|a| a * root).collect(),
        })
    }
}

/// Builds the sideband comb `amps[m] = α₀·J_m(β)·e^{imφ}` for `m = −S…S`.
///
/// ```
/// use scw_dualrail::interface::{make_scw_state, ModulationParams};
/// use scw_dualrail::math::C64;
///
/// let m = ModulationParams::with_phase(0.0, 1.23).unwrap();
/// let state = make_scw_state(C64::new(1.0, 0.0), &m, 3).unwrap();
/// assert_eq!(state.amp(0), C64::new(1.0, 0.0)); // J_0(0) = 1
/// assert_eq!(state.amp(1), C64::new(0.0, 0.0)); // J_{m≠0}(0) = 0
/// ```
pub fn make_scw_state(
    alpha0: C64,
    modulation: &ModulationParams,
    s: usize,
) -> Result<MultimodeCoherentState> {
    if s < 1 {
        return Err(Error::domain(
            "make_scw_state",
            format!("truncation order {s} must be at least 1"),
        ));
    }
    if !alpha0.re.is_finite() || !alpha0.im.is_finite() {
        return Err(Error::domain("make_scw_state", "carrier amplitude must be finite"));
    }
    let row = bessel_j_row(s as u32, modulation.beta)?;
    let mut amps = vec![C64::new(0.0, 0.0); 2 * s + 1];
    for m in -(s as i32)..=(s as i32) {
        let ma = m.unsigned_abs() as usize;
        // J_{-m} = (-1)^m J_m
        let jm = if m < 0 && ma % 2 == 1 { -row[ma] } else { row[ma] };
        let phase = C64::from_polar(1.0, m as f64 * modulation.phi);
        amps[(m + s as i32) as usize] = alpha0 * jm * phase;
    }
    Ok(MultimodeCoherentState::from_parts(alpha0, *modulation, amps))
}

/// Smallest truncation `S ≥ 5` whose neglected tail `Σ_{|m|>S} J_m(β)²`
/// stays below `tol`.
///
/// The tail is evaluated through the energy identity
/// `Σ_m J_m(β)² = 1`, so no tail terms are summed explicitly.
pub fn choose_truncation(beta: f64, tol: f64) -> Result<usize> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::domain(
            "choose_truncation",
            format!("tolerance {tol} must be positive"),
        ));
    }
    for s in MIN_TRUNCATION..=64 {
        let row = bessel_j_row(s as u32, beta)?;
        let captured = row[0] * row[0] + 2.0 * row[1..].iter().map(|j| j * j).sum::<f64>();
        if 1.0 - captured < tol {
            return Ok(s);
        }
    }
    Err(Error::Model(format!(
        "no truncation up to 64 reaches tail tolerance {tol} at depth {beta}"
    )))
}

/// Dual-rail output of the interface: the two beamsplitter ports destined
/// for the H (`plus`) and V (`minus`) polarization rails.
#[derive(Debug, Clone, PartialEq)]
pub struct DualRailOutput {
    /// Constructive port for matched modulation phases; the H rail.
    pub plus: MultimodeCoherentState,
    /// Complementary port; the V rail.
    pub minus: MultimodeCoherentState,
    /// Unit-modulus phase factor the V arm acquires relative to the H arm.
    pub path_phase: C64,
}

impl DualRailOutput {
    /// Shared truncation order of both ports.
    pub fn truncation(&self) -> usize {
        self.plus.truncation()
    }

    /// Borrows one port by its beamsplitter sign.
    pub fn port(&self, port: Port) -> &MultimodeCoherentState {
        match port {
            Port::Plus => &self.plus,
            Port::Minus => &self.minus,
        }
    }

    /// Unnormalized polarization amplitudes `(c_H, c_V)` of sideband `m`,
    /// with the V-arm path phase applied.
    pub fn qubit_amplitudes(&self, m: i32) -> (C64, C64) {
        (self.plus.amp(m), self.path_phase * self.minus.amp(m))
    }
}

/// Applies the carrier re-modulation interface with the default V-arm
/// path phase [`DEFAULT_PATH_PHASE`].
///
/// Port amplitudes, with `(tap, leak, pass)` the filter's amplitude factors
/// (`(r, 1−r, 1−ϱ)` in the as-written convention):
///
/// * carrier: `amp_±[0] = α₀·J₀(β)·leak·(1 ± tap·J₀(β))/√2`
/// * sideband `m ≠ 0`:
///   `amp_±[m] = α₀·J_m(β)·pass·(e^{imφ_in} ± e^{imφ_LO}·tap·J₀(β))/√2`
///
/// The input comb and the local modulation must share the same depth `β`;
/// a mismatch is a domain error.
pub fn interface_transform(
    input: &MultimodeCoherentState,
    filter: &FilterSpec,
    local: &ModulationParams,
) -> Result<DualRailOutput> {
    interface_transform_with(input, filter, local, DEFAULT_PATH_PHASE)
}

/// [`interface_transform`] with an explicit V-arm path phase (unit modulus).
pub fn interface_transform_with(
    input: &MultimodeCoherentState,
    filter: &FilterSpec,
    local: &ModulationParams,
    path_phase: C64,
) -> Result<DualRailOutput> {
    let beta = input.modulation().beta;
    if (beta - local.beta).abs() > 1e-12 * beta.max(1.0) {
        return Err(Error::domain(
            "interface_transform",
            format!(
                "local modulation depth {} differs from the input comb depth {beta}; \
                 the interface re-modulates with the same depth",
                local.beta
            ),
        ));
    }
    if (path_phase.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::domain(
            "interface_transform",
            format!("path phase {path_phase} must have unit modulus"),
        ));
    }
    let s = input.truncation();
    let row = bessel_j_row(s as u32, local.beta)?;
    let (tap, leak, pass) = filter.amplitude_factors();
    let j0 = row[0];
    let alpha0 = input.alpha0();

    let mut plus = vec![C64::new(0.0, 0.0); 2 * s + 1];
    let mut minus = vec![C64::new(0.0, 0.0); 2 * s + 1];
    for m in -(s as i32)..=(s as i32) {
        let idx = (m + s as i32) as usize;
        if m == 0 {
            let base = input.amp(0) * leak * FRAC_1_SQRT_2;
            plus[idx] = base * (1.0 + tap * j0);
            minus[idx] = base * (1.0 - tap * j0);
        } else {
            let ma = m.unsigned_abs() as usize;
            let jm = if m < 0 && ma % 2 == 1 { -row[ma] } else { row[ma] };
            let local_amp =
                alpha0 * jm * C64::from_polar(1.0, m as f64 * local.phi) * (tap * j0);
            plus[idx] = (input.amp(m) + local_amp) * pass * FRAC_1_SQRT_2;
            minus[idx] = (input.amp(m) - local_amp) * pass * FRAC_1_SQRT_2;
        }
    }
    let center = s;
    Ok(DualRailOutput {
        plus: MultimodeCoherentState::from_parts(plus[center], *input.modulation(), plus),
        minus: MultimodeCoherentState::from_parts(minus[center], *input.modulation(), minus),
        path_phase,
    })
}

/// Ideal first-order polarization qubit for a phase difference `Δφ`.
///
/// Returns the normalized pair `(cos(Δφ/2), ±sin(Δφ/2))` where the sign of
/// the V component follows the sideband order `m ∈ {−1, +1}`. This is the
/// ideal-limit map of the interface (perfect filter, `J₀(β) → 1`), with the
/// V-arm phase already folded into the convention.
pub fn polarization_amplitudes(delta_phi: f64, m: i32) -> Result<(C64, C64)> {
    if m != 1 && m != -1 {
        return Err(Error::domain(
            "polarization_amplitudes",
            format!("sideband order {m} must be +1 or -1"),
        ));
    }
    if !delta_phi.is_finite() {
        return Err(Error::domain(
            "polarization_amplitudes",
            format!("phase difference {delta_phi} must be finite"),
        ));
    }
    let half = 0.5 * delta_phi;
    let sign = m as f64;
    Ok((
        C64::new(half.cos(), 0.0),
        C64::new(sign * half.sin(), 0.0),
    ))
}

/// Mean sideband photon number per gate, `Σ_{m≠0} |amps[m]|²`.
///
/// The carrier is excluded: the interference detectors sit behind the
/// filter where the carrier has been stripped.
pub fn mean_sideband_photons(state: &MultimodeCoherentState) -> f64 {
    mean_sideband_photons_bounded(state, state.truncation() as u32)
}

/// Sideband photon number restricted to orders `1 ≤ |m| ≤ max_order`.
///
/// Used to isolate the first-order contribution in diagnostics where
/// higher-order sidebands are deliberately excluded from the click model.
pub fn mean_sideband_photons_bounded(state: &MultimodeCoherentState, max_order: u32) -> f64 {
    let s = state.truncation() as i32;
    let lim = (max_order as i32).min(s);
    let mut n = 0.0;
    for m in 1..=lim {
        n += state.amp(m).norm_sqr() + state.amp(-m).norm_sqr();
    }
    n
}

/// Expected number of clicks over `duration` seconds in the linear regime:
/// `(γ + (ε/δt)·n̄)·duration` with `n̄` the mean sideband photons per gate.
pub fn expected_clicks(
    state: &MultimodeCoherentState,
    det: &DetectorSpec,
    duration: f64,
) -> Result<f64> {
    if !duration.is_finite() || duration <= 0.0 {
        return Err(Error::domain(
            "expected_clicks",
            format!("duration {duration} must be positive"),
        ));
    }
    let n = mean_sideband_photons(state);
    Ok((det.gamma_hz + det.epsilon / det.gate_s * n) * duration)
}

/// Options for scan-style computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Number of equidistant phase points on `[0, 2π)` used per visibility
    /// evaluation.
    pub phase_points: usize,
    /// If set, only sideband orders `1 ≤ |m| ≤ max_click_order` contribute
    /// to the click model; `None` sums all sidebands.
    pub max_click_order: Option<u32>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            phase_points: 720,
            max_click_order: None,
        }
    }
}

/// Interference fringe dataset: expected H/V count rates versus the phase
/// difference `Δφ` between the remote and local modulation tones.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseScan {
    /// Scanned phase differences, as provided by the caller.
    pub delta_phi: Vec<f64>,
    /// Expected H-rail click rate (counts/s) at each phase.
    pub rate_h: Vec<f64>,
    /// Expected V-rail click rate (counts/s) at each phase.
    pub rate_v: Vec<f64>,
}

impl PhaseScan {
    fn scan_max(&self) -> f64 {
        self.rate_h
            .iter()
            .chain(self.rate_v.iter())
            .fold(0.0_f64, |acc, &r| acc.max(r))
    }

    /// H rates normalized to the maximum rate over the whole scan.
    pub fn rates_h_norm(&self) -> Vec<f64> {
        let max = self.scan_max();
        if max == 0.0 {
            return vec![0.0; self.rate_h.len()];
        }
        self.rate_h.iter().map(|r| r / max).collect()
    }

    /// V rates normalized to the maximum rate over the whole scan.
    pub fn rates_v_norm(&self) -> Vec<f64> {
        let max = self.scan_max();
        if max == 0.0 {
            return vec![0.0; self.rate_v.len()];
        }
        self.rate_v.iter().map(|r| r / max).collect()
    }
}

/// Scans the phase difference and records the expected H/V click rates.
///
/// The local tone sits at phase 0, so each entry of `phis` is directly the
/// phase difference `Δφ`. Rates follow `cos²(Δφ/2)`/`sin²(Δφ/2)` fringes at
/// first order, distorted by dark counts and higher-order sidebands.
pub fn phase_scan(
    beta: f64,
    alpha0: C64,
    filter: &FilterSpec,
    det: &DetectorSpec,
    phis: &[f64],
) -> Result<PhaseScan> {
    phase_scan_bounded(beta, alpha0, filter, det, phis, None)
}

/// [`phase_scan`] with an optional cap on the sideband orders the click
/// model integrates (the `max_click_order` of [`ScanOptions`]).
pub fn phase_scan_with(
    beta: f64,
    alpha0: C64,
    filter: &FilterSpec,
    det: &DetectorSpec,
    phis: &[f64],
    max_click_order: Option<u32>,
) -> Result<PhaseScan> {
    phase_scan_bounded(beta, alpha0, filter, det, phis, max_click_order)
}

fn phase_scan_bounded(
    beta: f64,
    alpha0: C64,
    filter: &FilterSpec,
    det: &DetectorSpec,
    phis: &[f64],
    max_click_order: Option<u32>,
) -> Result<PhaseScan> {
    if phis.is_empty() {
        return Err(Error::domain("phase_scan", "phase list must not be empty"));
    }
    let s = choose_truncation(beta, DEFAULT_TRUNCATION_TOL)?;
    let local = ModulationParams::with_phase(beta, 0.0)?;
    let mut rate_h = Vec::with_capacity(phis.len());
    let mut rate_v = Vec::with_capacity(phis.len());
    for &phi in phis {
        let input = make_scw_state(alpha0, &ModulationParams::with_phase(beta, phi)?, s)?;
        let out = interface_transform(&input, filter, &local)?;
        let (n_h, n_v) = match max_click_order {
            Some(mo) => (
                mean_sideband_photons_bounded(&out.plus, mo),
                mean_sideband_photons_bounded(&out.minus, mo),
            ),
            None => (
                mean_sideband_photons(&out.plus),
                mean_sideband_photons(&out.minus),
            ),
        };
        rate_h.push(det.gamma_hz + det.epsilon / det.gate_s * n_h);
        rate_v.push(det.gamma_hz + det.epsilon / det.gate_s * n_v);
    }
    Ok(PhaseScan {
        delta_phi: phis.to_vec(),
        rate_h,
        rate_v,
    })
}

/// Interference visibility `(max − min)/(max + min)` of a rate list that
/// covers a full fringe.
pub fn visibility(rates: &[f64]) -> Result<f64> {
    if rates.is_empty() {
        return Err(Error::domain("visibility", "rate list must not be empty"));
    }
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for &r in rates {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::domain(
                "visibility",
                format!("rate {r} must be finite and non-negative"),
            ));
        }
        max = max.max(r);
        min = min.min(r);
    }
    if max + min == 0.0 {
        return Err(Error::domain(
            "visibility",
            "all rates are zero; visibility is undefined",
        ));
    }
    Ok((max - min) / (max + min))
}

/// Visibility as a function of modulation depth with default scan options
/// (720 phase points, all sidebands detected).
pub fn visibility_vs_beta(
    betas: &[f64],
    alpha0: C64,
    filter: &FilterSpec,
    det: &DetectorSpec,
) -> Result<Vec<(f64, f64)>> {
    visibility_vs_beta_with(betas, alpha0, filter, det, &ScanOptions::default())
}

/// Visibility versus modulation depth with explicit [`ScanOptions`].
///
/// Depth points evaluate in parallel; the output order matches `betas`.
pub fn visibility_vs_beta_with(
    betas: &[f64],
    alpha0: C64,
    filter: &FilterSpec,
    det: &DetectorSpec,
    options: &ScanOptions,
) -> Result<Vec<(f64, f64)>> {
    if betas.is_empty() {
        return Err(Error::domain(
            "visibility_vs_beta",
            "depth list must not be empty",
        ));
    }
    if options.phase_points < 4 {
        return Err(Error::domain(
            "visibility_vs_beta",
            format!("{} phase points cannot cover a fringe", options.phase_points),
        ));
    }
    let phis: Vec<f64> = (0..options.phase_points)
        .map(|k| k as f64 * TAU / options.phase_points as f64)
        .collect();
    betas
        .par_iter()
        .map(|&beta| {
            let scan =
                phase_scan_bounded(beta, alpha0, filter, det, &phis, options.max_click_order)?;
            Ok((beta, visibility(&scan.rate_h)?))
        })
        .collect()
}
