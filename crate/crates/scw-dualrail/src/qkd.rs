//! Asymptotic secret-key rates of a subcarrier-wave BB84 link against a
//! collective beam-splitter attack, for two receiver architectures.
//!
//! * **Traditional**: a spectral filter strips the carrier and a single
//!   detector watches the remaining sideband power. Bits are decoded from
//!   whether the sifted phases matched, so dark counts and carrier leakage
//!   drive the error rate.
//! * **Discriminator**: the carrier re-modulation interface splits matched
//!   and mismatched states onto two detectors, which halves the chance that
//!   a dark count lands in an unambiguous slot and roughly doubles the key
//!   rate at moderate loss.
//!
//! Both chains share the pulse economics (`ν = 1/T`), the error-correction
//! penalty `f·H(Q)`, and the same Holevo bound `χ` (the transmitted state is
//! identical, so the eavesdropper's information does not depend on the
//! receiver). Key rates follow the Devetak-Winter form
//! `K = ν·P_B·(1 − f·H(Q) − χ)` and may come out negative past the cutoff
//! loss; callers that render tables clamp at zero, the raw sign is kept here
//! because it locates the cutoff.
//!
//! The filter coefficients `r` and `ϱ` enter these formulas exactly as
//! written (power factors in the traditional photon count, amplitude
//! multipliers inside the discriminator's port sums); the
//! [`FilterConvention`](crate::interface::FilterConvention) flag of the
//! interface module deliberately does not apply here.

use crate::error::{Error, Result};
use crate::interface::{choose_truncation, DetectorSpec, FilterSpec, DEFAULT_TRUNCATION_TOL};
use crate::math::{bessel_j, bessel_j_row, binary_entropy, C64};
use crate::Port;

/// Receiver architecture the key rate is evaluated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Single-detector sideband receiver.
    Traditional,
    /// Dual-rail interface used as a two-state discriminator.
    Discriminator,
}

impl Scheme {
    /// Both schemes, in presentation order.
    pub const ALL: [Scheme; 2] = [Scheme::Traditional, Scheme::Discriminator];

    /// Lowercase name used in tables and the command line.
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Traditional => "traditional",
            Scheme::Discriminator => "discriminator",
        }
    }

    /// Parses a scheme name (case-insensitive).
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "traditional" => Ok(Scheme::Traditional),
            "discriminator" => Ok(Scheme::Discriminator),
            other => Err(Error::Config(format!(
                "unknown scheme '{other}' (expected 'traditional' or 'discriminator')"
            ))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Lossy optical channel described by its linear power transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    /// Power transmission `η`, `0 < η ≤ 1`.
    pub eta: f64,
}

impl ChannelSpec {
    /// Channel from a linear transmission.
    pub fn new(eta: f64) -> Result<Self> {
        if !eta.is_finite() || eta <= 0.0 || eta > 1.0 {
            return Err(Error::domain(
                "ChannelSpec",
                format!("transmission {eta} outside (0, 1]"),
            ));
        }
        Ok(ChannelSpec { eta })
    }

    /// Channel from a loss in dB (`η = 10^(−dB/10)`).
    pub fn from_db(loss_db: f64) -> Result<Self> {
        ChannelSpec::new(eta_from_db(loss_db)?)
    }

    /// Loss of this channel in dB.
    pub fn loss_db(&self) -> f64 {
        -10.0 * self.eta.log10()
    }
}

/// Converts a loss in dB to a linear power transmission `η = 10^(−dB/10)`.
pub fn eta_from_db(loss_db: f64) -> Result<f64> {
    if !loss_db.is_finite() || loss_db < 0.0 {
        return Err(Error::domain(
            "eta_from_db",
            format!("loss {loss_db} dB must be finite and non-negative"),
        ));
    }
    Ok(10f64.powf(-loss_db / 10.0))
}

/// Transmitter, filter, detector and post-processing parameters shared by
/// both key-rate chains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Carrier amplitude magnitude `α₀` (photon-amplitude units, > 0).
    pub alpha0: f64,
    /// Modulation depth `β` (> 0).
    pub beta: f64,
    /// Spectral filter of the receiver.
    pub filter: FilterSpec,
    /// Detector parameters.
    pub det: DetectorSpec,
    /// Error-correction inefficiency `f ≥ 1` multiplying `H(Q)`.
    pub f_ec: f64,
    /// Pulse repetition rate `ν = 1/T` in Hz, derived from the detector.
    pub nu: f64,
}

impl ProtocolParams {
    /// Builds protocol parameters; `nu` is derived as `1/det.period_s`.
    pub fn new(
        alpha0: f64,
        beta: f64,
        filter: FilterSpec,
        det: DetectorSpec,
        f_ec: f64,
    ) -> Result<Self> {
        if !alpha0.is_finite() || alpha0 <= 0.0 {
            return Err(Error::domain(
                "ProtocolParams",
                format!("carrier amplitude {alpha0} must be positive"),
            ));
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::domain(
                "ProtocolParams",
                format!("modulation depth {beta} must be positive"),
            ));
        }
        if !f_ec.is_finite() || f_ec < 1.0 {
            return Err(Error::domain(
                "ProtocolParams",
                format!("error-correction efficiency {f_ec} must be at least 1"),
            ));
        }
        Ok(ProtocolParams {
            alpha0,
            beta,
            filter,
            det,
            f_ec,
            nu: 1.0 / det.period_s,
        })
    }

    /// The same protocol evaluated at different control parameters
    /// `(α₀, β)`; used by the optimizer.
    pub fn with_controls(&self, alpha0: f64, beta: f64) -> Result<Self> {
        ProtocolParams::new(alpha0, beta, self.filter, self.det, self.f_ec)
    }
}

/// Key-rate evaluation at one channel transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateResult {
    /// Receiver architecture.
    pub scheme: Scheme,
    /// Secret key rate `K` in bits/s; negative past the cutoff loss.
    pub key_rate_bits_per_s: f64,
    /// Quantum bit error rate `Q`.
    pub qber: f64,
    /// Sifted detection probability per pulse `P_B`.
    pub p_b: f64,
    /// Holevo bound `χ` on the eavesdropper's information, in bits.
    pub chi: f64,
}

fn check_eta(context: &'static str, eta: f64) -> Result<()> {
    if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain(
            context,
            format!("transmission {eta} outside [0, 1]"),
        ));
    }
    Ok(())
}

/// Click probability from a mean photon number per pulse, clipped to the
/// unit interval with a model-validity warning when the linear form spills
/// over.
fn click_probability(det: &DetectorSpec, n_ph: f64, context: &'static str) -> f64 {
    let raw = (det.epsilon * n_ph / det.period_s + det.gamma_hz) * det.gate_s;
    if raw > 1.0 {
        log::warn!("{context}: click probability {raw:.6} clipped to 1; the linear detector model does not hold at this signal level");
        1.0
    } else {
        raw.max(0.0)
    }
}

/// Mean photon number reaching the traditional receiver's detector.
///
/// With matched sifted phases the detector sees the re-modulated sideband
/// power plus carrier leakage:
/// `|α₀|²η·[(1−ϱ)(1−J₀²(2β)) + (1−r)·J₀²(2β)]`; with opposite phases the
/// sidebands are coherently erased back into the carrier and only the
/// leakage `|α₀|²η·(1−r)` survives.
pub fn n_ph_traditional(p: &ProtocolParams, eta: f64, same_phase: bool) -> Result<f64> {
    check_eta("n_ph_traditional", eta)?;
    let base = p.alpha0 * p.alpha0 * eta;
    if same_phase {
        let j0_2b = bessel_j(0, 2.0 * p.beta)?;
        let j0_sq = j0_2b * j0_2b;
        Ok(base * ((1.0 - p.filter.rho) * (1.0 - j0_sq) + (1.0 - p.filter.r) * j0_sq))
    } else {
        Ok(base * (1.0 - p.filter.r))
    }
}

/// Detector click probability per pulse in the traditional receiver:
/// `(ε·n_ph/T + γ)·δt`, clipped to `[0, 1]`.
pub fn p_det(p: &ProtocolParams, eta: f64, same_phase: bool) -> Result<f64> {
    let n_ph = n_ph_traditional(p, eta, same_phase)?;
    Ok(click_probability(&p.det, n_ph, "p_det"))
}

/// QBER of the traditional receiver,
/// `Q = P_det(mismatch) / (P_det(match) + P_det(mismatch))`.
pub fn qber_traditional(p: &ProtocolParams, eta: f64) -> Result<f64> {
    let p_match = p_det(p, eta, true)?;
    let p_mismatch = p_det(p, eta, false)?;
    let den = p_match + p_mismatch;
    if den <= 0.0 {
        return Err(Error::Model(
            "zero total detection probability; QBER is undefined".into(),
        ));
    }
    Ok(p_mismatch / den)
}

/// Holevo bound per sifted bit for the collective beam-splitter attack:
/// `χ = H(½·(1 − exp(−|α₀|²·(1−η)·(1−J₀(2β)))))`.
///
/// The eavesdropper taps the channel loss; at `η = 1` or `β = 0` the tapped
/// states coincide and the bound vanishes.
pub fn holevo_bound(alpha0: f64, beta: f64, eta: f64) -> Result<f64> {
    check_eta("holevo_bound", eta)?;
    if !alpha0.is_finite() {
        return Err(Error::domain("holevo_bound", "carrier amplitude must be finite"));
    }
    let overlap_exponent = alpha0 * alpha0 * (1.0 - eta) * (1.0 - bessel_j(0, 2.0 * beta)?);
    binary_entropy(0.5 * (1.0 - (-overlap_exponent).exp()))
}

fn devetak_winter(
    scheme: Scheme,
    p: &ProtocolParams,
    eta: f64,
    qber: f64,
    p_b: f64,
) -> Result<KeyRateResult> {
    let chi = holevo_bound(p.alpha0, p.beta, eta)?;
    let key = p.nu * p_b * (1.0 - p.f_ec * binary_entropy(qber)? - chi);
    Ok(KeyRateResult {
        scheme,
        key_rate_bits_per_s: key,
        qber,
        p_b,
        chi,
    })
}

/// Devetak-Winter key rate of the traditional receiver,
/// `K = ν·P_B·(1 − f·H(Q) − χ)` with `P_B` the mean of the matched and
/// mismatched click probabilities (the factor ½ accounts for basis sifting).
pub fn key_rate_traditional(p: &ProtocolParams, eta: f64) -> Result<KeyRateResult> {
    let p_match = p_det(p, eta, true)?;
    let p_mismatch = p_det(p, eta, false)?;
    let den = p_match + p_mismatch;
    if den <= 0.0 {
        return Err(Error::Model(
            "zero total detection probability; QBER is undefined".into(),
        ));
    }
    devetak_winter(
        Scheme::Traditional,
        p,
        eta,
        p_mismatch / den,
        den / 2.0,
    )
}

/// Mean photon number at one discriminator output port:
///
/// `n_± = Σ_{m≠0} |√η·α₀·J_m(β)·(1−ϱ)·(e^{imφ_A} ± e^{imφ_LO}·r·J₀(β))/√2|²
///        + |√η·α₀·J₀(β)·((1−r) ± J₀(β)·r·(1−r))/√2|²`
///
/// The sideband sum is truncated where the neglected tail energy falls
/// below 1e−12. Unlike the interference click model, the carrier term is
/// included: the discriminator's detectors sit directly on the two ports.
pub fn n_pm_discriminator(
    p: &ProtocolParams,
    eta: f64,
    phi_a: f64,
    phi_lo: f64,
    port: Port,
) -> Result<f64> {
    check_eta("n_pm_discriminator", eta)?;
    if !phi_a.is_finite() || !phi_lo.is_finite() {
        return Err(Error::domain(
            "n_pm_discriminator",
            "modulation phases must be finite",
        ));
    }
    let s = choose_truncation(p.beta, DEFAULT_TRUNCATION_TOL)?;
    let row = bessel_j_row(s as u32, p.beta)?;
    let j0 = row[0];
    let scale = eta.sqrt() * p.alpha0;
    let sign = port.sign();
    let r = p.filter.r;
    let pass = 1.0 - p.filter.rho;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;

    let mut total = 0.0;
    for m in 1..=(s as i32) {
        for m in [m, -m] {
            let ma = m.unsigned_abs() as usize;
            let jm = if m < 0 && ma % 2 == 1 { -row[ma] } else { row[ma] };
            let interference = C64::from_polar(1.0, m as f64 * phi_a)
                + C64::from_polar(1.0, m as f64 * phi_lo) * (sign * r * j0);
            total += (scale * jm * pass * inv_sqrt2 * interference).norm_sqr();
        }
    }
    let carrier = scale * j0 * ((1.0 - r) + sign * j0 * r * (1.0 - r)) * inv_sqrt2;
    total += carrier * carrier;
    Ok(total)
}

/// Click probability at one discriminator port, `(ε·n_±/T + γ)·δt` clipped
/// to `[0, 1]`.
pub fn p_pm_discriminator(
    p: &ProtocolParams,
    eta: f64,
    phi_a: f64,
    phi_lo: f64,
    port: Port,
) -> Result<f64> {
    let n = n_pm_discriminator(p, eta, phi_a, phi_lo, port)?;
    Ok(click_probability(&p.det, n, "p_pm_discriminator"))
}

/// Error and success statistics of the discriminator receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminatorErrorRates {
    /// QBER `Q = P_E / (P_E + P_C)`.
    pub qber: f64,
    /// Probability per pulse of an erroneous unambiguous decoding.
    pub p_error: f64,
    /// Probability per pulse of a correct unambiguous decoding.
    pub p_correct: f64,
}

/// Discriminator QBER at the standard basis convention `φ_A = 0`.
pub fn qber_discriminator(p: &ProtocolParams, eta: f64) -> Result<DiscriminatorErrorRates> {
    qber_discriminator_at(p, eta, 0.0)
}

/// Discriminator QBER evaluated at an explicit Alice phase.
///
/// An erroneous decoding is a click in the port associated with the wrong
/// bit while the right port stays silent; a correct decoding is the mirror
/// event. Opposite-bit pulses reach Bob with `φ_LO = φ_A + π`:
///
/// `P_E = P₊(φ_A, φ_A+π)·(1−P₋(φ_A, φ_A+π)) + P₋(φ_A, φ_A)·(1−P₊(φ_A, φ_A))`
///
/// and `P_C` with the ports swapped. The result is invariant under a common
/// basis offset added to both phases.
pub fn qber_discriminator_at(
    p: &ProtocolParams,
    eta: f64,
    phi_a: f64,
) -> Result<DiscriminatorErrorRates> {
    let phi_opposite = phi_a + std::f64::consts::PI;
    let p_plus_mis = p_pm_discriminator(p, eta, phi_a, phi_opposite, Port::Plus)?;
    let p_minus_mis = p_pm_discriminator(p, eta, phi_a, phi_opposite, Port::Minus)?;
    let p_plus_match = p_pm_discriminator(p, eta, phi_a, phi_a, Port::Plus)?;
    let p_minus_match = p_pm_discriminator(p, eta, phi_a, phi_a, Port::Minus)?;

    let p_error = p_plus_mis * (1.0 - p_minus_mis) + p_minus_match * (1.0 - p_plus_match);
    let p_correct = p_minus_mis * (1.0 - p_plus_mis) + p_plus_match * (1.0 - p_minus_match);
    let den = p_error + p_correct;
    if den <= 0.0 {
        return Err(Error::Model(
            "zero unambiguous decoding probability; QBER is undefined".into(),
        ));
    }
    Ok(DiscriminatorErrorRates {
        qber: p_error / den,
        p_error,
        p_correct,
    })
}

/// Devetak-Winter key rate of the discriminator receiver,
/// `K = ν·((P_E+P_C)/2)·(1 − f·H(Q) − χ)` with the same Holevo bound as the
/// traditional chain (the transmitted state is unchanged).
pub fn key_rate_discriminator(p: &ProtocolParams, eta: f64) -> Result<KeyRateResult> {
    let rates = qber_discriminator(p, eta)?;
    devetak_winter(
        Scheme::Discriminator,
        p,
        eta,
        rates.qber,
        (rates.p_error + rates.p_correct) / 2.0,
    )
}

/// Key rate of either scheme at one channel transmission.
pub fn key_rate(scheme: Scheme, p: &ProtocolParams, eta: f64) -> Result<KeyRateResult> {
    match scheme {
        Scheme::Traditional => key_rate_traditional(p, eta),
        Scheme::Discriminator => key_rate_discriminator(p, eta),
    }
}

/// One row of a loss sweep at fixed control parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// Channel loss in dB.
    pub loss_db: f64,
    /// Linear transmission `η`.
    pub eta: f64,
    /// Carrier amplitude the row was evaluated at.
    pub alpha0: f64,
    /// Modulation depth the row was evaluated at.
    pub beta: f64,
    /// Key-rate evaluation.
    pub result: KeyRateResult,
}

/// Evaluates one scheme across a loss list at fixed `(α₀, β)`.
///
/// `losses_db` must be non-empty and sorted ascending. Points evaluate in
/// parallel; the output order matches the input.
pub fn fixed_sweep(
    scheme: Scheme,
    p: &ProtocolParams,
    losses_db: &[f64],
) -> Result<Vec<SweepPoint>> {
    check_losses(losses_db)?;
    use rayon::prelude::*;
    losses_db
        .par_iter()
        .map(|&loss_db| {
            let eta = eta_from_db(loss_db)?;
            let result = key_rate(scheme, p, eta)?;
            Ok(SweepPoint {
                loss_db,
                eta,
                alpha0: p.alpha0,
                beta: p.beta,
                result,
            })
        })
        .collect()
}

pub(crate) fn check_losses(losses_db: &[f64]) -> Result<()> {
    if losses_db.is_empty() {
        return Err(Error::domain("sweep", "loss list must not be empty"));
    }
    for pair in losses_db.windows(2) {
        if pair[1] < pair[0] {
            return Err(Error::domain(
                "sweep",
                format!("loss list must be sorted ascending ({} after {})", pair[1], pair[0]),
            ));
        }
    }
    Ok(())
}
