//! Simulation and optimization of a photonic interface that converts
//! subcarrier-wave (SCW) phase encoding into dual-rail polarization encoding.
//!
//! An SCW transmitter phase-modulates a strong optical carrier at a microwave
//! frequency, which spreads the field over a comb of spectral sidebands whose
//! amplitudes follow Bessel functions of the modulation depth. The information
//! lives in the phase of the modulating tone. The interface modeled here
//! splits the carrier from the sidebands with a narrow spectral filter,
//! re-modulates the carrier locally, and interferes the locally generated
//! sidebands with the incoming ones on a 50:50 beamsplitter. The two output
//! ports are mapped onto orthogonal polarizations, so the first-order sideband
//! carries a polarization qubit `cos(Δφ/2)|H⟩ ± sin(Δφ/2)|V⟩`, where `Δφ` is
//! the phase difference between the remote and local modulation tones.
//!
//! The crate covers the full analysis chain:
//!
//! * [`math`] — Bessel functions of the first kind and binary entropy.
//! * [`interface`] — multimode coherent states, the filter/beamsplitter
//!   transform, click statistics, phase scans and fringe visibility.
//! * [`tomography`] — six-projector polarization tomography with Poisson
//!   count noise and an iterative maximum-likelihood reconstruction.
//! * [`qkd`] — secret-key rates of a BB84 subcarrier-wave link for a
//!   conventional single-detector receiver and for the interface used as a
//!   two-state discriminator.
//! * [`optimizer`] — per-loss optimization of pulse amplitude and modulation
//!   depth (coarse grid plus Nelder-Mead refinement) and loss sweeps.
//! * [`config`], [`report`], [`cli`] — run configuration, CSV/JSON output
//!   and the `scwdr` command-line front end.
//!
//! The primary interface is the library together with the runnable programs
//! in `examples/`; the thin `scwdr` binary exposes the same capabilities as
//! subcommands for scripted use.
//!
//! # Example
//!
//! ```
//! use scw_dualrail::interface::{phase_scan, visibility, DetectorSpec, FilterSpec};
//! use scw_dualrail::math::C64;
//!
//! let filter = FilterSpec::new(0.99, 1e-4).unwrap();
//! let det = DetectorSpec::new(0.1, 100.0, 3.3e-9, 1e-8).unwrap();
//! let phis: Vec<f64> = (0..360).map(|k| k as f64 * std::f64::consts::TAU / 360.0).collect();
//! let scan = phase_scan(0.15, C64::new(0.08, 0.0), &filter, &det, &phis).unwrap();
//! let v = visibility(&scan.rates_h_norm()).unwrap();
//! assert!(v > 0.9 && v < 1.0);
//! ```

pub mod cli;
pub mod config;
pub mod error;
pub mod interface;
pub mod math;
pub mod optimizer;
pub mod qkd;
pub mod report;
pub mod tomography;

pub use error::{Error, Result};
pub use math::C64;

/// Output port of the interface beamsplitter.
///
/// `Plus` is the constructive port for matched modulation phases; it feeds
/// the horizontal polarization rail. `Minus` feeds the vertical rail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    Plus,
    Minus,
}

impl Port {
    /// Sign of the beamsplitter superposition, `+1` or `-1`.
    pub fn sign(self) -> f64 {
        match self {
            Port::Plus => 1.0,
            Port::Minus => -1.0,
        }
    }
}
