//! Release gate: six model-level criteria with pinned tolerances and
//! runtime budgets. Every test prints exactly one `[PASS]`/`[FAIL]` line
//! carrying its measured numbers; run with `-- --nocapture` to see the
//! lines for passing criteria too (cargo already shows them for failures).

use scw_dualrail::config::{OutputFormat, RunConfig};
use scw_dualrail::interface::{
    choose_truncation, interface_transform, make_scw_state, phase_scan_with,
    polarization_amplitudes, visibility, visibility_vs_beta_with, DetectorSpec, FilterSpec,
    ModulationParams, ScanOptions, DEFAULT_TRUNCATION_TOL,
};
use scw_dualrail::math::{bessel_j, C64};
use scw_dualrail::optimizer::{self, optimize_key_rate, OptimizationBounds};
use scw_dualrail::qkd::{
    holevo_bound, key_rate_traditional, qber_discriminator, qber_traditional, ProtocolParams,
    Scheme,
};
use scw_dualrail::report;
use scw_dualrail::tomography::{
    four_state_pipeline, mle_reconstruct_with_history, projector, CountSampling, DensityMatrix2,
    ProjectorLabel, TomographyRecord,
};
use scw_dualrail::Port;
use std::f64::consts::TAU;
use std::time::Instant;

/// One acceptance criterion: prints its verdict line, then enforces the
/// runtime budget and the criterion itself.
struct Gate {
    id: u32,
    budget_s: f64,
    start: Instant,
}

impl Gate {
    fn start(id: u32, budget_s: f64) -> Self {
        Gate {
            id,
            budget_s,
            start: Instant::now(),
        }
    }

    fn finish(self, ok: bool, detail: String) {
        let elapsed = self.start.elapsed().as_secs_f64();
        let within = elapsed < self.budget_s;
        let verdict = if ok && within { "[PASS]" } else { "[FAIL]" };
        println!(
            "{verdict} AC{}: {detail} ({elapsed:.2} s, budget {} s)",
            self.id, self.budget_s
        );
        assert!(
            within,
            "AC{} exceeded its {} s budget: {elapsed:.2} s",
            self.id, self.budget_s
        );
        assert!(ok, "AC{}: {detail}", self.id);
    }
}

/// Reference detector/filter stack at the published operating point with
/// the key-rate dark count level (50 Hz).
fn reference_params(alpha0: f64, beta: f64) -> ProtocolParams {
    ProtocolParams::new(
        alpha0,
        beta,
        FilterSpec::new(0.99, 1e-4).unwrap(),
        DetectorSpec::new(0.1, 50.0, 3.3e-9, 1e-8).unwrap(),
        1.25,
    )
    .unwrap()
}

/// Same stack with the dark count rate swapped out.
fn params_with_dark_rate(gamma_hz: f64) -> ProtocolParams {
    ProtocolParams::new(
        0.8,
        0.65,
        FilterSpec::new(0.99, 1e-4).unwrap(),
        DetectorSpec::new(0.1, gamma_hz, 3.3e-9, 1e-8).unwrap(),
        1.25,
    )
    .unwrap()
}

/// AC1: the default configuration (beta 0.15, 100 Hz dark rate, carrier
/// amplitude calibrated against the reference fringe) reproduces the
/// reference visibility of 0.95 within +/-0.02.
#[test]
fn ac1_phase_scan_visibility() {
    let gate = Gate::start(1, 1.0);
    let config = RunConfig::default();
    let phis = config.scan.delta_phi.points();
    let scan = phase_scan_with(
        config.scan.beta,
        C64::new(config.scan.alpha0, 0.0),
        &config.filter_spec().unwrap(),
        &config.detector_spec().unwrap(),
        &phis,
        None,
    )
    .unwrap();
    let vis = visibility(&scan.rate_h).unwrap();
    let peak = scan.rate_h.iter().cloned().fold(0.0f64, f64::max);
    let ok = (vis - 0.95).abs() <= 0.02;
    gate.finish(
        ok,
        format!(
            "fringe visibility {vis:.6} vs 0.95 +/- 0.02 \
             (beta {}, dark rate {} Hz, peak H rate {peak:.0} cps)",
            config.scan.beta, config.detector.gamma_hz
        ),
    );
}

/// AC2: visibility stays >= 0.89 across the modulation-depth plateau
/// beta in [0.1, 0.7] and drops strictly below the plateau floor at
/// beta = 0.05 and beta = 2.0.
#[test]
fn ac2_visibility_plateau() {
    let gate = Gate::start(2, 5.0);
    let config = RunConfig::default();
    let rows = visibility_vs_beta_with(
        &config.scan.betas,
        C64::new(config.scan.alpha0, 0.0),
        &config.filter_spec().unwrap(),
        &config.detector_spec().unwrap(),
        &ScanOptions::default(),
    )
    .unwrap();
    let at = |beta: f64| -> f64 {
        rows.iter()
            .find(|(b, _)| (b - beta).abs() < 1e-9)
            .unwrap_or_else(|| panic!("beta {beta} missing from the scan"))
            .1
    };
    let plateau_min = rows
        .iter()
        .filter(|(b, _)| (0.1 - 1e-9..=0.7 + 1e-9).contains(b))
        .map(|&(_, v)| v)
        .fold(f64::INFINITY, f64::min);
    let (v_low, v_high) = (at(0.05), at(2.0));
    let ok = plateau_min >= 0.89 && v_low < plateau_min && v_high < plateau_min;
    gate.finish(
        ok,
        format!(
            "plateau min {plateau_min:.4} >= 0.89 over beta in [0.1, 0.7]; \
             V(0.05) = {v_low:.4} and V(2.0) = {v_high:.4} both below it"
        ),
    );
}

/// AC3: noise-free reconstruction of the four canonical preparations is
/// essentially exact; with the key-rate detector noise (50 Hz dark rate)
/// and a 10 s acquisition the seeded fidelities stay >= 0.95 and the
/// sampled datasets are byte-stable across identically seeded runs.
#[test]
fn ac3_tomography_pipeline() {
    let gate = Gate::start(3, 10.0);
    let config = RunConfig::default();
    let t = &config.tomography;

    let ideal_det = DetectorSpec::new(config.detector.epsilon, 0.0, 3.3e-9, 1e-8).unwrap();
    let ideal = four_state_pipeline(
        t.alpha0,
        t.beta,
        0.0,
        &ideal_det,
        t.duration_s,
        CountSampling::Expected,
    )
    .unwrap();
    let min_ideal = ideal
        .iter()
        .map(|run| run.fidelity)
        .fold(f64::INFINITY, f64::min);

    let noisy_det = DetectorSpec::new(config.detector.epsilon, 50.0, 3.3e-9, 1e-8).unwrap();
    let sample = || {
        four_state_pipeline(
            t.alpha0,
            t.beta,
            0.0,
            &noisy_det,
            t.duration_s,
            CountSampling::Poisson(t.seed),
        )
        .unwrap()
    };
    let (run_a, run_b) = (sample(), sample());
    let min_noisy = run_a
        .iter()
        .map(|run| run.fidelity)
        .fold(f64::INFINITY, f64::min);
    let stable = run_a.iter().zip(&run_b).all(|(a, b)| {
        report::tomography_records_table(&a.records, OutputFormat::Csv)
            == report::tomography_records_table(&b.records, OutputFormat::Csv)
            && report::density_matrix_json(&a.rho) == report::density_matrix_json(&b.rho)
    });

    let ok = min_ideal >= 0.999 && min_noisy >= 0.95 && stable;
    gate.finish(
        ok,
        format!(
            "min ideal fidelity {min_ideal:.6} >= 0.999; min seeded fidelity \
             {min_noisy:.4} >= 0.95 at 50 Hz dark rate over 10 s; byte-stable: {stable}"
        ),
    );
}

/// AC4: with the reference detector stack and per-transmission
/// optimization of (alpha0, beta), the discriminator scheme's key rate is
/// 1.5x to 2.5x the traditional scheme's at every loss in
/// {10, 15, 20, 25, 30} dB.
#[test]
fn ac4_key_rate_ratio() {
    let gate = Gate::start(4, 60.0);
    let template = reference_params(0.8, 0.65);
    let bounds = OptimizationBounds::default();
    let losses = [10.0, 15.0, 20.0, 25.0, 30.0];
    let trad = optimizer::sweep(Scheme::Traditional, &template, &losses, &bounds, true).unwrap();
    let disc = optimizer::sweep(Scheme::Discriminator, &template, &losses, &bounds, true).unwrap();
    let ratios: Vec<(f64, f64)> = trad
        .iter()
        .zip(&disc)
        .map(|(t, d)| {
            (
                t.loss_db,
                d.optimum.result.key_rate_bits_per_s / t.optimum.result.key_rate_bits_per_s,
            )
        })
        .collect();
    let rendered = ratios
        .iter()
        .map(|(loss, ratio)| format!("{loss} dB: {ratio:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    let ok = ratios.iter().all(|&(_, r)| (1.5..=2.5).contains(&r));
    gate.finish(
        ok,
        format!("optimized K_discriminator/K_traditional in [1.5, 2.5] at every loss; measured {rendered}"),
    );
}

/// AC5: at a 1 Hz dark count rate the traditional scheme overtakes the
/// discriminator only beyond 45 dB of loss, and the discriminator's
/// optimal modulation depth shrinks between 20 dB and 55 dB.
#[test]
fn ac5_low_dark_count_crossover() {
    let gate = Gate::start(5, 120.0);
    let template = params_with_dark_rate(1.0);
    let bounds = OptimizationBounds::default();
    let losses = [
        20.0, 40.0, 42.5, 45.0, 47.5, 50.0, 52.5, 55.0, 57.5, 60.0,
    ];
    let trad = optimizer::sweep(Scheme::Traditional, &template, &losses, &bounds, true).unwrap();
    let disc = optimizer::sweep(Scheme::Discriminator, &template, &losses, &bounds, true).unwrap();

    let crossover = trad.iter().zip(&disc).find_map(|(t, d)| {
        let k_t = t.optimum.result.key_rate_bits_per_s;
        let k_d = d.optimum.result.key_rate_bits_per_s;
        (k_t > 0.0 && k_t > k_d).then_some(t.loss_db)
    });
    let disc_at = |loss: f64| {
        disc.iter()
            .find(|row| (row.loss_db - loss).abs() < 1e-9)
            .unwrap()
    };
    let (beta_20, beta_55) = (disc_at(20.0).optimum.beta, disc_at(55.0).optimum.beta);
    let cutoff_55 = disc_at(55.0).optimum.below_cutoff;

    let ok = crossover.map_or(false, |loss| loss > 45.0) && beta_55 < beta_20;
    gate.finish(
        ok,
        format!(
            "traditional overtakes at {} dB (> 45 dB required); discriminator \
             beta_opt {beta_55:.4} at 55 dB (past its key cutoff: {cutoff_55}) \
             < {beta_20:.4} at 20 dB",
            crossover.map_or("never".into(), |l| l.to_string())
        ),
    );
}

/// AC6: the always-on invariants hold at reference points: port energy
/// conservation, converted-qubit normalization, MLE physicality and
/// likelihood monotonicity, Bessel parity/normalization, dark-limit QBER,
/// zero Holevo leakage on a lossless channel, and optimizer agreement
/// with a fine brute-force grid. The randomized suites covering the same
/// invariants run as their own test targets in this workspace.
#[test]
fn ac6_invariant_suite() {
    let gate = Gate::start(6, 60.0);

    // Port energy conservation: per-mode energy is phase-independent.
    let mut bs_dev = 0.0f64;
    for &(beta, alpha0, r, rho) in &[
        (0.3, 0.2, 0.99, 1e-4),
        (0.9, 0.7, 0.5, 0.3),
        (1.4, 1.2, 0.0, 1.0),
        (0.15, 0.08, 1.0, 0.0),
    ] {
        let filter = FilterSpec::new(r, rho).unwrap();
        let local = ModulationParams::with_phase(beta, 0.0).unwrap();
        let s = choose_truncation(beta, DEFAULT_TRUNCATION_TOL).unwrap();
        let amp = C64::new(alpha0, 0.0);
        let energies = |phi: f64| -> Vec<f64> {
            let input =
                make_scw_state(amp, &ModulationParams::with_phase(beta, phi).unwrap(), s).unwrap();
            let out = interface_transform(&input, &filter, &local).unwrap();
            (-(s as i32)..=(s as i32))
                .map(|m| {
                    out.port(Port::Plus).amp(m).norm_sqr() + out.port(Port::Minus).amp(m).norm_sqr()
                })
                .collect()
        };
        let reference = energies(0.0);
        for &phi in &[0.7, 2.1, 4.4] {
            for (e, e0) in energies(phi).iter().zip(&reference) {
                bs_dev = bs_dev.max((e - e0).abs());
            }
        }
    }
    let bs_ok = bs_dev < 1e-12;

    // Converted-qubit normalization is exact for any phase and either
    // first-order sideband.
    let mut norm_dev = 0.0f64;
    for k in 0..64 {
        let phi = k as f64 * TAU / 64.0;
        for m in [1, -1] {
            let (th, tv) = polarization_amplitudes(phi, m).unwrap();
            norm_dev = norm_dev.max((th.norm_sqr() + tv.norm_sqr() - 1.0).abs());
        }
    }
    let norm_ok = norm_dev <= 1e-15;

    // MLE physicality, likelihood monotonicity and faithfulness on exact
    // frequencies, including the maximally mixed and a near-pure state.
    let mut mle_ok = true;
    for &(bx, by, bz) in &[
        (0.2, -0.4, 0.5),
        (0.0, 0.0, 0.0),
        (0.6, 0.3, -0.65),
        (0.0, 0.0, 0.99),
    ] {
        let rho = DensityMatrix2::new([
            [
                C64::new((1.0 + bz) / 2.0, 0.0),
                C64::new(bx / 2.0, -by / 2.0),
            ],
            [
                C64::new(bx / 2.0, by / 2.0),
                C64::new((1.0 - bz) / 2.0, 0.0),
            ],
        ]);
        let records: Vec<TomographyRecord> = ProjectorLabel::ALL
            .iter()
            .map(|&label| TomographyRecord {
                projector: label,
                counts: (1e7 * rho.expectation(&projector(label))).round() as u64,
                duration_s: 1.0,
            })
            .collect();
        let outcome = mle_reconstruct_with_history(&records).unwrap();
        let (lo, hi) = outcome.rho.eigenvalues_hermitian();
        mle_ok &= outcome.converged
            && outcome.rho.is_hermitian(1e-12)
            && (outcome.rho.trace().re - 1.0).abs() < 1e-12
            && lo >= -1e-10
            && hi <= 1.0 + 1e-10
            && outcome
                .log_likelihoods
                .windows(2)
                .all(|pair| pair[1] >= pair[0] - 1e-12)
            && outcome.rho.trace_distance(&rho) < 1e-5;
    }

    // Bessel parity and sideband energy normalization.
    let mut bessel_ok = true;
    for &x in &[0.35, 1.7, 3.2] {
        for m in 0..=10 {
            let direct = bessel_j(m, x).unwrap();
            let reflected = bessel_j(-m, x).unwrap();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            bessel_ok &= (reflected - sign * direct).abs() <= 1e-15 * direct.abs().max(1.0);
        }
        let mut energy = bessel_j(0, x).unwrap().powi(2);
        for k in 1..=30 {
            energy += 2.0 * bessel_j(k, x).unwrap().powi(2);
        }
        bessel_ok &= (energy - 1.0).abs() < 1e-12;
    }

    // Both schemes decode pure noise at QBER exactly 1/2.
    let params = reference_params(0.8, 0.65);
    let dark_trad = qber_traditional(&params, 0.0).unwrap();
    let dark_disc = qber_discriminator(&params, 0.0).unwrap().qber;
    let dark_ok = (dark_trad - 0.5).abs() < 1e-12 && (dark_disc - 0.5).abs() < 1e-12;

    // A lossless channel leaks nothing to the beamsplitter attack.
    let holevo_ok = [(0.8, 0.65), (2.0, 1.5), (0.3, 0.1)]
        .iter()
        .all(|&(a, b)| holevo_bound(a, b, 1.0).unwrap() == 0.0);

    // The polished optimum matches a brute-force 64x64 grid.
    let eta = 0.01;
    let opt = optimize_key_rate(
        Scheme::Traditional,
        &params,
        eta,
        &OptimizationBounds::default(),
    )
    .unwrap();
    let mut grid_best = f64::NEG_INFINITY;
    for i in 0..64 {
        for j in 0..64 {
            let alpha0 = (i + 1) as f64 / 64.0 * 2.0;
            let beta = (j + 1) as f64 / 64.0 * 1.5;
            let k = key_rate_traditional(&params.with_controls(alpha0, beta).unwrap(), eta)
                .unwrap()
                .key_rate_bits_per_s;
            grid_best = grid_best.max(k);
        }
    }
    let optimizer_ok = opt.result.key_rate_bits_per_s >= grid_best * (1.0 - 1e-4);

    let ok = bs_ok && norm_ok && mle_ok && bessel_ok && dark_ok && holevo_ok && optimizer_ok;
    gate.finish(
        ok,
        format!(
            "energy conservation dev {bs_dev:.1e} < 1e-12; qubit norm dev {norm_dev:.1e}; \
             MLE physical+monotone: {mle_ok}; Bessel identities: {bessel_ok}; \
             dark QBER = 1/2 both schemes: {dark_ok}; holevo(alpha0, beta, 1) = 0: {holevo_ok}; \
             optimizer vs 64x64 grid within 1e-4: {optimizer_ok}"
        ),
    );
}
