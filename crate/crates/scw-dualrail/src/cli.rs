//! Command-line front end: one figure-ready dataset per subcommand.
//!
//! Each command reads an optional config file, applies flag overrides,
//! runs the corresponding simulation and writes its dataset into the
//! output directory. Exit codes: `0` success, `2` configuration or usage
//! error, `3` runtime or model-validity error. Every command is
//! deterministic given its configuration (tomography through its seed).

use crate::config::{OutputFormat, PhaseList, RunConfig};
use crate::error::{Error, Result};
use crate::interface::{
    phase_scan_with, visibility, visibility_vs_beta_with, DetectorSpec, ScanOptions,
};
use crate::math::C64;
use crate::optimizer;
use crate::qkd::{self, Scheme};
use crate::report;
use crate::tomography::{four_state_pipeline, CountSampling};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

/// Dataset generator for the subcarrier-wave to dual-rail interface model.
#[derive(Parser, Debug)]
#[command(
    name = "scwdr",
    version,
    about = "Simulates a subcarrier-wave to dual-rail polarization interface \
             and writes figure-ready datasets"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Key-value config file ('section.key = value' lines).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides output.dir).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Output format: csv or json (overrides output.format).
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<String>,

    /// Tomography RNG seed (overrides tomography.seed).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker thread cap (default: available processors).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Interference fringe: normalized H/V rates over the phase scan.
    PhaseScan,
    /// Interference visibility versus modulation depth.
    Visibility,
    /// Four-state preparation, sampling and MLE reconstruction.
    Tomography,
    /// Key-rate loss sweep at the configured protocol controls.
    Keyrate {
        /// Scheme to evaluate: traditional, discriminator or both.
        #[arg(long, default_value = "both", value_parser = parse_scheme_choice)]
        scheme: SchemeChoice,
        /// Re-optimize (alpha0, beta) at every loss.
        #[arg(long)]
        optimize: bool,
    },
    /// Optimized key-rate loss sweep for both schemes.
    Optimize,
}

/// Scheme selection for sweep commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeChoice {
    /// Evaluate both schemes (traditional rows first).
    Both,
    /// Evaluate a single scheme.
    One(Scheme),
}

impl SchemeChoice {
    fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeChoice::Both => Scheme::ALL.to_vec(),
            SchemeChoice::One(scheme) => vec![scheme],
        }
    }
}

fn parse_scheme_choice(s: &str) -> std::result::Result<SchemeChoice, String> {
    if s.eq_ignore_ascii_case("both") {
        Ok(SchemeChoice::Both)
    } else {
        Scheme::parse(s)
            .map(SchemeChoice::One)
            .map_err(|e| e.to_string())
    }
}

/// Parses `std::env::args`, runs the command and returns the process exit
/// code.
pub fn run() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => match execute(cli) {
            Ok(()) => 0,
            Err(err) => {
                eprintln!("error: {err}");
                match err {
                    Error::Config(_) => 2,
                    _ => 3,
                }
            }
        },
        Err(err) => {
            // clap routes --help/--version to stdout (success) and usage
            // errors to stderr.
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            code
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        None => RunConfig::default(),
    };
    if let Some(out) = cli.out {
        config.output.dir = out;
    }
    if let Some(format) = &cli.format {
        config.output.format = OutputFormat::parse(format)?;
    }
    if let Some(seed) = cli.seed {
        config.tomography.seed = seed;
    }
    config.validate()?;

    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            log::warn!("thread pool already initialized: {e}");
        }
    }

    std::fs::create_dir_all(&config.output.dir)?;
    match cli.command {
        Command::PhaseScan => cmd_phase_scan(&config),
        Command::Visibility => cmd_visibility(&config),
        Command::Tomography => cmd_tomography(&config),
        Command::Keyrate { scheme, optimize } => cmd_keyrate(&config, scheme, optimize, "keyrate"),
        Command::Optimize => cmd_keyrate(&config, SchemeChoice::Both, true, "optimize"),
    }
}

fn out_path(config: &RunConfig, stem: &str) -> PathBuf {
    config
        .output
        .dir
        .join(format!("{stem}.{}", config.output.format.extension()))
}

fn write_dataset(path: &Path, content: &str) -> Result<()> {
    report::write_text(path, content)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_phase_scan(config: &RunConfig) -> Result<()> {
    let phis = config.scan.delta_phi.points();
    let scan = phase_scan_with(
        config.scan.beta,
        C64::new(config.scan.alpha0, 0.0),
        &config.filter_spec()?,
        &config.detector_spec()?,
        &phis,
        config.scan.max_click_order,
    )?;
    match visibility(&scan.rate_h) {
        Ok(vis) => println!(
            "phase-scan: {} points, H-rail visibility {}",
            phis.len(),
            report::fmt_sig12(vis)
        ),
        Err(_) => println!("phase-scan: {} points", phis.len()),
    }
    write_dataset(
        &out_path(config, "phase_scan"),
        &report::phase_scan_table(&scan, config.output.format),
    )
}

fn cmd_visibility(config: &RunConfig) -> Result<()> {
    // A grid-style phase list also sets the fringe resolution here.
    let phase_points = match config.scan.delta_phi {
        PhaseList::Grid(n) => n,
        PhaseList::Explicit(_) => ScanOptions::default().phase_points,
    };
    let options = ScanOptions {
        phase_points,
        max_click_order: config.scan.max_click_order,
    };
    let rows = visibility_vs_beta_with(
        &config.scan.betas,
        C64::new(config.scan.alpha0, 0.0),
        &config.filter_spec()?,
        &config.detector_spec()?,
        &options,
    )?;
    let (min, max) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &(_, v)| {
        (lo.min(v), hi.max(v))
    });
    println!(
        "visibility: {} depths, range [{}, {}]",
        rows.len(),
        report::fmt_sig12(min),
        report::fmt_sig12(max)
    );
    write_dataset(
        &out_path(config, "visibility"),
        &report::visibility_table(&rows, config.output.format),
    )
}

fn cmd_tomography(config: &RunConfig) -> Result<()> {
    let t = &config.tomography;
    let (det, sampling) = if t.ideal {
        let d = &config.detector;
        (
            DetectorSpec::new(d.epsilon, 0.0, d.gate_s, d.period_s)?,
            CountSampling::Expected,
        )
    } else {
        (config.detector_spec()?, CountSampling::Poisson(t.seed))
    };
    let runs = four_state_pipeline(
        t.alpha0,
        t.beta,
        t.v_phase_offset_rad,
        &det,
        t.duration_s,
        sampling,
    )?;
    for run in &runs {
        println!(
            "tomography {}: fidelity {}",
            run.target,
            report::fmt_sig12(run.fidelity)
        );
        let records = out_path(config, &format!("tomography_records_{}", run.target));
        write_dataset(
            &records,
            &report::tomography_records_table(&run.records, config.output.format),
        )?;
        // Density matrices are structured values, not tables; they are
        // always JSON.
        let rho_path = config
            .output
            .dir
            .join(format!("tomography_rho_{}.json", run.target));
        report::write_text(&rho_path, &report::density_matrix_json(&run.rho))?;
        println!("wrote {}", rho_path.display());
    }
    write_dataset(
        &out_path(config, "tomography_fidelity"),
        &report::fidelity_table(&runs, config.output.format),
    )
}

fn cmd_keyrate(
    config: &RunConfig,
    choice: SchemeChoice,
    optimize: bool,
    stem: &str,
) -> Result<()> {
    let params = config.protocol_params()?;
    let mut losses = config.scan.losses_db.clone();
    losses.sort_by(f64::total_cmp);
    let schemes = choice.schemes();

    let content = if optimize {
        let bounds = config.optimization_bounds();
        let mut rows = Vec::new();
        for &scheme in &schemes {
            let sweep = optimizer::sweep(
                scheme,
                &params,
                &losses,
                &bounds,
                config.optimizer.warm_start,
            )?;
            if let (Some(first), Some(last)) = (sweep.first(), sweep.last()) {
                println!(
                    "{stem} {scheme}: K({} dB) = {} bits/s, K({} dB) = {} bits/s",
                    report::fmt_sig12(first.loss_db),
                    report::fmt_sig12(first.optimum.result.key_rate_bits_per_s.max(0.0)),
                    report::fmt_sig12(last.loss_db),
                    report::fmt_sig12(last.optimum.result.key_rate_bits_per_s.max(0.0)),
                );
            }
            rows.extend(sweep);
        }
        report::optimized_sweep_table((params.alpha0, params.beta), &rows, config.output.format)
    } else {
        let mut rows = Vec::new();
        for &scheme in &schemes {
            let sweep = qkd::fixed_sweep(scheme, &params, &losses)?;
            if let (Some(first), Some(last)) = (sweep.first(), sweep.last()) {
                println!(
                    "{stem} {scheme}: K({} dB) = {} bits/s, K({} dB) = {} bits/s",
                    report::fmt_sig12(first.loss_db),
                    report::fmt_sig12(first.result.key_rate_bits_per_s.max(0.0)),
                    report::fmt_sig12(last.loss_db),
                    report::fmt_sig12(last.result.key_rate_bits_per_s.max(0.0)),
                );
            }
            rows.extend(sweep);
        }
        report::sweep_table(&rows, config.output.format)
    };
    write_dataset(&out_path(config, stem), &content)
}
