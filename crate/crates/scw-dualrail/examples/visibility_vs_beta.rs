//! Interference visibility as a function of modulation depth.
//!
//! Shallow modulation starves the sidebands until dark counts wash out the
//! fringe; deep modulation populates higher-order sidebands that interfere
//! incoherently with the first order. In between sits a broad plateau
//! where the conversion stays faithful.
//!
//! Run with: cargo run -p scw-dualrail --example visibility_vs_beta

use scw_dualrail::interface::{visibility_vs_beta, DetectorSpec, FilterSpec};
use scw_dualrail::math::C64;
use scw_dualrail::report::fmt_sig12;

fn main() -> scw_dualrail::Result<()> {
    let alpha0 = C64::new(0.08, 0.0);
    let filter = FilterSpec::new(0.99, 1e-4)?;
    let det = DetectorSpec::new(0.1, 100.0, 3.3e-9, 1e-8)?;

    let betas: Vec<f64> = (1..=40).map(|k| k as f64 * 0.05).collect();
    let rows = visibility_vs_beta(&betas, alpha0, &filter, &det)?;

    println!("beta   visibility");
    for &(beta, vis) in &rows {
        let bar = "#".repeat((vis * 50.0).round() as usize);
        println!("{:<5}  {:<15} {bar}", fmt_sig12(beta), fmt_sig12(vis));
    }

    let plateau: Vec<&(f64, f64)> = rows
        .iter()
        .filter(|(beta, _)| (0.1..=0.7).contains(beta))
        .collect();
    let worst = plateau
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    println!();
    println!(
        "plateau beta in [0.1, 0.7]: worst visibility {}",
        fmt_sig12(worst)
    );
    Ok(())
}
