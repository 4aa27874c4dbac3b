//! Key-rate maximization over the transmitter controls `(α₀, β)`.
//!
//! The key-rate surface is smooth but non-convex (Bessel factors fold the
//! modulation depth), so the optimizer runs in two deterministic stages: a
//! coarse rectangular grid locates the basin, then a bounded Nelder-Mead
//! polish refines inside it. The returned point is never worse than the
//! best grid candidate, and repeated calls with the same inputs return
//! bit-identical results (no randomness anywhere in the chain).
//!
//! Loss sweeps reuse the previous optimum as an extra warm-start candidate
//! by default, which keeps the per-loss cost low when neighbouring optima
//! are close; disabling warm start trades that for parallel evaluation
//! across losses.

use crate::error::{Error, Result};
use crate::qkd::{check_losses, eta_from_db, key_rate, KeyRateResult, ProtocolParams, Scheme};

/// Search box and coarse resolution for the control optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationBounds {
    /// Lower edge for `α₀` (excluded from the grid; must be ≥ 0).
    pub alpha0_low: f64,
    /// Upper edge for `α₀` (included in the grid).
    pub alpha0_high: f64,
    /// Lower edge for `β` (excluded from the grid; must be ≥ 0).
    pub beta_low: f64,
    /// Upper edge for `β` (included in the grid).
    pub beta_high: f64,
    /// Points per axis in the coarse stage (≥ 8).
    pub coarse_grid: usize,
}

impl Default for OptimizationBounds {
    fn default() -> Self {
        OptimizationBounds {
            alpha0_low: 0.0,
            alpha0_high: 2.0,
            beta_low: 0.0,
            beta_high: 1.5,
            coarse_grid: 32,
        }
    }
}

impl OptimizationBounds {
    /// Validates the box and resolution.
    pub fn validate(&self) -> Result<()> {
        for (name, low, high) in [
            ("alpha0", self.alpha0_low, self.alpha0_high),
            ("beta", self.beta_low, self.beta_high),
        ] {
            if !low.is_finite() || !high.is_finite() || low < 0.0 || high <= low {
                return Err(Error::domain(
                    "OptimizationBounds",
                    format!("{name} range [{low}, {high}] must satisfy 0 <= low < high"),
                ));
            }
        }
        if self.coarse_grid < 8 {
            return Err(Error::domain(
                "OptimizationBounds",
                format!("coarse grid {} is too sparse (minimum 8)", self.coarse_grid),
            ));
        }
        Ok(())
    }
}

/// Optimization outcome at one channel transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumPoint {
    /// Optimal carrier amplitude.
    pub alpha0: f64,
    /// Optimal modulation depth.
    pub beta: f64,
    /// Key-rate evaluation at the optimum (raw sign preserved).
    pub result: KeyRateResult,
    /// True when no coarse candidate produced a positive key rate; the
    /// refinement stage is skipped and the best (non-positive) grid point
    /// is reported.
    pub below_cutoff: bool,
}

/// Standard Nelder-Mead coefficients: reflection, expansion, contraction,
/// shrink.
const NM_REFLECT: f64 = 1.0;
const NM_EXPAND: f64 = 2.0;
const NM_CONTRACT: f64 = 0.5;
const NM_SHRINK: f64 = 0.5;
/// Simplex diameter (normalized coordinates) below which the polish stops.
const NM_DIAMETER_TOL: f64 = 1e-6;
/// Iteration cap for the polish.
const NM_MAX_ITERS: usize = 500;

struct Objective<'a> {
    scheme: Scheme,
    template: &'a ProtocolParams,
    eta: f64,
    bounds: &'a OptimizationBounds,
}

impl Objective<'_> {
    fn controls(&self, u: [f64; 2]) -> (f64, f64) {
        (
            self.bounds.alpha0_low + u[0] * (self.bounds.alpha0_high - self.bounds.alpha0_low),
            self.bounds.beta_low + u[1] * (self.bounds.beta_high - self.bounds.beta_low),
        )
    }

    /// Negative key rate (minimized); invalid control points rank worst.
    fn cost(&self, u: [f64; 2]) -> f64 {
        let (alpha0, beta) = self.controls(u);
        match self
            .template
            .with_controls(alpha0, beta)
            .and_then(|p| key_rate(self.scheme, &p, self.eta))
        {
            Ok(res) if res.key_rate_bits_per_s.is_finite() => -res.key_rate_bits_per_s,
            _ => f64::INFINITY,
        }
    }

    fn evaluate(&self, u: [f64; 2]) -> Result<(f64, f64, KeyRateResult)> {
        let (alpha0, beta) = self.controls(u);
        let params = self.template.with_controls(alpha0, beta)?;
        Ok((alpha0, beta, key_rate(self.scheme, &params, self.eta)?))
    }
}

/// Clamps a normalized coordinate into the box, keeping a tiny positive
/// floor so the low edge (where `α₀` or `β` would vanish) stays excluded.
fn clamp_unit(u: [f64; 2]) -> [f64; 2] {
    [u[0].clamp(1e-9, 1.0), u[1].clamp(1e-9, 1.0)]
}

fn simplex_diameter(vertices: &[[f64; 2]; 3]) -> f64 {
    let mut diam = 0.0f64;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let d = (vertices[i][0] - vertices[j][0])
                .abs()
                .max((vertices[i][1] - vertices[j][1]).abs());
            diam = diam.max(d);
        }
    }
    diam
}

/// Bounded Nelder-Mead descent on the normalized box, started around `u0`
/// with edge length `step`. Returns the best vertex found.
fn nelder_mead(obj: &Objective<'_>, u0: [f64; 2], step: f64) -> [f64; 2] {
    // Step away from the upper edge when the start sits on it.
    let offset = |u: f64| if u + step <= 1.0 { u + step } else { u - step };
    let mut vertices = [
        clamp_unit(u0),
        clamp_unit([offset(u0[0]), u0[1]]),
        clamp_unit([u0[0], offset(u0[1])]),
    ];
    let mut costs = vertices.map(|v| obj.cost(v));

    for _ in 0..NM_MAX_ITERS {
        // Order ascending by cost (best first); stable under ties.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| costs[a].partial_cmp(&costs[b]).unwrap());
        vertices = [vertices[order[0]], vertices[order[1]], vertices[order[2]]];
        costs = [costs[order[0]], costs[order[1]], costs[order[2]]];

        if simplex_diameter(&vertices) < NM_DIAMETER_TOL {
            break;
        }

        let centroid = [
            (vertices[0][0] + vertices[1][0]) / 2.0,
            (vertices[0][1] + vertices[1][1]) / 2.0,
        ];
        let towards = |from: [f64; 2], coeff: f64| {
            clamp_unit([
                centroid[0] + coeff * (centroid[0] - from[0]),
                centroid[1] + coeff * (centroid[1] - from[1]),
            ])
        };

        let reflected = towards(vertices[2], NM_REFLECT);
        let f_reflected = obj.cost(reflected);

        if f_reflected < costs[0] {
            let expanded = towards(vertices[2], NM_REFLECT * NM_EXPAND);
            let f_expanded = obj.cost(expanded);
            if f_expanded < f_reflected {
                vertices[2] = expanded;
                costs[2] = f_expanded;
            } else {
                vertices[2] = reflected;
                costs[2] = f_reflected;
            }
        } else if f_reflected < costs[1] {
            vertices[2] = reflected;
            costs[2] = f_reflected;
        } else {
            // Contract outside when the reflection improved on the worst
            // vertex, inside otherwise.
            let contracted = if f_reflected < costs[2] {
                towards(vertices[2], NM_REFLECT * NM_CONTRACT)
            } else {
                towards(vertices[2], -NM_CONTRACT)
            };
            let f_contracted = obj.cost(contracted);
            if f_contracted < f_reflected.min(costs[2]) {
                vertices[2] = contracted;
                costs[2] = f_contracted;
            } else {
                for i in 1..3 {
                    vertices[i] = clamp_unit([
                        vertices[0][0] + NM_SHRINK * (vertices[i][0] - vertices[0][0]),
                        vertices[0][1] + NM_SHRINK * (vertices[i][1] - vertices[0][1]),
                    ]);
                    costs[i] = obj.cost(vertices[i]);
                }
            }
        }
    }

    let best = (0..3)
        .min_by(|&a, &b| costs[a].partial_cmp(&costs[b]).unwrap())
        .unwrap();
    vertices[best]
}

/// Maximizes the key rate of `scheme` over `(α₀, β)` at one transmission.
///
/// `template` supplies the filter, detector and post-processing parameters;
/// its own `alpha0`/`beta` fields are ignored. `warm_start` optionally adds
/// an extra coarse candidate (clamped into the box), used by sweeps to seed
/// each loss with its neighbour's optimum.
///
/// The coarse stage scans an `n×n` grid that excludes the degenerate low
/// edges and includes the upper edges; ties prefer the smaller `α₀`, then
/// the smaller `β`. When every candidate's key rate is non-positive the
/// point is flagged `below_cutoff` and refinement is skipped.
pub fn optimize_key_rate(
    scheme: Scheme,
    template: &ProtocolParams,
    eta: f64,
    bounds: &OptimizationBounds,
) -> Result<OptimumPoint> {
    optimize_key_rate_from(scheme, template, eta, bounds, None)
}

/// [`optimize_key_rate`] with an explicit warm-start candidate.
pub fn optimize_key_rate_from(
    scheme: Scheme,
    template: &ProtocolParams,
    eta: f64,
    bounds: &OptimizationBounds,
    warm_start: Option<(f64, f64)>,
) -> Result<OptimumPoint> {
    bounds.validate()?;
    if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain(
            "optimize_key_rate",
            format!("transmission {eta} outside [0, 1]"),
        ));
    }
    let obj = Objective {
        scheme,
        template,
        eta,
        bounds,
    };

    let n = bounds.coarse_grid;
    let mut candidates: Vec<[f64; 2]> = Vec::with_capacity(n * n + 1);
    for i in 0..n {
        for j in 0..n {
            candidates.push([(i + 1) as f64 / n as f64, (j + 1) as f64 / n as f64]);
        }
    }
    if let Some((alpha0, beta)) = warm_start {
        let span_a = bounds.alpha0_high - bounds.alpha0_low;
        let span_b = bounds.beta_high - bounds.beta_low;
        candidates.push(clamp_unit([
            (alpha0 - bounds.alpha0_low) / span_a,
            (beta - bounds.beta_low) / span_b,
        ]));
    }

    use rayon::prelude::*;
    let costs: Vec<f64> = candidates.par_iter().map(|&u| obj.cost(u)).collect();
    // Sequential scan with strict improvement: the first minimizer wins,
    // and the α₀-major grid order makes ties resolve toward smaller α₀,
    // then smaller β.
    let mut best = 0usize;
    for (idx, &cost) in costs.iter().enumerate().skip(1) {
        if cost < costs[best] {
            best = idx;
        }
    }
    if !costs[best].is_finite() {
        return Err(Error::Model(
            "key rate could not be evaluated anywhere in the search box".into(),
        ));
    }

    let coarse_u = candidates[best];
    if -costs[best] <= 0.0 {
        let (alpha0, beta, result) = obj.evaluate(coarse_u)?;
        return Ok(OptimumPoint {
            alpha0,
            beta,
            result,
            below_cutoff: true,
        });
    }

    let refined_u = nelder_mead(&obj, coarse_u, 1.0 / n as f64);
    let final_u = if obj.cost(refined_u) < costs[best] {
        refined_u
    } else {
        coarse_u
    };
    let (alpha0, beta, result) = obj.evaluate(final_u)?;
    Ok(OptimumPoint {
        alpha0,
        beta,
        result,
        below_cutoff: false,
    })
}

/// One optimized row of a loss sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptimum {
    /// Channel loss in dB.
    pub loss_db: f64,
    /// Linear transmission `η`.
    pub eta: f64,
    /// Optimization outcome at this loss.
    pub optimum: OptimumPoint,
}

/// Optimizes one scheme across a loss list (dB, sorted ascending).
///
/// With `warm_start` the losses run sequentially and each optimization
/// seeds the next with its optimum; without it the losses run in parallel.
pub fn sweep(
    scheme: Scheme,
    template: &ProtocolParams,
    losses_db: &[f64],
    bounds: &OptimizationBounds,
    warm_start: bool,
) -> Result<Vec<SweepOptimum>> {
    check_losses(losses_db)?;
    if warm_start {
        let mut rows = Vec::with_capacity(losses_db.len());
        let mut seed: Option<(f64, f64)> = None;
        for &loss_db in losses_db {
            let eta = eta_from_db(loss_db)?;
            let optimum = optimize_key_rate_from(scheme, template, eta, bounds, seed)?;
            seed = Some((optimum.alpha0, optimum.beta));
            rows.push(SweepOptimum {
                loss_db,
                eta,
                optimum,
            });
        }
        Ok(rows)
    } else {
        use rayon::prelude::*;
        losses_db
            .par_iter()
            .map(|&loss_db| {
                let eta = eta_from_db(loss_db)?;
                let optimum = optimize_key_rate(scheme, template, eta, bounds)?;
                Ok(SweepOptimum {
                    loss_db,
                    eta,
                    optimum,
                })
            })
            .collect()
    }
}
