//! Figure-ready dataset rendering.
//!
//! Every table is available as CSV (header row, comma separator, `.`
//! decimal point, LF line endings) or as a JSON array of records carrying
//! the same column names. Floating-point values are printed with 12
//! significant digits in both formats so regenerated datasets diff
//! byte-for-byte.
//!
//! Key rates are clamped to zero when rendered into sweep tables; the
//! underlying [`KeyRateResult`](crate::qkd::KeyRateResult) keeps the raw
//! sign, which locates the cutoff loss.

use crate::config::OutputFormat;
use crate::error::{Error, Result};
use crate::interface::PhaseScan;
use crate::optimizer::SweepOptimum;
use crate::qkd::SweepPoint;
use crate::tomography::{DensityMatrix2, ProjectorLabel, TomographyRecord, TomographyRun};
use serde_json::{json, Value};
use std::path::Path;

/// Formats a float with 12 significant digits, trimming trailing zeros:
/// fixed notation for decimal exponents in `[-4, 12)`, scientific
/// otherwise.
pub fn fmt_sig12(x: f64) -> String {
    fmt_sig(x, 12)
}

fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("float in scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..sig as i32).contains(&exp) {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        strip_trailing_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", strip_trailing_zeros(mantissa.to_string()))
    }
}

fn strip_trailing_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A float as a JSON number rounded to 12 significant digits.
fn json_number(x: f64) -> Value {
    fmt_sig12(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn render_json(records: Vec<Value>) -> String {
    let mut text =
        serde_json::to_string_pretty(&Value::Array(records)).expect("JSON rendering is total");
    text.push('\n');
    text
}

fn render_csv(header: &str, rows: Vec<String>) -> String {
    let mut text = String::with_capacity(header.len() + rows.len() * 32 + 16);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    text
}

/// Renders a phase scan with globally normalized H/V rates.
pub fn phase_scan_table(scan: &PhaseScan, format: OutputFormat) -> String {
    let h = scan.rates_h_norm();
    let v = scan.rates_v_norm();
    match format {
        OutputFormat::Csv => render_csv(
            "delta_phi_rad,rate_h_norm,rate_v_norm",
            scan.delta_phi
                .iter()
                .zip(h.iter().zip(v.iter()))
                .map(|(&phi, (&rh, &rv))| {
                    format!("{},{},{}", fmt_sig12(phi), fmt_sig12(rh), fmt_sig12(rv))
                })
                .collect(),
        ),
        OutputFormat::Json => render_json(
            scan.delta_phi
                .iter()
                .zip(h.iter().zip(v.iter()))
                .map(|(&phi, (&rh, &rv))| {
                    json!({
                        "delta_phi_rad": json_number(phi),
                        "rate_h_norm": json_number(rh),
                        "rate_v_norm": json_number(rv),
                    })
                })
                .collect(),
        ),
    }
}

/// Renders a `(β, visibility)` table.
pub fn visibility_table(rows: &[(f64, f64)], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(
            "beta,visibility",
            rows.iter()
                .map(|&(beta, vis)| format!("{},{}", fmt_sig12(beta), fmt_sig12(vis)))
                .collect(),
        ),
        OutputFormat::Json => render_json(
            rows.iter()
                .map(|&(beta, vis)| {
                    json!({
                        "beta": json_number(beta),
                        "visibility": json_number(vis),
                    })
                })
                .collect(),
        ),
    }
}

/// Renders tomography acquisition records.
pub fn tomography_records_table(records: &[TomographyRecord], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(
            "projector,counts,duration_s",
            records
                .iter()
                .map(|rec| {
                    format!(
                        "{},{},{}",
                        rec.projector.name(),
                        rec.counts,
                        fmt_sig12(rec.duration_s)
                    )
                })
                .collect(),
        ),
        OutputFormat::Json => render_json(
            records
                .iter()
                .map(|rec| {
                    json!({
                        "projector": rec.projector.name(),
                        "counts": rec.counts,
                        "duration_s": json_number(rec.duration_s),
                    })
                })
                .collect(),
        ),
    }
}

/// Parses tomography records back from their CSV rendering.
pub fn parse_tomography_records(text: &str) -> Result<Vec<TomographyRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == "projector,counts,duration_s" => {}
        _ => {
            return Err(Error::Config(
                "expected header 'projector,counts,duration_s'".into(),
            ))
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Config(format!(
                "row {}: expected 3 fields, found {}",
                idx + 2,
                fields.len()
            )));
        }
        let projector = ProjectorLabel::parse(fields[0])?;
        let counts: u64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("row {}: invalid counts '{}'", idx + 2, fields[1])))?;
        let duration_s: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("row {}: invalid duration '{}'", idx + 2, fields[2])))?;
        records.push(TomographyRecord {
            projector,
            counts,
            duration_s,
        });
    }
    Ok(records)
}

/// A 2×2 density matrix as a JSON value with `re`/`im` entry arrays.
pub fn density_matrix_value(rho: &DensityMatrix2) -> Value {
    let grid = |f: fn(crate::math::C64) -> f64| -> Value {
        Value::Array(
            (0..2)
                .map(|i| {
                    Value::Array((0..2).map(|j| json_number(f(rho.get(i, j)))).collect())
                })
                .collect(),
        )
    };
    json!({
        "re": grid(|z| z.re),
        "im": grid(|z| z.im),
    })
}

/// Pretty-printed density-matrix JSON document.
pub fn density_matrix_json(rho: &DensityMatrix2) -> String {
    let mut text =
        serde_json::to_string_pretty(&density_matrix_value(rho)).expect("JSON rendering is total");
    text.push('\n');
    text
}

/// Renders the per-state fidelity summary of a tomography batch.
pub fn fidelity_table(runs: &[TomographyRun], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(
            "delta_phi_rad,target,fidelity",
            runs.iter()
                .map(|run| {
                    format!(
                        "{},{},{}",
                        fmt_sig12(run.delta_phi),
                        run.target,
                        fmt_sig12(run.fidelity)
                    )
                })
                .collect(),
        ),
        OutputFormat::Json => render_json(
            runs.iter()
                .map(|run| {
                    json!({
                        "delta_phi_rad": json_number(run.delta_phi),
                        "target": run.target,
                        "fidelity": json_number(run.fidelity),
                    })
                })
                .collect(),
        ),
    }
}

const SWEEP_HEADER: &str = "loss_db,eta,scheme,alpha0,beta,K_bits_per_s,Q,P_B,chi";

fn sweep_row_fields(point: &SweepPoint) -> [String; 9] {
    [
        fmt_sig12(point.loss_db),
        fmt_sig12(point.eta),
        point.result.scheme.name().to_string(),
        fmt_sig12(point.alpha0),
        fmt_sig12(point.beta),
        fmt_sig12(point.result.key_rate_bits_per_s.max(0.0)),
        fmt_sig12(point.result.qber),
        fmt_sig12(point.result.p_b),
        fmt_sig12(point.result.chi),
    ]
}

fn sweep_row_value(point: &SweepPoint) -> Value {
    json!({
        "loss_db": json_number(point.loss_db),
        "eta": json_number(point.eta),
        "scheme": point.result.scheme.name(),
        "alpha0": json_number(point.alpha0),
        "beta": json_number(point.beta),
        "K_bits_per_s": json_number(point.result.key_rate_bits_per_s.max(0.0)),
        "Q": json_number(point.result.qber),
        "P_B": json_number(point.result.p_b),
        "chi": json_number(point.result.chi),
    })
}

/// Renders a fixed-parameter loss sweep. Rows may interleave schemes; key
/// rates render clamped at zero.
pub fn sweep_table(points: &[SweepPoint], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(
            SWEEP_HEADER,
            points
                .iter()
                .map(|p| sweep_row_fields(p).join(","))
                .collect(),
        ),
        OutputFormat::Json => render_json(points.iter().map(sweep_row_value).collect()),
    }
}

/// Renders an optimized loss sweep: the fixed-sweep schema plus the
/// optimizer's outcome columns. `alpha0`/`beta` carry the configured
/// (unoptimized) controls for comparison; `alpha0_opt`/`beta_opt` the
/// per-loss optima.
pub fn optimized_sweep_table(
    configured: (f64, f64),
    rows: &[SweepOptimum],
    format: OutputFormat,
) -> String {
    let (alpha0, beta) = configured;
    match format {
        OutputFormat::Csv => render_csv(
            &format!("{SWEEP_HEADER},alpha0_opt,beta_opt,below_cutoff"),
            rows.iter()
                .map(|row| {
                    let base = SweepPoint {
                        loss_db: row.loss_db,
                        eta: row.eta,
                        alpha0,
                        beta,
                        result: row.optimum.result,
                    };
                    let mut fields = sweep_row_fields(&base).to_vec();
                    fields.push(fmt_sig12(row.optimum.alpha0));
                    fields.push(fmt_sig12(row.optimum.beta));
                    fields.push(row.optimum.below_cutoff.to_string());
                    fields.join(",")
                })
                .collect(),
        ),
        OutputFormat::Json => render_json(
            rows.iter()
                .map(|row| {
                    let base = SweepPoint {
                        loss_db: row.loss_db,
                        eta: row.eta,
                        alpha0,
                        beta,
                        result: row.optimum.result,
                    };
                    let mut value = sweep_row_value(&base);
                    let map = value.as_object_mut().expect("sweep row is an object");
                    map.insert("alpha0_opt".into(), json_number(row.optimum.alpha0));
                    map.insert("beta_opt".into(), json_number(row.optimum.beta));
                    map.insert("below_cutoff".into(), Value::Bool(row.optimum.below_cutoff));
                    value
                })
                .collect(),
        ),
    }
}

/// Writes rendered text to a file.
pub fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkd::{KeyRateResult, Scheme};
    use crate::tomography::projector;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig12(0.0), "0");
        assert_eq!(fmt_sig12(-0.0), "0");
        assert_eq!(fmt_sig12(0.5), "0.5");
        assert_eq!(fmt_sig12(10.0), "10");
        assert_eq!(fmt_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig12(2353.7792699077354), "2353.77926991");
        assert_eq!(fmt_sig12(0.023683129301748266), "0.0236831293017");
        assert_eq!(fmt_sig12(-0.023683129301748266), "-0.0236831293017");
        assert_eq!(fmt_sig12(1e-7), "1e-7");
        assert_eq!(fmt_sig12(1.65e-7), "1.65e-7");
        assert_eq!(fmt_sig12(1e12), "1e12");
        assert_eq!(fmt_sig12(123456789012.3), "123456789012");
        assert_eq!(fmt_sig12(999999.999999951), "1000000");
        assert_eq!(fmt_sig12(0.0001), "0.0001");
        assert_eq!(fmt_sig12(9.999999999999e-5), "9.999999999999e-5".parse::<f64>().map(fmt_sig12).unwrap());
    }

    #[test]
    fn formatting_round_trips_to_twelve_digits() {
        for &x in &[
            0.9525889234873424,
            3.4838622079092476e-05,
            2511.642121745954,
            1.0,
            -7.5e-6,
        ] {
            let reparsed: f64 = fmt_sig12(x).parse().unwrap();
            assert!(
                ((reparsed - x) / x).abs() < 1e-11,
                "{x} printed as {} lost precision",
                fmt_sig12(x)
            );
        }
    }

    #[test]
    fn phase_scan_csv_shape() {
        let scan = PhaseScan {
            delta_phi: vec![0.0, 1.5],
            rate_h: vec![200.0, 50.0],
            rate_v: vec![0.0, 100.0],
        };
        let csv = phase_scan_table(&scan, OutputFormat::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "delta_phi_rad,rate_h_norm,rate_v_norm");
        assert_eq!(lines[1], "0,1,0");
        assert_eq!(lines[2], "1.5,0.25,0.5");
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn csv_and_json_carry_the_same_numbers() {
        let rows = vec![(0.15, 0.9525), (0.4, 0.9188)];
        let csv = visibility_table(&rows, OutputFormat::Csv);
        let parsed: Value =
            serde_json::from_str(&visibility_table(&rows, OutputFormat::Json)).unwrap();
        let from_json = parsed.as_array().unwrap();
        for (line, obj) in csv.lines().skip(1).zip(from_json) {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells[0].parse::<f64>().unwrap(), obj["beta"].as_f64().unwrap());
            assert_eq!(
                cells[1].parse::<f64>().unwrap(),
                obj["visibility"].as_f64().unwrap()
            );
        }
    }

    #[test]
    fn tomography_records_round_trip() {
        let records = vec![
            TomographyRecord {
                projector: ProjectorLabel::H,
                counts: 31337,
                duration_s: 10.0,
            },
            TomographyRecord {
                projector: ProjectorLabel::L,
                counts: 0,
                duration_s: 0.5,
            },
        ];
        let csv = tomography_records_table(&records, OutputFormat::Csv);
        assert_eq!(csv.lines().next().unwrap(), "projector,counts,duration_s");
        let reparsed = parse_tomography_records(&csv).unwrap();
        assert_eq!(reparsed, records);

        assert!(parse_tomography_records("nope\nH,1,1").is_err());
        assert!(
            parse_tomography_records("projector,counts,duration_s\nX,1,1").is_err()
        );
        assert!(
            parse_tomography_records("projector,counts,duration_s\nH,-3,1").is_err()
        );
    }

    #[test]
    fn density_matrix_layout() {
        let rho = projector(ProjectorLabel::R);
        let value = density_matrix_value(&rho);
        assert_eq!(value["re"][0][0].as_f64().unwrap(), 0.5);
        assert_eq!(value["im"][0][1].as_f64().unwrap(), -0.5);
        assert_eq!(value["im"][1][0].as_f64().unwrap(), 0.5);
        let text = density_matrix_json(&rho);
        assert!(text.contains("\"re\""));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn sweep_rows_clamp_rendered_key_rate() {
        let negative = SweepPoint {
            loss_db: 60.0,
            eta: 1e-6,
            alpha0: 0.8,
            beta: 0.65,
            result: KeyRateResult {
                scheme: Scheme::Traditional,
                key_rate_bits_per_s: -12.5,
                qber: 0.42,
                p_b: 1e-7,
                chi: 0.9,
            },
        };
        let csv = sweep_table(&[negative], OutputFormat::Csv);
        let row = csv.lines().nth(1).unwrap();
        assert_eq!(
            csv.lines().next().unwrap(),
            "loss_db,eta,scheme,alpha0,beta,K_bits_per_s,Q,P_B,chi"
        );
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[2], "traditional");
        assert_eq!(cells[5], "0", "negative key rate must render as 0");

        let json: Value =
            serde_json::from_str(&sweep_table(&[negative], OutputFormat::Json)).unwrap();
        assert_eq!(json[0]["K_bits_per_s"].as_f64().unwrap(), 0.0);
    }

    #[test]
    fn optimized_sweep_schema() {
        use crate::optimizer::{OptimumPoint, SweepOptimum};
        let row = SweepOptimum {
            loss_db: 20.0,
            eta: 0.01,
            optimum: OptimumPoint {
                alpha0: 0.52,
                beta: 0.61,
                result: KeyRateResult {
                    scheme: Scheme::Discriminator,
                    key_rate_bits_per_s: 1234.5,
                    qber: 0.02,
                    p_b: 3e-4,
                    chi: 0.1,
                },
                below_cutoff: false,
            },
        };
        let csv = optimized_sweep_table((0.8, 0.65), &[row], OutputFormat::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "loss_db,eta,scheme,alpha0,beta,K_bits_per_s,Q,P_B,chi,alpha0_opt,beta_opt,below_cutoff"
        );
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells[3], "0.8");
        assert_eq!(cells[9], "0.52");
        assert_eq!(cells[11], "false");

        let json: Value = serde_json::from_str(&optimized_sweep_table(
            (0.8, 0.65),
            &[row],
            OutputFormat::Json,
        ))
        .unwrap();
        assert_eq!(json[0]["beta_opt"].as_f64().unwrap(), 0.61);
        assert_eq!(json[0]["below_cutoff"].as_bool().unwrap(), false);
    }
}
