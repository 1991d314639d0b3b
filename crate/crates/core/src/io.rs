//! File formats: field and curve CSV, the drift table, OBJ polylines and the
//! static SVG projection plot.
//!
//! All numeric columns are written with 17 significant digits so the CSV
//! files round-trip through the import path losslessly. Writers put nothing
//! time- or host-dependent into the files; identical inputs give
//! byte-identical outputs.

use crate::error::{Error, Result};
use crate::field::SpinField;
use crate::invariants::InvariantReport;
use crate::reconstruction::FilamentCurve;
use crate::spectral;
use crate::vec3;
use std::fmt::Write as _;
use std::path::Path;

pub const FIELD_HEADER: &str = "xi,j1,j2,j3";
pub const CURVE_HEADER: &str = "xi,z1,z2,z3";
pub const DRIFT_HEADER: &str = "tau,unit_norm_res,phi_norm,spin_energy,f1,f2,f3,H0,E_restricted";

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn field_to_csv(field: &SpinField) -> String {
    let mut out = String::from(FIELD_HEADER);
    out.push('\n');
    for (xi, s) in field.grid().into_iter().zip(field.samples()) {
        let _ = writeln!(out, "{},{},{},{}", fmt(xi), fmt(s[0]), fmt(s[1]), fmt(s[2]));
    }
    out
}

pub fn write_field_csv(path: &Path, field: &SpinField) -> Result<()> {
    std::fs::write(path, field_to_csv(field))?;
    Ok(())
}

pub fn parse_field_csv(text: &str) -> Result<SpinField> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == FIELD_HEADER => {}
        Some(header) => {
            return Err(Error::Parse(format!(
                "expected header '{FIELD_HEADER}', found '{header}'"
            )))
        }
        None => return Err(Error::Parse("empty field CSV".into())),
    }
    let mut samples = Vec::new();
    for (number, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!(
                "row {}: expected 4 columns, found {}",
                number + 2,
                fields.len()
            )));
        }
        let mut values = [0.0; 4];
        for (k, raw) in fields.iter().enumerate() {
            values[k] = raw.trim().parse::<f64>().map_err(|e| {
                Error::Parse(format!("row {}: bad number '{}': {e}", number + 2, raw))
            })?;
        }
        samples.push([values[1], values[2], values[3]]);
    }
    SpinField::from_samples(samples)
}

pub fn read_field_csv(path: &Path) -> Result<SpinField> {
    parse_field_csv(&std::fs::read_to_string(path)?)
}

pub fn curve_to_csv(curve: &FilamentCurve) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    let nodes = spectral::grid(curve.len());
    for (xi, z) in nodes.into_iter().zip(curve.points()) {
        let _ = writeln!(out, "{},{},{},{}", fmt(xi), fmt(z[0]), fmt(z[1]), fmt(z[2]));
    }
    out
}

pub fn write_curve_csv(path: &Path, curve: &FilamentCurve) -> Result<()> {
    std::fs::write(path, curve_to_csv(curve))?;
    Ok(())
}

/// OBJ-style polyline: one `v` record per sample and a closing `l` record.
pub fn curve_to_obj(curve: &FilamentCurve) -> String {
    let mut out = String::new();
    for z in curve.points() {
        let _ = writeln!(out, "v {} {} {}", fmt(z[0]), fmt(z[1]), fmt(z[2]));
    }
    out.push('l');
    for i in 1..=curve.len() {
        let _ = write!(out, " {i}");
    }
    out.push_str(" 1\n");
    out
}

pub fn write_curve_obj(path: &Path, curve: &FilamentCurve) -> Result<()> {
    std::fs::write(path, curve_to_obj(curve))?;
    Ok(())
}

/// Static SVG with the three coordinate-plane projections of the curve.
pub fn curve_to_svg(curve: &FilamentCurve) -> String {
    const PANEL: f64 = 220.0;
    const MARGIN: f64 = 20.0;
    let projections: [(&str, usize, usize); 3] =
        [("xy", 0, 1), ("xz", 0, 2), ("yz", 1, 2)];
    let width = 3.0 * PANEL + 4.0 * MARGIN;
    let height = PANEL + 2.0 * MARGIN + 16.0;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    );
    for (panel, (label, a, b)) in projections.iter().enumerate() {
        let x0 = MARGIN + panel as f64 * (PANEL + MARGIN);
        let y0 = MARGIN;
        let (mut min_a, mut max_a) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut min_b, mut max_b) = (f64::INFINITY, f64::NEG_INFINITY);
        for z in curve.points() {
            min_a = min_a.min(z[*a]);
            max_a = max_a.max(z[*a]);
            min_b = min_b.min(z[*b]);
            max_b = max_b.max(z[*b]);
        }
        let span = (max_a - min_a).max(max_b - min_b).max(1e-9);
        let map = |u: f64, umin: f64| (u - umin) / span * (PANEL - 20.0) + 10.0;
        let _ = writeln!(
            out,
            "  <rect x=\"{x0:.1}\" y=\"{y0:.1}\" width=\"{PANEL:.1}\" height=\"{PANEL:.1}\" \
             fill=\"none\" stroke=\"#999\"/>"
        );
        let mut path = String::new();
        for (i, z) in curve.points().iter().enumerate() {
            let px = x0 + map(z[*a], min_a);
            let py = y0 + PANEL - map(z[*b], min_b);
            let _ = write!(path, "{}{px:.3},{py:.3} ", if i == 0 { "M" } else { "L" });
        }
        // Close the loop.
        if let Some(z) = curve.points().first() {
            let px = x0 + map(z[*a], min_a);
            let py = y0 + PANEL - map(z[*b], min_b);
            let _ = write!(path, "L{px:.3},{py:.3}");
        }
        let _ = writeln!(out, "  <path d=\"{path}\" fill=\"none\" stroke=\"#1f77b4\"/>");
        let _ = writeln!(
            out,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\">{label}</text>",
            x0,
            y0 + PANEL + 14.0
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_curve_svg(path: &Path, curve: &FilamentCurve) -> Result<()> {
    std::fs::write(path, curve_to_svg(curve))?;
    Ok(())
}

/// One row of the drift table.
pub fn drift_row(tau: f64, report: &InvariantReport) -> String {
    let e_restricted = report
        .e_restricted
        .map(fmt)
        .unwrap_or_else(|| "nan".to_string());
    format!(
        "{},{},{},{},{},{},{},{},{}",
        fmt(tau),
        fmt(report.unit_norm_res),
        fmt(vec3::norm(report.phi)),
        fmt(report.spin_energy),
        fmt(report.f[0]),
        fmt(report.f[1]),
        fmt(report.f[2]),
        fmt(report.h0),
        e_restricted,
    )
}

pub fn drift_table(times: &[f64], reports: &[InvariantReport]) -> String {
    let mut out = String::from(DRIFT_HEADER);
    out.push('\n');
    for (tau, report) in times.iter().zip(reports) {
        out.push_str(&drift_row(*tau, report));
        out.push('\n');
    }
    out
}

pub fn report_to_json(report: &InvariantReport) -> String {
    serde_json::to_string_pretty(report).expect("invariant report serializes")
}
