use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::solver::MonitorSample;

use super::run::{read_monitors, MONITORS_FILE};
use super::ExperimentError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

/// Plot files written by [`plot_run`], one per monitor family.
pub const PLOT_FILES: [&str; 4] = ["energy.svg", "besov.svg", "phipsi.svg", "blowup.svg"];

type Series = (&'static str, fn(&MonitorSample) -> f64);

fn families() -> [(&'static str, &'static str, Vec<Series>); 4] {
    [
        (
            PLOT_FILES[0],
            "energies",
            vec![
                ("L2_energy", |s| s.l2_energy),
                ("grad_L2", |s| s.grad_l2),
                ("L4_fourth_power", |s| s.l4_fourth_power),
            ],
        ),
        (
            PLOT_FILES[1],
            "Besov and Sobolev norms",
            vec![("besov_32", |s| s.besov_32), ("besov_72", |s| s.besov_72), ("Hm_norm", |s| s.hm_norm)],
        ),
        (PLOT_FILES[2], "phi and psi", vec![("phi_t", |s| s.phi_t), ("psi_t", |s| s.psi_t)]),
        (PLOT_FILES[3], "blow-up integrand", vec![("blowup_integrand", |s| s.blowup_integrand)]),
    ]
}

fn render(title: &str, rows: &[MonitorSample], series: &[Series]) -> String {
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let (t0, t1) = (ts[0], *ts.last().expect("nonempty"));
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, f) in series {
        for r in rows {
            let v = f(r);
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if !lo.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    if hi - lo <= 1e-300 {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        lo -= pad;
        hi += pad;
    }
    let span_t = if t1 > t0 { t1 - t0 } else { 1.0 };
    let x = |t: f64| MARGIN + (t - t0) / span_t * (WIDTH - 2.0 * MARGIN);
    let y = |v: f64| HEIGHT - MARGIN - (v - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-size="16" text-anchor="middle">{title}</text>"#, WIDTH / 2.0);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let label = |s: &mut String, xx: f64, yy: f64, anchor: &str, text: String| {
        let _ = writeln!(s, r#"<text x="{xx:.2}" y="{yy:.2}" font-size="11" text-anchor="{anchor}">{text}</text>"#);
    };
    label(&mut s, MARGIN - 4.0, HEIGHT - MARGIN, "end", format!("{lo:.3e}"));
    label(&mut s, MARGIN - 4.0, MARGIN + 4.0, "end", format!("{hi:.3e}"));
    label(&mut s, MARGIN, HEIGHT - MARGIN + 16.0, "middle", format!("{t0}"));
    label(&mut s, WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, "middle", format!("{t1}"));
    label(&mut s, WIDTH / 2.0, HEIGHT - 16.0, "middle", "t".to_string());
    for (i, (name, f)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = rows
            .iter()
            .filter(|r| f(r).is_finite())
            .map(|r| format!("{:.2},{:.2}", x(r.t), y(f(r))))
            .collect();
        if !pts.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = MARGIN + 16.0 + 14.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{ly:.2}" font-size="11" fill="{color}">{name}</text>"#,
            WIDTH - MARGIN - 120.0
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes one SVG per monitor family from `dir/monitors.csv`.
pub fn plot_run(dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    let rows = read_monitors(&dir.join(MONITORS_FILE))?;
    if rows.is_empty() {
        return Err(ExperimentError::MissingData(format!("{}: no samples", MONITORS_FILE)));
    }
    let mut out = Vec::new();
    for (file, title, series) in families() {
        let path = dir.join(file);
        fs::write(&path, render(title, &rows, &series))?;
        out.push(path);
    }
    Ok(out)
}
