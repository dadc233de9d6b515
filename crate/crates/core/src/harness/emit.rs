use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::Format;
use super::report::{Aggregate, CurveOut, Report};
use super::HarnessError;

fn io_err(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io { path: path.to_path_buf(), message: e.to_string() }
}

/// Writes `report` as `<dir>/<experiment>.<ext>`.
pub fn emit(report: &Report, format: Format, dir: &Path) -> Result<PathBuf, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join(format!("{}.{}", report.config.experiment, format.extension()));
    let body = match format {
        Format::Json => report.to_json(),
        Format::Csv => to_csv(report).map_err(|e| io_err(&path, e))?,
        Format::Svg => to_svg(report),
    };
    std::fs::write(&path, body).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Aggregate table: sweep parameters in declared order, then metric,
/// value, stderr, n_replicas.
pub fn to_csv(report: &Report) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = report.sweep.iter().map(String::as_str).collect();
    header.extend(["metric", "value", "stderr", "n_replicas"]);
    w.write_record(&header)?;
    for a in &report.aggregates {
        let mut row: Vec<String> = a.point.iter().map(|&v| cell(v)).collect();
        row.push(a.metric.clone());
        row.push(a.value.to_string());
        row.push(cell(a.stderr));
        row.push(a.n_replicas.to_string());
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Reads back a table written by [`to_csv`].
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Aggregate>), String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
    if header.len() < 4 {
        return Err("header too short".into());
    }
    let k = header.len() - 4;
    let num = |s: &str| -> Result<Option<f64>, String> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|e| format!("bad number '{s}': {e}"))
        }
    };
    let mut out = Vec::new();
    for row in r.records() {
        let row = row.map_err(|e| e.to_string())?;
        let point = (0..k).map(|i| num(&row[i])).collect::<Result<Vec<_>, _>>()?;
        out.push(Aggregate {
            point,
            metric: row[k].to_string(),
            value: num(&row[k + 1])?.ok_or("missing value")?,
            stderr: num(&row[k + 2])?,
            n_replicas: row[k + 3].parse().map_err(|e| format!("bad count: {e}"))?,
        });
    }
    Ok((header[..k].to_vec(), out))
}

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 320.0;
const MARGIN: f64 = 48.0;

/// One panel per curve: the estimates as a solid path with point markers,
/// and the theory law, when present, as a dashed path.
pub fn to_svg(report: &Report) -> String {
    let panels = report.curves.len().max(1);
    let height = PANEL_H * panels as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W}" height="{height}" viewBox="0 0 {PANEL_W} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if report.curves.is_empty() {
        let _ = writeln!(s, r#"<text x="{MARGIN}" y="{MARGIN}">{}: no curves</text>"#, escape(&report.config.experiment));
    }
    for (i, c) in report.curves.iter().enumerate() {
        panel(&mut s, c, PANEL_H * i as f64);
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn panel(s: &mut String, c: &CurveOut, top: f64) {
    let mut xs: Vec<f64> = c.points.iter().map(|p| p.x).collect();
    let mut ys: Vec<f64> = c.points.iter().flat_map(|p| [p.y - p.stderr, p.y + p.stderr]).collect();
    if let Some(t) = &c.theory {
        xs.extend(t.points.iter().map(|p| p[0]));
        ys.extend(t.points.iter().map(|p| p[1]));
    }
    let range = |v: &[f64]| {
        let lo = v.iter().copied().filter(|x| x.is_finite()).fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().filter(|x| x.is_finite()).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        }
    };
    let (x0, x1) = range(&xs);
    let (y0, y1) = range(&ys);
    let (left, right) = (MARGIN, PANEL_W - MARGIN / 2.0);
    let (upper, lower) = (top + MARGIN / 2.0, top + PANEL_H - MARGIN);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let py = |y: f64| lower - (y - y0) / (y1 - y0) * (lower - upper);

    let _ = writeln!(s, r#"<g class="panel">"#);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{lower}" x2="{right}" y2="{lower}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{upper}" x2="{left}" y2="{lower}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{left}" y="{}">{}</text>"#, upper - 6.0, escape(&c.label));
    let _ = writeln!(s, r#"<text x="{right}" y="{}" text-anchor="end">{}</text>"#, lower + 32.0, escape(&c.x_name));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, left, lower + 16.0, fmt_tick(x0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, right, lower + 16.0, fmt_tick(x1));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 4.0, lower, fmt_tick(y0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 4.0, upper + 10.0, fmt_tick(y1));
    let _ = writeln!(
        s,
        r#"<path class="estimate" d="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        path_data(c.points.iter().map(|p| (px(p.x), py(p.y))))
    );
    for p in &c.points {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, px(p.x), py(p.y));
    }
    if let Some(t) = &c.theory {
        let _ = writeln!(
            s,
            r#"<path class="theory" d="{}" fill="none" stroke="firebrick" stroke-dasharray="6 4"/>"#,
            path_data(t.points.iter().map(|p| (px(p[0]), py(p[1]))))
        );
        let _ = writeln!(s, r#"<text x="{right}" y="{}" text-anchor="end" fill="firebrick">{}</text>"#, upper + 10.0, escape(&t.law));
    }
    let _ = writeln!(s, "</g>");
}

fn path_data(pts: impl Iterator<Item = (f64, f64)>) -> String {
    let mut d = String::new();
    for (i, (x, y)) in pts.enumerate() {
        let _ = write!(d, "{}{x:.2},{y:.2} ", if i == 0 { "M" } else { "L" });
    }
    d.trim_end().to_string()
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}
