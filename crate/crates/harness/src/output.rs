use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use pta_core::protocol::SimMode;

use crate::error::HarnessError;
use crate::sweep::{SweepResult, SweepRow};

pub const CSV_HEADER: [&str; 9] = [
    "p_step",
    "E",
    "phi",
    "T2_over_T1",
    "mode",
    "P",
    "err",
    "cycles_mean",
    "wall_s",
];

/// Shortest decimal that parses back to `x`: Rust's round-trip digits,
/// in positional or exponent notation, whichever is shorter.
pub fn fmt_float(x: f64) -> String {
    let plain = x.to_string();
    let sci = format!("{x:e}");
    if sci.len() < plain.len() {
        sci
    } else {
        plain
    }
}

/// Writes the sweep as CSV to any writer.
pub fn write_csv<W: io::Write>(res: &SweepResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &res.rows {
        w.write_record([
            fmt_float(r.p_step),
            fmt_float(r.gate_error),
            fmt_float(r.phi),
            fmt_float(r.t2_ratio),
            r.mode.as_str().to_string(),
            fmt_float(r.p),
            fmt_float(r.err),
            fmt_float(r.cycles_mean),
            fmt_float(r.wall_s),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(res: &SweepResult, path: &Path) -> Result<(), HarnessError> {
    let file = fs::File::create(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(res, io::BufWriter::new(file)).map_err(|source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a file written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<SweepResult, HarnessError> {
    let csv_err = |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rd = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(HarnessError::Config(format!(
            "{}: unexpected CSV header {header:?}",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| -> Result<f64, HarnessError> {
            rec[i].parse().map_err(|_| {
                HarnessError::Config(format!("{}: bad number {:?}", path.display(), &rec[i]))
            })
        };
        rows.push(SweepRow {
            p_step: num(0)?,
            gate_error: num(1)?,
            phi: num(2)?,
            t2_ratio: num(3)?,
            mode: rec[4].parse::<SimMode>()?,
            p: num(5)?,
            err: num(6)?,
            cycles_mean: num(7)?,
            wall_s: num(8)?,
        });
    }
    Ok(SweepResult { rows })
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
];

/// Key identifying one plotted curve.
#[derive(Clone, Copy, Debug, PartialEq)]
struct CurveKey {
    gate_error: f64,
    phi: f64,
    t2_ratio: f64,
    mode: SimMode,
}

struct Curve {
    key: CurveKey,
    points: Vec<(f64, f64)>,
}

fn curves(res: &SweepResult) -> Vec<Curve> {
    let mut out: Vec<Curve> = Vec::new();
    for r in &res.rows {
        let key = CurveKey {
            gate_error: r.gate_error,
            phi: r.phi,
            t2_ratio: r.t2_ratio,
            mode: r.mode,
        };
        let idx = match out.iter().position(|c| c.key == key) {
            Some(i) => i,
            None => {
                out.push(Curve {
                    key,
                    points: Vec::new(),
                });
                out.len() - 1
            }
        };
        // log axes: zero or negative values have no position
        if r.p_step > 0.0 && r.p > 0.0 {
            out[idx].points.push((r.p_step, r.p));
        }
    }
    out
}

fn decade_range(values: impl Iterator<Item = f64>, default: (i32, i32)) -> (i32, i32) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return default;
    }
    let (a, b) = (lo.log10().floor() as i32, hi.log10().ceil() as i32);
    if a == b {
        (a, a + 1)
    } else {
        (a, b)
    }
}

/// Renders `P` versus `p_step` on log-log axes as a standalone SVG: one
/// polyline per (gate error, mode), filled markers for exact results, open
/// markers for the twirled models.
pub fn render_svg(res: &SweepResult) -> String {
    let curves = curves(res);
    let all = || curves.iter().flat_map(|c| c.points.iter().copied());
    let (x0, x1) = decade_range(all().map(|p| p.0), (-4, -1));
    let (y0, y1) = decade_range(all().map(|p| p.1), (-4, 0));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x.log10() - x0 as f64) / (x1 - x0) as f64 * plot_w;
    let sy = |y: f64| TOP + plot_h - (y.log10() - y0 as f64) / (y1 - y0) as f64 * plot_h;

    let mut gate_errors: Vec<f64> = Vec::new();
    for c in &curves {
        if !gate_errors.contains(&c.key.gate_error) {
            gate_errors.push(c.key.gate_error);
        }
    }
    let colour = |e: f64| {
        let i = gate_errors.iter().position(|&g| g == e).unwrap_or(0);
        PALETTE[i % PALETTE.len()]
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        "<title>Error-correction failure probability P versus p_step</title>"
    );
    let mut desc = format!("curves={}; points={}", curves.len(), all().count());
    if let Some(r) = res.rows.first() {
        let _ = write!(desc, "; phi={}; T2_over_T1={}", r.phi, r.t2_ratio);
    }
    let _ = writeln!(s, "<desc>{desc}</desc>");
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r##"<rect class="frame" x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#000"/>"##
    );

    let _ = writeln!(s, r#"<g class="axes">"#);
    for d in x0..=x1 {
        let x = sx(10f64.powi(d));
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ccc"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"##,
            TOP,
            TOP + plot_h,
            TOP + plot_h + 18.0
        );
    }
    for d in y0..=y1 {
        let y = sy(10f64.powi(d));
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ccc"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">p_step</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">P</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let _ = writeln!(s, "</g>");

    for c in &curves {
        let col = colour(c.key.gate_error);
        let fill = if c.key.mode == SimMode::Exact {
            col
        } else {
            "none"
        };
        let dash = match c.key.mode {
            SimMode::BoundPta => r#" stroke-dasharray="6 3""#,
            SimMode::MonteCarloPta => r#" stroke-dasharray="2 2""#,
            _ => "",
        };
        let _ = writeln!(
            s,
            r#"<g class="series" data-mode="{}" data-E="{}">"#,
            c.key.mode, c.key.gate_error
        );
        let pts: Vec<String> = c
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="curve" points="{}" fill="none" stroke="{col}"{dash}/>"#,
            pts.join(" ")
        );
        for &(x, y) in &c.points {
            let _ = writeln!(
                s,
                r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="4" fill="{fill}" stroke="{col}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(s, r#"<g class="legend">"#);
    for (i, c) in curves.iter().enumerate() {
        let col = colour(c.key.gate_error);
        let fill = if c.key.mode == SimMode::Exact {
            col
        } else {
            "none"
        };
        let y = TOP + 10.0 + 18.0 * i as f64;
        let x = LEFT + plot_w + 15.0;
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{fill}" stroke="{col}"/><text x="{:.2}" y="{:.2}">E={} {}</text>"#,
            x + 10.0,
            y + 4.0,
            c.key.gate_error,
            c.key.mode
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

pub fn emit_plot(res: &SweepResult, path: &Path) -> Result<(), HarnessError> {
    fs::write(path, render_svg(res)).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_short_and_exact() {
        for (x, want) in [
            (0.001, "1e-3"),
            (0.01, "0.01"),
            (0.0, "0"),
            (1.0, "1"),
            (2.0741186546047174e-12, "2.0741186546047174e-12"),
            (1e-4, "1e-4"),
            (0.1, "0.1"),
            (1e20, "1e20"),
        ] {
            let s = fmt_float(x);
            assert_eq!(s, want);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn decade_ranges() {
        assert_eq!(decade_range([2e-3, 5e-2].into_iter(), (0, 1)), (-3, -1));
        assert_eq!(decade_range(std::iter::empty(), (-4, -1)), (-4, -1));
        assert_eq!(decade_range([1e-2].into_iter(), (0, 1)), (-2, -1));
    }
}
