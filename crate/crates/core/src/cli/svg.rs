//! Minimal deterministic SVG plots: a log-x line chart and a heat map.

use std::fmt::Write as _;

use super::output::fmt_num;
use crate::phasegrid::PhaseDiagram;
use crate::thresholds::PhasePoint;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 48.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn open(out: &mut String, command: &str, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, "<desc>{}</desc>", escape(command));
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0, x1, y1) = (MARGIN_L, HEIGHT - MARGIN_B, WIDTH - MARGIN_R, MARGIN_T);
    let _ = writeln!(
        out,
        r#"<path d="M{} {}H{}M{} {}V{}" stroke="black" fill="none"/>"#,
        px(x0),
        px(y0),
        px(x1),
        px(x0),
        px(y0),
        px(y1)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#,
        px((x0 + x1) / 2.0),
        px(HEIGHT - 10.0),
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {})">{}</text>"#,
        px((y0 + y1) / 2.0),
        px((y0 + y1) / 2.0),
        escape(y_label)
    );
}

/// Line chart of several `rho(delta)` series on a log-scaled delta axis.
pub fn curve_plot(series: &[(String, Vec<PhasePoint>)], command: &str) -> String {
    let mut out = String::new();
    open(&mut out, command, "strong threshold curves");
    axes(&mut out, "delta (log scale)", "rho");
    let pts = series.iter().flat_map(|(_, p)| p.iter());
    let (mut dmin, mut dmax, mut rmax) = (f64::INFINITY, 0.0f64, 0.0f64);
    for p in pts {
        dmin = dmin.min(p.delta);
        dmax = dmax.max(p.delta);
        rmax = rmax.max(p.rho);
    }
    if !dmin.is_finite() || dmax <= dmin {
        dmin = 1e-3;
        dmax = 1.0;
    }
    let (lmin, lmax) = (dmin.log10().floor(), dmax.log10().ceil().max(dmin.log10().floor() + 1.0));
    let rmax = if rmax > 0.0 { (rmax * 10.0).ceil() / 10.0 } else { 0.5 };
    let sx = |d: f64| MARGIN_L + (d.log10() - lmin) / (lmax - lmin) * (WIDTH - MARGIN_L - MARGIN_R);
    let sy = |r: f64| HEIGHT - MARGIN_B - r / rmax * (HEIGHT - MARGIN_T - MARGIN_B);
    for e in lmin as i32..=lmax as i32 {
        let x = sx(10f64.powi(e));
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="11">1e{e}</text>"#,
            px(x),
            px(HEIGHT - MARGIN_B + 16.0)
        );
    }
    for i in 0..=5 {
        let r = rmax * i as f64 / 5.0;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end" font-size="11">{}</text>"#,
            px(MARGIN_L - 6.0),
            px(sy(r) + 4.0),
            fmt_num((r * 1e6).round() / 1e6)
        );
    }
    for (i, (label, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut d = String::new();
        for (j, p) in points.iter().enumerate() {
            let _ = write!(d, "{}{} {}", if j == 0 { "M" } else { "L" }, px(sx(p.delta)), px(sy(p.rho)));
        }
        let _ = writeln!(out, r#"<path d="{d}" stroke="{color}" stroke-width="1.6" fill="none"/>"#);
        let ly = MARGIN_T + 16.0 * (i as f64 + 1.0);
        let lx = WIDTH - MARGIN_R + 12.0;
        let _ = writeln!(
            out,
            r#"<path d="M{} {}h18" stroke="{color}" stroke-width="2"/><text x="{}" y="{}" font-size="11">{}</text>"#,
            px(lx),
            px(ly),
            px(lx + 24.0),
            px(ly + 4.0),
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Success-fraction heat map of a phase diagram with an optional theory
/// overlay on linear axes.
pub fn heat_map(diagram: &PhaseDiagram, theory: &[PhasePoint], command: &str) -> String {
    let mut out = String::new();
    open(&mut out, command, "empirical success fraction");
    let spec = &diagram.spec;
    let (nd, nr) = (spec.deltas.len(), spec.rhos.len());
    let w = (WIDTH - MARGIN_L - MARGIN_R) / nd as f64;
    let h = (HEIGHT - MARGIN_T - MARGIN_B) / nr as f64;
    for c in &diagram.cells {
        let frac = if c.trials == 0 { 0.0 } else { c.successes as f64 / c.trials as f64 };
        let shade = (255.0 * (1.0 - frac)).round() as u8;
        let x = MARGIN_L + c.delta_index as f64 * w;
        let y = HEIGHT - MARGIN_B - (c.rho_index + 1) as f64 * h;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="rgb({shade},{shade},255)"/>"#,
            px(x),
            px(y),
            px(w),
            px(h)
        );
    }
    axes(&mut out, "delta", "rho");
    let d_of = |d: f64| {
        // cell centers sit at their grid values; interpolate between them
        let idx = spec.deltas.partition_point(|&v| v < d);
        let pos = if idx == 0 {
            0.0
        } else if idx >= nd {
            (nd - 1) as f64
        } else {
            let (a, b) = (spec.deltas[idx - 1], spec.deltas[idx]);
            (idx - 1) as f64 + (d - a) / (b - a)
        };
        MARGIN_L + (pos + 0.5) * w
    };
    let r_of = |r: f64| {
        let idx = spec.rhos.partition_point(|&v| v < r);
        let pos = if idx == 0 {
            0.0
        } else if idx >= nr {
            (nr - 1) as f64
        } else {
            let (a, b) = (spec.rhos[idx - 1], spec.rhos[idx]);
            (idx - 1) as f64 + (r - a) / (b - a)
        };
        HEIGHT - MARGIN_B - (pos + 0.5) * h
    };
    for (i, d) in spec.deltas.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="10">{}</text>"#,
            px(MARGIN_L + (i as f64 + 0.5) * w),
            px(HEIGHT - MARGIN_B + 14.0),
            fmt_num((d * 1e3).round() / 1e3)
        );
    }
    for (i, r) in spec.rhos.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{}</text>"#,
            px(MARGIN_L - 4.0),
            px(HEIGHT - MARGIN_B - (i as f64 + 0.5) * h + 3.0),
            fmt_num((r * 1e3).round() / 1e3)
        );
    }
    let inside: Vec<&PhasePoint> = theory
        .iter()
        .filter(|p| p.delta >= spec.deltas[0] && p.delta <= spec.deltas[nd - 1])
        .collect();
    if inside.len() > 1 {
        let mut d = String::new();
        for (j, p) in inside.iter().enumerate() {
            let _ = write!(d, "{}{} {}", if j == 0 { "M" } else { "L" }, px(d_of(p.delta)), px(r_of(p.rho)));
        }
        let _ = writeln!(out, r#"<path d="{d}" stroke="{}" stroke-width="2" fill="none"/>"#, PALETTE[1]);
        let lx = WIDTH - MARGIN_R + 12.0;
        let _ = writeln!(
            out,
            r#"<path d="M{} {}h18" stroke="{}" stroke-width="2"/><text x="{}" y="{}" font-size="11">theory</text>"#,
            px(lx),
            px(MARGIN_T + 16.0),
            PALETTE[1],
            px(lx + 24.0),
            px(MARGIN_T + 20.0)
        );
    }
    out.push_str("</svg>\n");
    out
}
