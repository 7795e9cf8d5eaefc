//! Standalone SVG 1.1 drawings of a curve and inscribed quadrilaterals.

use std::fmt::Write as _;

use peg_core::{Complex64, Curve};

pub const CURVE_SAMPLES: usize = 512;

const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const LABELS: [&str; 4] = ["A", "B", "C", "D"];

/// Reads `a b c d residual_norm` lines; blank lines are skipped.
pub fn parse_inscription_lines(text: &str) -> Result<Vec<[f64; 4]>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| format!("line {}: bad number {t:?}", i + 1)))
            .collect::<Result<_, _>>()?;
        if nums.len() != 5 {
            return Err(format!("line {}: expected \"a b c d residual_norm\", got {} fields", i + 1, nums.len()));
        }
        out.push([nums[0], nums[1], nums[2], nums[3]]);
    }
    Ok(out)
}

/// SVG y runs downwards.
fn xy(p: Complex64) -> (f64, f64) {
    (p.re, -p.im)
}

pub fn render_svg(curve: &Curve, inscriptions: &[[f64; 4]]) -> String {
    let pts: Vec<Complex64> = curve.samples(CURVE_SAMPLES).into_iter().map(|s| s.point).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &pts {
        let (x, y) = xy(*p);
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let margin = 0.08 * span;
    let (vx, vy, vw, vh) = (x0 - margin, y0 - margin, x1 - x0 + 2.0 * margin, y1 - y0 + 2.0 * margin);
    let stroke = 0.004 * span;
    let font = 0.04 * span;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{vx:.6} {vy:.6} {vw:.6} {vh:.6}\" width=\"800\" height=\"{:.0}\">",
        800.0 * vh / vw
    )
    .unwrap();
    s.push_str("<style>\n");
    writeln!(s, ".curve {{ fill: none; stroke: #222222; stroke-width: {stroke:.6}; }}").unwrap();
    writeln!(s, ".quad {{ fill: none; stroke-width: {stroke:.6}; }}").unwrap();
    writeln!(s, ".diagonal {{ stroke-width: {:.6}; stroke-dasharray: {:.6}; }}", 0.5 * stroke, 3.0 * stroke).unwrap();
    writeln!(s, "text {{ font-family: sans-serif; font-size: {font:.6}px; }}").unwrap();
    for i in 0..inscriptions.len() {
        let color = PALETTE[i % PALETTE.len()];
        writeln!(s, ".quad-{i} {{ stroke: {color}; fill: {color}; }}").unwrap();
    }
    s.push_str("</style>\n");

    s.push_str("<path class=\"curve\" d=\"");
    for (i, p) in pts.iter().enumerate() {
        let (x, y) = xy(*p);
        write!(s, "{}{x:.6} {y:.6} ", if i == 0 { "M" } else { "L" }).unwrap();
    }
    s.push_str("Z\"/>\n");

    for (i, params) in inscriptions.iter().enumerate() {
        let v = params.map(|t| xy(curve.eval(t)));
        writeln!(s, "<g class=\"inscription quad-{i}\">").unwrap();
        let poly: Vec<String> = v.iter().map(|(x, y)| format!("{x:.6},{y:.6}")).collect();
        writeln!(s, "<polygon class=\"quad\" style=\"fill: none\" points=\"{}\"/>", poly.join(" ")).unwrap();
        for (p, q) in [(0, 2), (1, 3)] {
            writeln!(
                s,
                "<line class=\"diagonal\" x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\"/>",
                v[p].0, v[p].1, v[q].0, v[q].1
            )
            .unwrap();
        }
        for (label, (x, y)) in LABELS.iter().zip(v) {
            writeln!(s, "<text x=\"{:.6}\" y=\"{:.6}\" stroke=\"none\">{label}</text>", x + 0.3 * font, y - 0.3 * font).unwrap();
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}
