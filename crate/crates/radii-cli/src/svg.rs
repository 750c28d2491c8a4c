//! A small hand-written SVG plot of `z(0)` against `d`.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// One branch: `(d, z(0), ε_r)` at each junction point.
pub type Branch = Vec<(f64, f64, f64)>;

/// Tick positions with labels printed to the precision of the step.
fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<(f64, String)> {
    let span = hi - lo;
    if !(span > 0.0) {
        return vec![(lo, format!("{lo}"))];
    }
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64)
        .unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last)
        .map(|k| {
            let t = k as f64 * step;
            (t, format!("{t:.decimals$}"))
        })
        .collect()
}

/// Renders the branches with their `z(0)` error bands where they are at
/// least half a pixel wide.  `comment` goes into an XML comment, with any
/// `--` split apart.
pub fn render(branches: &[Branch], comment: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, "<!-- {} -->", comment.replace("--", "- -"));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let pts = branches.iter().flatten();
    let (mut dlo, mut dhi, mut zlo, mut zhi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(d, z, e) in pts {
        dlo = dlo.min(d);
        dhi = dhi.max(d);
        zlo = zlo.min(z - e);
        zhi = zhi.max(z + e);
    }
    if !dlo.is_finite() {
        s.push_str("</svg>\n");
        return s;
    }
    let pad = |lo: f64, hi: f64| {
        let w = if hi > lo { 0.05 * (hi - lo) } else { 0.05 * lo.abs().max(1e-3) };
        (lo - w, hi + w)
    };
    let (dlo, dhi) = pad(dlo, dhi);
    let (zlo, zhi) = pad(zlo, zhi);
    let px = |d: f64| MARGIN + (d - dlo) / (dhi - dlo) * (WIDTH - 2.0 * MARGIN);
    let py = |z: f64| HEIGHT - MARGIN - (z - zlo) / (zhi - zlo) * (HEIGHT - 2.0 * MARGIN);

    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#
    );
    for (t, label) in nice_ticks(dlo, dhi, 6) {
        let x = px(t);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" font-size="12" text-anchor="middle">{label}</text>"#,
            y0 + 20.0
        );
    }
    for (t, label) in nice_ticks(zlo, zhi, 6) {
        let y = py(t);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" font-size="12" text-anchor="end">{label}</text>"#,
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">d</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" font-size="14" text-anchor="middle" transform="rotate(-90 18 {})">z(0)</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    for (i, b) in branches.iter().enumerate() {
        if b.is_empty() {
            continue;
        }
        let color = COLORS[i % COLORS.len()];
        let band_px = b.iter().map(|&(_, z, e)| py(z - e) - py(z + e)).fold(0.0, f64::max);
        if band_px >= 0.5 {
            let mut d = String::new();
            for (k, &(dd, z, e)) in b.iter().enumerate() {
                let _ = write!(d, "{}{:.2},{:.2} ", if k == 0 { "M" } else { "L" }, px(dd), py(z + e));
            }
            for &(dd, z, e) in b.iter().rev() {
                let _ = write!(d, "L{:.2},{:.2} ", px(dd), py(z - e));
            }
            let _ = writeln!(s, r#"<path d="{}Z" fill="{color}" fill-opacity="0.25" stroke="none"/>"#, d);
        }
        let points: Vec<String> = b.iter().map(|&(d, z, _)| format!("{:.2},{:.2}", px(d), py(z))).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}
