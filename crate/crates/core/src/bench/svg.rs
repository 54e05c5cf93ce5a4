//! Minimal SVG rendering of scatter plots and histograms.

use std::fmt::Write as _;

const W: f64 = 480.0;
const H: f64 = 360.0;
const M: f64 = 48.0;

fn frame(title: &str, xlab: &str, ylab: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle" font-size="13">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(s, r#"<line x1="{M}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, H - M, W - M / 2.0, H - M);
    let _ = writeln!(s, r#"<line x1="{M}" y1="{}" x2="{M}" y2="{}" stroke="black"/>"#, H - M, M / 2.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(xlab));
    let _ = writeln!(s, r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#, H / 2.0, H / 2.0, escape(ylab));
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let lo = lo.min(0.0);
    if hi > lo {
        (lo, hi)
    } else {
        (lo, lo + 1.0)
    }
}

fn scale(v: f64, (lo, hi): (f64, f64), a: f64, b: f64) -> f64 {
    a + (v - lo) / (hi - lo) * (b - a)
}

/// Scatter plot; labelled points are drawn filled with their label.
pub fn scatter(title: &str, xlab: &str, ylab: &str, points: &[(f64, f64, Option<String>)]) -> String {
    let mut s = frame(title, xlab, ylab);
    let xr = range(points.iter().map(|p| p.0));
    let yr = range(points.iter().map(|p| p.1));
    for (x, y, label) in points {
        let px = scale(*x, xr, M, W - M / 2.0);
        let py = scale(*y, yr, H - M, M / 2.0);
        let fill = if label.is_some() { "black" } else { "none" };
        let _ = writeln!(s, r#"<circle cx="{px:.1}" cy="{py:.1}" r="3" stroke="black" fill="{fill}"/>"#);
        if let Some(l) = label {
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, px + 4.0, py - 4.0, escape(l));
        }
    }
    let _ = writeln!(s, r#"<text x="{M}" y="{}" text-anchor="middle">{:.3}</text>"#, H - M + 14.0, xr.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{:.3}</text>"#, W - M / 2.0, H - M + 14.0, xr.1);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#, M - 4.0, M / 2.0 + 4.0, yr.1);
    s.push_str("</svg>\n");
    s
}

/// Histogram of `values` with vertical markers; solid markers are labelled.
pub fn histogram(title: &str, xlab: &str, values: &[f64], bins: usize, markers: &[(f64, bool, String)]) -> String {
    let mut s = frame(title, xlab, "count");
    let xr = range(values.iter().copied().chain(markers.iter().map(|m| m.0)));
    let bins = bins.max(1);
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = (((v - xr.0) / (xr.1 - xr.0)) * bins as f64).floor() as isize;
        counts[b.clamp(0, bins as isize - 1) as usize] += 1;
    }
    let top = *counts.iter().max().unwrap_or(&1).max(&1) as f64;
    let bw = (W - 1.5 * M) / bins as f64;
    for (i, c) in counts.iter().enumerate() {
        let h = *c as f64 / top * (H - 1.5 * M);
        let _ = writeln!(
            s,
            r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{h:.1}" fill="lightgray" stroke="gray"/>"#,
            M + i as f64 * bw,
            H - M - h,
            bw
        );
    }
    for (v, solid, label) in markers {
        let px = scale(*v, xr, M, W - M / 2.0);
        let dash = if *solid { "" } else { r#" stroke-dasharray="4 3""# };
        let _ = writeln!(s, r#"<line x1="{px:.1}" y1="{}" x2="{px:.1}" y2="{}" stroke="black"{dash}/>"#, H - M, M / 2.0);
        if *solid {
            let _ = writeln!(s, r#"<text x="{:.1}" y="{}">{}</text>"#, px + 2.0, M / 2.0 + 10.0, escape(label));
        }
    }
    s.push_str("</svg>\n");
    s
}
