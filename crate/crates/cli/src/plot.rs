//! Minimal log-log line plot as SVG text.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Draws each series against `x`; nonpositive or non-finite points are skipped.
pub fn log_log_svg(x_label: &str, x: &[f64], series: &[(&str, Vec<f64>)]) -> String {
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|(_, ys)| {
            x.iter()
                .zip(ys)
                .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
                .map(|(a, b)| (a.log10(), b.log10()))
                .collect()
        })
        .collect();
    let all = || pts.iter().flatten();
    let (mut x0, mut x1) = bounds(all().map(|p| p.0));
    let (mut y0, mut y1) = bounds(all().map(|p| p.1));
    x0 = x0.floor();
    x1 = x1.ceil().max(x0 + 1.0);
    y0 = y0.floor();
    y1 = y1.ceil().max(y0 + 1.0);
    let sx = |v: f64| MARGIN + (v - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |v: f64| H - MARGIN - (v - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    for d in (x0 as i64)..=(x1 as i64) {
        let px = sx(d as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{px:.1}" y1="{MARGIN}" x2="{px:.1}" y2="{:.1}" stroke="#ddd"/>"##,
            H - MARGIN
        );
        let _ = writeln!(
            s,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">1e{d}</text>"#,
            H - MARGIN + 16.0
        );
    }
    for d in (y0 as i64)..=(y1 as i64) {
        let py = sy(d as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#ddd"/>"##,
            W - MARGIN
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{d}</text>"#,
            MARGIN - 6.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x_label}</text>"#,
        W / 2.0,
        H - 15.0
    );
    for (i, ((name, _), p)) in series.iter().zip(&pts).enumerate() {
        let color = COLORS[i % COLORS.len()];
        if !p.is_empty() {
            let path: Vec<String> = p
                .iter()
                .map(|(a, b)| format!("{:.2},{:.2}", sx(*a), sy(*b)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
            for (a, b) in p {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                    sx(*a),
                    sy(*b)
                );
            }
        }
        let ly = MARGIN + 14.0 + 14.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}" fill="{color}">{name}</text>"#,
            MARGIN + 8.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_positive_points_only() {
        let svg = log_log_svg(
            "Y",
            &[1e-6, 1e-4],
            &[("a", vec![0.5, 0.0]), ("b", vec![2.0, 3.0])],
        );
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn empty_series_still_valid() {
        let svg = log_log_svg("Y", &[], &[("a", vec![])]);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
