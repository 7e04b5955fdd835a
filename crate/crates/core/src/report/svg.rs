//! Self-contained static SVG charts.

use std::fmt::Write;

use crate::clustering::{ClusteringResult, FeaturePoint};
use crate::stats::{FiveNumberSummary, LabeledValue};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Linear map from a data range onto a pixel range, padded by 5%.
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = (hi - lo) * 0.05;
        Self {
            lo: lo - pad,
            hi: hi + pad,
            px_lo,
            px_hi,
        }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=4).map(|i| self.lo + (self.hi - self.lo) * i as f64 / 4.0)
    }
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn frame(out: &mut String, x: Option<&Axis>, y: &Axis, x_label: &str, y_label: &str) {
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN / 2.0, MARGIN / 1.5, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r##"<polyline points="{left},{top} {left},{bottom} {right},{bottom}" fill="none" stroke="#333"/>"##
    );
    for t in y.ticks() {
        let py = y.map(t);
        let _ = writeln!(
            out,
            r##"<line x1="{}" y1="{py:.1}" x2="{left}" y2="{py:.1}" stroke="#333"/><text x="{}" y="{:.1}" text-anchor="end">{t:.3}</text>"##,
            left - 4.0,
            left - 6.0,
            py + 4.0
        );
    }
    if let Some(x) = x {
        for t in x.ticks() {
            let px = x.map(t);
            let _ = writeln!(
                out,
                r##"<line x1="{px:.1}" y1="{bottom}" x2="{px:.1}" y2="{}" stroke="#333"/><text x="{px:.1}" y="{}" text-anchor="middle">{t:.3}</text>"##,
                bottom + 4.0,
                bottom + 18.0
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        HEIGHT - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        escape(y_label)
    );
}

/// Scatter of two-dimensional points coloured by cluster, with a cross at
/// each centroid. Only the first two coordinates are drawn.
pub fn cluster_scatter(
    points: &[FeaturePoint],
    result: &ClusteringResult,
    title: &str,
    x_label: &str,
    y_label: &str,
) -> String {
    let coord = |p: &FeaturePoint, i: usize| p.coords.get(i).copied().unwrap_or(0.0);
    let xs = points
        .iter()
        .map(|p| coord(p, 0))
        .chain(result.centroids.iter().map(|c| c[0]));
    let ys = points.iter().map(|p| coord(p, 1)).chain(
        result
            .centroids
            .iter()
            .map(|c| c.get(1).copied().unwrap_or(0.0)),
    );
    let x = Axis::new(xs, MARGIN, WIDTH - MARGIN / 2.0);
    let y = Axis::new(ys, HEIGHT - MARGIN, MARGIN / 1.5);

    let mut out = String::new();
    open(&mut out, title);
    frame(&mut out, Some(&x), &y, x_label, y_label);
    for p in points {
        let cluster = result.assignment.get(&p.label).copied().unwrap_or(0);
        let colour = PALETTE[cluster % PALETTE.len()];
        let (px, py) = (x.map(coord(p, 0)), y.map(coord(p, 1)));
        let _ = writeln!(
            out,
            r#"<circle cx="{px:.1}" cy="{py:.1}" r="5" fill="{colour}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            px + 7.0,
            py - 7.0,
            escape(&p.label)
        );
    }
    for (i, c) in result.centroids.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let (px, py) = (x.map(c[0]), y.map(c.get(1).copied().unwrap_or(0.0)));
        let _ = writeln!(
            out,
            r#"<path d="M{:.1},{:.1} L{:.1},{:.1} M{:.1},{:.1} L{:.1},{:.1}" stroke="{colour}" stroke-width="3"/>"#,
            px - 8.0,
            py - 8.0,
            px + 8.0,
            py + 8.0,
            px - 8.0,
            py + 8.0,
            px + 8.0,
            py - 8.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Vertical Tukey box plot with whiskers to the last points inside the
/// fences, dashed fence lines and labelled outliers.
pub fn box_plot(
    series: &[LabeledValue],
    summary: &FiveNumberSummary,
    title: &str,
    y_label: &str,
) -> String {
    let values: Vec<f64> = series.iter().map(|p| p.value).collect();
    let y = Axis::new(
        values
            .iter()
            .copied()
            .chain([summary.lower_fence, summary.upper_fence]),
        HEIGHT - MARGIN,
        MARGIN / 1.5,
    );
    let (whisker_lo, whisker_hi) = summary.whiskers(&values);
    let cx = WIDTH / 2.0;
    let half = 60.0;

    let mut out = String::new();
    open(&mut out, title);
    frame(&mut out, None, &y, "", y_label);
    let (top, bottom) = (y.map(summary.upper_hinge), y.map(summary.lower_hinge));
    let _ = writeln!(
        out,
        r##"<rect x="{:.1}" y="{top:.1}" width="{}" height="{:.1}" fill="#cfe2f3" stroke="#1f4e79"/>"##,
        cx - half,
        2.0 * half,
        bottom - top
    );
    let _ = writeln!(
        out,
        r##"<line x1="{:.1}" y1="{m:.1}" x2="{:.1}" y2="{m:.1}" stroke="#1f4e79" stroke-width="3"/>"##,
        cx - half,
        cx + half,
        m = y.map(summary.median)
    );
    for (from, to) in [
        (summary.upper_hinge, whisker_hi),
        (summary.lower_hinge, whisker_lo),
    ] {
        if !to.is_finite() {
            continue;
        }
        let (a, b) = (y.map(from), y.map(to));
        let _ = writeln!(
            out,
            r##"<line x1="{cx}" y1="{a:.1}" x2="{cx}" y2="{b:.1}" stroke="#1f4e79"/><line x1="{:.1}" y1="{b:.1}" x2="{:.1}" y2="{b:.1}" stroke="#1f4e79"/>"##,
            cx - half / 2.0,
            cx + half / 2.0
        );
    }
    for fence in [summary.lower_fence, summary.upper_fence] {
        let f = y.map(fence);
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{f:.1}" x2="{:.1}" y2="{f:.1}" stroke="#999" stroke-dasharray="4 3"/><text x="{:.1}" y="{:.1}" fill="#666">fence {fence:.3}</text>"##,
            cx - 1.6 * half,
            cx + 1.6 * half,
            cx + 1.7 * half,
            f + 4.0
        );
    }
    for o in &summary.outliers {
        let py = y.map(o.value);
        let _ = writeln!(
            out,
            r##"<circle cx="{cx}" cy="{py:.1}" r="4" fill="none" stroke="#d62728"/><text x="{:.1}" y="{:.1}" fill="#d62728">{} ({:.3})</text>"##,
            cx + 8.0,
            py + 4.0,
            escape(&o.label),
            o.value
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{kmeans, KMeansConfig};
    use crate::stats::five_number;

    #[test]
    fn scatter_contains_points_and_centroids() {
        let points = vec![
            FeaturePoint::new("A&B", vec![0.0, 0.0]),
            FeaturePoint::new("C", vec![1.0, 1.0]),
            FeaturePoint::new("D", vec![1.1, 1.0]),
        ];
        let r = kmeans(&points, &KMeansConfig::new(2)).unwrap();
        let svg = cluster_scatter(&points, &r, "t", "x", "y");
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.contains("A&amp;B"));
    }

    #[test]
    fn box_plot_labels_outliers() {
        let series: Vec<LabeledValue> = [0.0, 0.0, 0.0, 0.0, 100.0]
            .iter()
            .enumerate()
            .map(|(i, v)| LabeledValue::new(format!("p{i}"), *v))
            .collect();
        let s = five_number(&series).unwrap();
        let svg = box_plot(&series, &s, "t", "v");
        assert!(svg.contains("p4 (100.000)"));
    }
}
