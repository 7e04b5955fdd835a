//! Markdown rendering of reports.

use std::fmt::Write;

use crate::analysis::YearlySummary;
use crate::clustering::ClusterReport;
use crate::indices::IndexReport;
use crate::io::YearlyIndexRow;
use crate::merger::MergerVerdict;
use crate::stats::{DescriptiveSummary, FiveNumberSummary, RegressionFit};

fn f5(x: f64) -> String {
    format!("{x:.5}")
}

pub fn index_report(r: &IndexReport) -> String {
    let mut out = String::new();
    let period = if r.period.is_empty() {
        String::new()
    } else {
        format!(" ({})", r.period)
    };
    let _ = writeln!(out, "### Market `{}`{period}\n", r.market_id);
    let _ = writeln!(out, "| index | value |\n|---|---|");
    let _ = writeln!(out, "| firms | {} |", r.n);
    for (k, v) in &r.cr {
        let _ = writeln!(out, "| CR{k} | {} |", f5(*v));
    }
    let rows = [
        ("HHI", f5(r.hhi)),
        ("HHI (points)", format!("{:.0}", r.hhi_points)),
        ("DI", f5(r.di)),
        ("Rosenbluth (rank-weighted)", f5(r.rosenbluth_standard)),
        (
            "Rosenbluth (1/(2 CR_n - 1))",
            f5(r.rosenbluth_paper_literal),
        ),
        ("CCI", f5(r.cci)),
        ("top 20% share", f5(r.pareto_top20)),
        ("HHI band", r.hhi_band.to_string()),
        ("CR4 band", r.cr4_band.to_string()),
    ];
    for (name, value) in rows {
        let _ = writeln!(out, "| {name} | {value} |");
    }
    notes(&mut out, &r.notes);
    out
}

fn notes(out: &mut String, notes: &[String]) {
    if notes.is_empty() {
        return;
    }
    out.push('\n');
    for n in notes {
        let _ = writeln!(out, "> note: {n}");
    }
}

pub fn verdict(v: &MergerVerdict, merged: &str) -> String {
    format!(
        "### Merger screen: {merged}\n\n| H0 | H1 | dH | rule |\n|---|---|---|---|\n| {} | {} | {} | {:?} |\n",
        f5(v.h0),
        f5(v.h1),
        f5(v.delta),
        v.rule
    )
}

pub fn clusters(r: &ClusterReport, dropped: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "### k-means, k = {}\n", r.k);
    let _ = writeln!(
        out,
        "| group | centroid | members | SSE |\n|---|---|---|---|"
    );
    for g in &r.groups {
        let c: Vec<String> = g.centroid.iter().map(|x| format!("{x:.3}")).collect();
        let _ = writeln!(
            out,
            "| {} | ({}) | {} | {} |",
            g.index + 1,
            c.join(", "),
            g.members.join(", "),
            f5(g.sse)
        );
    }
    let _ = writeln!(out, "\nTotal within-cluster SSE: {}", f5(r.within_sse));
    if !dropped.is_empty() {
        let _ = writeln!(out, "\nDropped (missing values): {}", dropped.join(", "));
    }
    out
}

pub fn summaries(
    column: &str,
    describe: Option<&DescriptiveSummary>,
    five: &FiveNumberSummary,
    dropped: &[String],
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "### `{column}`\n");
    if let Some(d) = describe {
        let cv = d
            .cv_percent()
            .map_or_else(|| "n/a".to_string(), |c| format!("{c}%"));
        let _ = writeln!(
            out,
            "n = {}, mean = {}, std = {}, CV = {cv}\n",
            d.n,
            f5(d.mean),
            f5(d.sample_std)
        );
    }
    let _ = writeln!(
        out,
        "| min | lower hinge | median | upper hinge | max | IQR | lower fence | upper fence |\n|---|---|---|---|---|---|---|---|"
    );
    let _ = writeln!(
        out,
        "| {} | {} | {} | {} | {} | {} | {} | {} |",
        f5(five.min),
        f5(five.lower_hinge),
        f5(five.median),
        f5(five.upper_hinge),
        f5(five.max),
        f5(five.iqr),
        f5(five.lower_fence),
        f5(five.upper_fence)
    );
    if five.outliers.is_empty() {
        out.push_str("\nNo outliers.\n");
    } else {
        let list: Vec<String> = five
            .outliers
            .iter()
            .map(|o| format!("{} ({})", o.label, f5(o.value)))
            .collect();
        let _ = writeln!(out, "\nOutliers: {}", list.join(", "));
    }
    if !dropped.is_empty() {
        let _ = writeln!(out, "\nDropped (missing values): {}", dropped.join(", "));
    }
    out
}

pub fn regression(fit: &RegressionFit, x: &str, y: &str) -> String {
    let sign = if fit.intercept < 0.0 { '-' } else { '+' };
    format!(
        "### Regression of `{y}` on `{x}`\n\n{y} = {:.4} {x} {sign} {:.4}  (r² = {:.4}, n = {})\n",
        fit.slope,
        fit.intercept.abs(),
        fit.r2,
        fit.n
    )
}

/// Yearly index table with bands, medians line and ordering check.
pub fn yearly(rows: &[YearlyIndexRow], summary: &YearlySummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "| year | CR4 | CR8 | HHI | B | CCI | HHI band | CR4 band |\n|---|---|---|---|---|---|---|---|"
    );
    for (r, b) in rows.iter().zip(&summary.bands) {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {:.4} | {} | {} | {} | {} |",
            r.year,
            f5(r.cr4),
            f5(r.cr8),
            r.hhi,
            f5(r.b),
            f5(r.cci),
            b.hhi_band,
            b.cr4_band
        );
    }
    let m = &summary.medians;
    let _ = writeln!(
        out,
        "\nMedians: CR4 ≈ {:.5}, HHI ≈ {:.5}, CCI ≈ {:.5}",
        m.cr4, m.hhi, m.cci
    );
    if summary.ordering_violations.is_empty() {
        out.push_str("\nHHI ≤ CCI ≤ CR4 holds in every year.\n");
    } else {
        out.push_str("\n**Validation failure:** HHI ≤ CCI ≤ CR4 is violated in:\n\n");
        for v in &summary.ordering_violations {
            let _ = writeln!(
                out,
                "- {}: HHI {}, CCI {}, CR4 {}",
                v.year,
                f5(v.hhi),
                f5(v.cci),
                f5(v.cr4)
            );
        }
    }
    out
}
