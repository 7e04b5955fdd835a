//! Yearly indices and per-automaker variability of a licensing panel.

use market_concentration::analysis::panel_summary;
use market_concentration::{fixtures, index_report};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let panel = fixtures::demo_panel();
    println!(
        "{:<6} {:>7} {:>7} {:>7} {:>7}",
        "year", "CR1", "CR3", "HHI", "CCI"
    );
    for period in panel.periods() {
        let r = index_report(&panel.snapshot("panel", period)?)?;
        println!(
            "{period:<6} {:>7.4} {:>7.4} {:>7.4} {:>7.4}",
            r.cr[&1], r.cr[&3], r.hhi, r.cci
        );
    }
    println!("\n{:<8} {:>10} {:>10} {:>5}", "firm", "mean", "std", "CV");
    for s in panel_summary(&panel)? {
        let cv = s
            .cv_percent
            .map_or_else(|| "n/a".into(), |c| format!("{c}%"));
        println!(
            "{:<8} {:>10.0} {:>10.0} {cv:>5}",
            s.automaker, s.summary.mean, s.summary.sample_std
        );
    }
    Ok(())
}
