//! Tukey summaries of country CR3 and HHI, flagging outliers.

use market_concentration::analysis::country_column;
use market_concentration::fixtures;
use market_concentration::report::svg;
use market_concentration::stats::{describe, five_number};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let records = fixtures::country_indices();
    for column in ["cr3", "hhi"] {
        let (series, _) = country_column(&records, column).expect("known column");
        let values: Vec<f64> = series.iter().map(|v| v.value).collect();
        let d = describe(&values)?;
        let s = five_number(&series)?;
        println!(
            "{column}: mean {:.3}, std {:.3}, hinges [{:.2}, {:.2}], fences [{:.2}, {:.2}]",
            d.mean, d.sample_std, s.lower_hinge, s.upper_hinge, s.lower_fence, s.upper_fence
        );
        for o in &s.outliers {
            println!("  outlier: {} ({:.2})", o.label, o.value);
        }
        let path = std::env::temp_dir().join(format!("boxplot_{column}.svg"));
        std::fs::write(&path, svg::box_plot(&series, &s, column, column))?;
    }
    Ok(())
}
