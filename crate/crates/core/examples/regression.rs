//! Least-squares fit of HHI on CR3 across producing countries.

use market_concentration::analysis::concentration_points;
use market_concentration::fixtures;
use market_concentration::stats::ols_fit;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (points, _) = concentration_points(&fixtures::country_indices());
    let x: Vec<f64> = points.iter().map(|p| p.coords[0]).collect();
    let y: Vec<f64> = points.iter().map(|p| p.coords[1]).collect();
    let fit = ols_fit(&x, &y)?;
    println!(
        "HHI = {:.4} CR3 {:+.4}   r2 = {:.4}, n = {}",
        fit.slope, fit.intercept, fit.r2, fit.n
    );
    println!(
        "\n{:<12} {:>6} {:>6} {:>9}",
        "country", "CR3", "HHI", "residual"
    );
    for p in &points {
        let (cr3, h) = (p.coords[0], p.coords[1]);
        println!(
            "{:<12} {cr3:>6.2} {h:>6.2} {:>+9.4}",
            p.label,
            h - fit.predict(cr3)
        );
    }
    Ok(())
}
