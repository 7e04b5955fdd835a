//! Screens hypothetical mergers among the top automakers.

use market_concentration::merger::MergerScreen;
use market_concentration::{fixtures, merge_firms, merger_screen};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let market = fixtures::world_automakers();
    for (a, b) in [
        ("Toyota", "Volkswagen"),
        ("Suzuki", "Renault"),
        ("General Motors", "Ford"),
    ] {
        let (_, v) = merge_firms(&market, a, b)?;
        println!(
            "{a:>14} + {b:<10} H0 {:.4} -> H1 {:.4} (dH {:.4}): {:?}",
            v.h0, v.h1, v.delta, v.rule
        );
    }

    println!("\nRule grid, default thresholds:");
    for (h0, h1) in [(0.05, 0.08), (0.12, 0.15), (0.25, 0.252), (0.25, 0.30)] {
        println!(
            "  H0 {h0:.3}, H1 {h1:.3}: {:?}",
            merger_screen(h0, h1)?.rule
        );
    }
    let strict = MergerScreen::with_moderate_delta(0.01)?;
    println!(
        "  H0 0.120, H1 0.150 with dH limit 0.01: {:?}",
        strict.screen(0.12, 0.15)?.rule
    );
    Ok(())
}
