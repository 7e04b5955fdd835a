//! Every concentration index for the world's twelve largest automakers.

use market_concentration::report::markdown;
use market_concentration::{fixtures, index_report};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let market = fixtures::world_automakers();
    println!("Top five by production:");
    for firm in market.firms().iter().take(5) {
        println!("  {:<15} {:>6.2}%", firm.firm_id, firm.share * 100.0);
    }
    println!();
    let report = index_report(&market)?;
    print!("{}", markdown::index_report(&report));
    Ok(())
}
