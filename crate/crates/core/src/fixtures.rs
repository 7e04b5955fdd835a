//! Datasets bundled with the crate.
//!
//! * `table2_countries.csv` – automakers, production, CR3 and HHI for twelve
//!   producing countries (three without published indices).
//! * `table4_indices.csv` – published CR4, CR8, HHI, Rosenbluth and CCI for
//!   the Brazilian light-vehicle market, 2012-2017.
//! * `demo_shares.csv` – a four-firm toy market.
//! * `world_automakers.csv` – production of the twelve largest automakers.
//! * `demo_panel.csv` – a small synthetic licensing panel.

use crate::io::{
    read_country_indices, read_licensing_panel, read_market_file, read_yearly_indices,
    CountryIndexRecord, DataError, LicensingPanel, YearlyIndexRow,
};
use crate::market::{MarketSnapshot, RenormalizePolicy};

pub const TABLE2_COUNTRIES: &str = include_str!("../data/table2_countries.csv");
pub const TABLE4_INDICES: &str = include_str!("../data/table4_indices.csv");
pub const DEMO_SHARES: &str = include_str!("../data/demo_shares.csv");
pub const WORLD_AUTOMAKERS: &str = include_str!("../data/world_automakers.csv");
pub const DEMO_PANEL: &str = include_str!("../data/demo_panel.csv");

pub fn country_indices() -> Vec<CountryIndexRecord> {
    read_country_indices(TABLE2_COUNTRIES.as_bytes()).expect("bundled fixture parses")
}

pub fn yearly_indices() -> Vec<YearlyIndexRow> {
    read_yearly_indices(TABLE4_INDICES.as_bytes()).expect("bundled fixture parses")
}

pub fn demo_market() -> MarketSnapshot {
    read_market_file(DEMO_SHARES, "demo", RenormalizePolicy::Strict)
        .expect("bundled fixture parses")
}

pub fn world_automakers() -> MarketSnapshot {
    read_market_file(WORLD_AUTOMAKERS, "world", RenormalizePolicy::Strict)
        .expect("bundled fixture parses")
}

pub fn demo_panel() -> LicensingPanel {
    read_licensing_panel(DEMO_PANEL.as_bytes()).expect("bundled fixture parses")
}

/// Writes every bundled fixture into `dir`, e.g. to seed a report bundle.
pub fn write_bundle(dir: &std::path::Path) -> Result<(), DataError> {
    let files = [
        ("table2_countries.csv", TABLE2_COUNTRIES),
        ("table4_indices.csv", TABLE4_INDICES),
        ("demo_shares.csv", DEMO_SHARES),
    ];
    for (name, text) in files {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|source| DataError::Io { path, source })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        let countries = country_indices();
        assert_eq!(countries.len(), 12);
        assert_eq!(countries.iter().filter(|r| r.is_complete()).count(), 9);
        let missing: Vec<_> = countries
            .iter()
            .filter(|r| !r.is_complete())
            .map(|r| r.country.as_str())
            .collect();
        assert_eq!(missing, ["United Kingdom", "EU (Europe Union)", "Mexico"]);
        assert_eq!(yearly_indices().len(), 6);
        assert_eq!(demo_market().n(), 4);
        assert_eq!(world_automakers().n(), 12);
        assert_eq!(demo_panel().periods(), ["2012", "2013", "2014"]);
    }
}
