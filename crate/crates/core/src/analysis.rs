//! Dataset-level analyses combining ingestion, indices and statistics.

use serde::{Deserialize, Serialize};

use crate::bands::{classify_cr4, classify_hhi, BandError, ConcentrationBand};
use crate::clustering::FeaturePoint;
use crate::io::{CountryIndexRecord, LicensingPanel, YearlyIndexRow};
use crate::stats::{column_median, describe, DescriptiveSummary, LabeledValue, StatsError};

/// Labelled values of one country column plus the countries dropped for
/// missing data. Returns `None` for an unknown column name.
pub fn country_column(
    records: &[CountryIndexRecord],
    column: &str,
) -> Option<(Vec<LabeledValue>, Vec<String>)> {
    let mut values = Vec::new();
    let mut dropped = Vec::new();
    for r in records {
        match r.column(column)? {
            Some(v) => values.push(LabeledValue::new(r.country.clone(), v)),
            None => dropped.push(r.country.clone()),
        }
    }
    Some((values, dropped))
}

/// Paired `(x, y)` columns over countries with both values present.
pub fn country_pairs(
    records: &[CountryIndexRecord],
    x_column: &str,
    y_column: &str,
) -> Option<(Vec<FeaturePoint>, Vec<String>)> {
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    for r in records {
        match (r.column(x_column)?, r.column(y_column)?) {
            (Some(x), Some(y)) => points.push(FeaturePoint::new(r.country.clone(), vec![x, y])),
            _ => dropped.push(r.country.clone()),
        }
    }
    Some((points, dropped))
}

/// `(CR3, HHI)` points of the complete country records.
pub fn concentration_points(records: &[CountryIndexRecord]) -> (Vec<FeaturePoint>, Vec<String>) {
    country_pairs(records, "cr3", "hhi").expect("known columns")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearBands {
    pub year: String,
    pub hhi_points: f64,
    pub hhi_band: ConcentrationBand,
    pub cr4_percent: f64,
    pub cr4_band: ConcentrationBand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingViolation {
    pub year: String,
    pub hhi: f64,
    pub cci: f64,
    pub cr4: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearlyMedians {
    pub cr4: f64,
    pub cr8: f64,
    pub hhi: f64,
    pub cci: f64,
}

/// Medians, bands and `HHI <= CCI <= CR4` checks over published yearly indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearlySummary {
    pub years: usize,
    pub medians: YearlyMedians,
    pub bands: Vec<YearBands>,
    pub ordering_violations: Vec<OrderingViolation>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SummaryError {
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Band(#[from] BandError),
}

pub fn yearly_summary(rows: &[YearlyIndexRow]) -> Result<YearlySummary, SummaryError> {
    let col = |f: fn(&YearlyIndexRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    let medians = YearlyMedians {
        cr4: column_median(&col(|r| r.cr4))?,
        cr8: column_median(&col(|r| r.cr8))?,
        hhi: column_median(&col(|r| r.hhi))?,
        cci: column_median(&col(|r| r.cci))?,
    };
    let mut bands = Vec::new();
    let mut ordering_violations = Vec::new();
    for r in rows {
        let hhi_points = r.hhi * 10_000.0;
        let cr4_percent = r.cr4 * 100.0;
        bands.push(YearBands {
            year: r.year.clone(),
            hhi_points,
            hhi_band: classify_hhi(hhi_points)?,
            cr4_percent,
            cr4_band: classify_cr4(cr4_percent)?,
        });
        if !(r.hhi <= r.cci && r.cci <= r.cr4) {
            ordering_violations.push(OrderingViolation {
                year: r.year.clone(),
                hhi: r.hhi,
                cci: r.cci,
                cr4: r.cr4,
            });
        }
    }
    Ok(YearlySummary {
        years: rows.len(),
        medians,
        bands,
        ordering_violations,
    })
}

/// One automaker's yearly licence statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutomakerSummary {
    pub automaker: String,
    #[serde(flatten)]
    pub summary: DescriptiveSummary,
    pub cv_percent: Option<i64>,
}

/// Mean, standard deviation and CV of every automaker across periods.
pub fn panel_summary(panel: &LicensingPanel) -> Result<Vec<AutomakerSummary>, StatsError> {
    panel
        .automakers()
        .map(|a| {
            let series: Vec<f64> = panel
                .series(a)
                .unwrap_or_default()
                .into_iter()
                .map(|(_, c)| c as f64)
                .collect();
            let summary = describe(&series)?;
            Ok(AutomakerSummary {
                automaker: a.to_string(),
                cv_percent: summary.cv_percent(),
                summary,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn complete_points_drop_missing_countries() {
        let (points, dropped) = concentration_points(&fixtures::country_indices());
        assert_eq!(points.len(), 9);
        assert_eq!(dropped, ["United Kingdom", "EU (Europe Union)", "Mexico"]);
    }

    #[test]
    fn unknown_column() {
        assert!(country_column(&fixtures::country_indices(), "gdp").is_none());
    }

    #[test]
    fn ordering_violation_is_detected() {
        let mut rows = fixtures::yearly_indices();
        rows[2].hhi = 0.5;
        let s = yearly_summary(&rows).unwrap();
        assert_eq!(s.ordering_violations.len(), 1);
        assert_eq!(s.ordering_violations[0].year, "2014");
    }

    #[test]
    fn panel_summary_of_demo() {
        let rows = panel_summary(&fixtures::demo_panel()).unwrap();
        let beta = rows.iter().find(|r| r.automaker == "BETA").unwrap();
        assert!((beta.summary.mean - 250_000.0).abs() < 1e-9);
        assert!((beta.summary.sample_std - 10_000.0).abs() < 1e-9);
        assert_eq!(beta.cv_percent, Some(4));
    }
}
