//! A full concentration dossier assembled from a directory of CSV files.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{
    concentration_points, country_column, yearly_summary, SummaryError, YearlySummary,
};
use crate::clustering::{cluster_report, kmeans, ClusterError, ClusterReport, KMeansConfig};
use crate::fixtures;
use crate::indices::{index_report, IndexError, IndexReport};
use crate::io::{
    read_country_indices, read_licensing_panel, read_market_file, read_yearly_indices,
    sniff_header, CountryIndexRecord, DataError, YearlyIndexRow,
};
use crate::market::{MarketError, MarketSnapshot, RenormalizePolicy};
use crate::report::markdown;
use crate::stats::{five_number, ols_fit, FiveNumberSummary, RegressionFit, StatsError};

#[derive(Debug, thiserror::Error)]
pub enum DossierError {
    #[error("bundle {0} contains no recognised CSV files")]
    EmptyBundle(PathBuf),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: DataError },
    #[error("{0}: header not recognised")]
    UnknownFile(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Summary(#[from] SummaryError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

/// Input files of a dossier.
#[derive(Debug, Clone, Default)]
pub struct Bundle {
    pub countries: Option<Vec<CountryIndexRecord>>,
    pub yearly: Option<Vec<YearlyIndexRow>>,
    pub markets: Vec<MarketSnapshot>,
}

impl Bundle {
    /// The datasets shipped with the crate.
    pub fn bundled() -> Self {
        Self {
            countries: Some(fixtures::country_indices()),
            yearly: Some(fixtures::yearly_indices()),
            markets: vec![fixtures::demo_market()],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.countries.is_none() && self.yearly.is_none() && self.markets.is_empty()
    }

    /// Loads every `*.csv` in `dir`, recognising each by its header.
    pub fn load(dir: &Path) -> Result<Self, DossierError> {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "csv"))
            .collect();
        paths.sort();
        let mut bundle = Bundle::default();
        for path in paths {
            let text = std::fs::read_to_string(&path)?;
            let wrap = |source: DataError| DossierError::File {
                path: path.clone(),
                source,
            };
            let header = sniff_header(&text).unwrap_or("");
            if header.starts_with("country,") {
                let recs = read_country_indices(text.as_bytes()).map_err(wrap)?;
                bundle.countries.get_or_insert_with(Vec::new).extend(recs);
            } else if header.starts_with("year,") {
                let rows = read_yearly_indices(text.as_bytes()).map_err(wrap)?;
                bundle.yearly.get_or_insert_with(Vec::new).extend(rows);
            } else if header.starts_with("automaker,") {
                let panel = read_licensing_panel(text.as_bytes()).map_err(wrap)?;
                let stem = path
                    .file_stem()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned();
                for period in panel.periods() {
                    bundle.markets.push(panel.snapshot(&stem, period)?);
                }
            } else if header.starts_with("firm,") {
                let stem = path
                    .file_stem()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned();
                let snapshot =
                    read_market_file(&text, &stem, RenormalizePolicy::Strict).map_err(wrap)?;
                bundle.markets.push(snapshot);
            } else if !text.trim().is_empty() {
                return Err(DossierError::UnknownFile(path));
            }
        }
        if bundle.is_empty() {
            return Err(DossierError::EmptyBundle(dir.to_path_buf()));
        }
        Ok(bundle)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountrySection {
    pub dropped: Vec<String>,
    pub clusters: Vec<ClusterReport>,
    pub regression: RegressionFit,
    pub cr3_box: FiveNumberSummary,
    pub hhi_box: FiveNumberSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dossier {
    pub yearly: Option<(Vec<YearlyIndexRow>, YearlySummary)>,
    pub countries: Option<CountrySection>,
    pub markets: Vec<IndexReport>,
}

impl Dossier {
    pub fn build(bundle: &Bundle, seed: u64) -> Result<Self, DossierError> {
        let yearly = match &bundle.yearly {
            Some(rows) => Some((rows.clone(), yearly_summary(rows)?)),
            None => None,
        };
        let countries = match &bundle.countries {
            Some(records) => Some(country_section(records, seed)?),
            None => None,
        };
        let markets = bundle
            .markets
            .iter()
            .map(index_report)
            .collect::<Result<_, _>>()?;
        Ok(Self {
            yearly,
            countries,
            markets,
        })
    }

    /// Years where `HHI <= CCI <= CR4` fails.
    pub fn has_violations(&self) -> bool {
        self.yearly
            .as_ref()
            .is_some_and(|(_, s)| !s.ordering_violations.is_empty())
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Market concentration dossier\n");
        if let Some((rows, summary)) = &self.yearly {
            out.push_str("\n## Yearly concentration indices\n\n");
            out.push_str(&markdown::yearly(rows, summary));
        }
        if let Some(c) = &self.countries {
            out.push_str("\n## Cross-country comparison\n\n");
            out.push_str(&markdown::summaries("cr3", None, &c.cr3_box, &c.dropped));
            out.push('\n');
            out.push_str(&markdown::summaries("hhi", None, &c.hhi_box, &c.dropped));
            out.push('\n');
            out.push_str(&markdown::regression(&c.regression, "cr3", "hhi"));
            for k in &c.clusters {
                out.push('\n');
                out.push_str(&markdown::clusters(k, &[]));
            }
        }
        if !self.markets.is_empty() {
            out.push_str("\n## Markets\n\n");
            for m in &self.markets {
                out.push_str(&markdown::index_report(m));
                out.push('\n');
            }
        }
        if self.has_violations() {
            let _ = writeln!(out, "\n**Validation failed.**");
        }
        out
    }
}

fn country_section(
    records: &[CountryIndexRecord],
    seed: u64,
) -> Result<CountrySection, DossierError> {
    let (points, dropped) = concentration_points(records);
    let x: Vec<f64> = points.iter().map(|p| p.coords[0]).collect();
    let y: Vec<f64> = points.iter().map(|p| p.coords[1]).collect();
    let regression = ols_fit(&x, &y)?;
    let complete: Vec<CountryIndexRecord> = records
        .iter()
        .filter(|r| r.is_complete())
        .cloned()
        .collect();
    let cr3 = country_column(&complete, "cr3").expect("known column").0;
    let hhi = country_column(&complete, "hhi").expect("known column").0;
    let mut clusters = Vec::new();
    for k in [2, 3] {
        if k <= points.len() {
            let result = kmeans(&points, &KMeansConfig::new(k).with_seed(seed))?;
            clusters.push(cluster_report(&result, &points)?);
        }
    }
    Ok(CountrySection {
        dropped,
        clusters,
        regression,
        cr3_box: five_number(&cr3)?,
        hhi_box: five_number(&hhi)?,
    })
}
