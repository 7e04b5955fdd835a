//! CSV ingestion for country index tables, licensing panels, share files and
//! published yearly index tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market::{MarketError, MarketSnapshot, RenormalizePolicy};

/// Literal used for a missing value in country tables.
pub const MISSING: &str = "n.d.";

pub const COUNTRY_HEADER: [&str; 5] = ["country", "num_firms", "total_production", "cr3", "hhi"];
pub const PANEL_HEADER: [&str; 3] = ["automaker", "period", "count"];
pub const YEARLY_INDEX_HEADER: [&str; 6] = ["year", "cr4", "cr8", "hhi", "b", "cci"];

/// Where in a file a problem was found. Rows are 1-based and count the header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub row: usize,
    pub column: Option<String>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.column {
            Some(c) => write!(f, "row {}, column `{}`", self.row, c),
            None => write!(f, "row {}", self.row),
        }
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at {location}: {message}")]
    Parse { location: Location, message: String },
    #[error("schema error at {location}: {message}")]
    Schema { location: Location, message: String },
    #[error("missing count for automaker `{automaker}` in period `{period}`")]
    MissingCell { automaker: String, period: String },
    #[error(transparent)]
    Market(#[from] MarketError),
}

impl DataError {
    fn parse(row: usize, column: &str, message: impl Into<String>) -> Self {
        DataError::Parse {
            location: Location {
                row,
                column: Some(column.to_string()),
            },
            message: message.into(),
        }
    }

    fn schema(row: usize, column: Option<&str>, message: impl Into<String>) -> Self {
        DataError::Schema {
            location: Location {
                row,
                column: column.map(str::to_string),
            },
            message: message.into(),
        }
    }
}

/// One row of a cross-country concentration table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryIndexRecord {
    pub country: String,
    pub num_firms: u32,
    pub total_production: u64,
    pub cr3: Option<f64>,
    pub hhi: Option<f64>,
}

impl CountryIndexRecord {
    pub fn is_complete(&self) -> bool {
        self.cr3.is_some() && self.hhi.is_some()
    }

    /// Value of a named numeric column, `None` when missing.
    pub fn column(&self, name: &str) -> Option<Option<f64>> {
        match name {
            "num_firms" => Some(Some(f64::from(self.num_firms))),
            "total_production" => Some(Some(self.total_production as f64)),
            "cr3" => Some(self.cr3),
            "hhi" => Some(self.hhi),
            _ => None,
        }
    }
}

/// Yearly licence counts per automaker.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LicensingPanel {
    rows: BTreeMap<String, BTreeMap<String, u64>>,
}

impl LicensingPanel {
    /// Builds a panel, requiring every automaker to cover the same periods.
    pub fn new(rows: BTreeMap<String, BTreeMap<String, u64>>) -> Result<Self, DataError> {
        let periods: BTreeSet<&String> = rows.values().flat_map(|m| m.keys()).collect();
        for (automaker, series) in &rows {
            for period in &periods {
                if !series.contains_key(*period) {
                    return Err(DataError::MissingCell {
                        automaker: automaker.clone(),
                        period: (*period).clone(),
                    });
                }
            }
        }
        Ok(Self { rows })
    }

    pub fn automakers(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    pub fn periods(&self) -> Vec<&str> {
        self.rows
            .values()
            .next()
            .map(|m| m.keys().map(String::as_str).collect())
            .unwrap_or_default()
    }

    pub fn count(&self, automaker: &str, period: &str) -> Option<u64> {
        self.rows.get(automaker)?.get(period).copied()
    }

    /// Counts of one automaker across periods, in period order.
    pub fn series(&self, automaker: &str) -> Option<Vec<(String, u64)>> {
        self.rows
            .get(automaker)
            .map(|m| m.iter().map(|(p, c)| (p.clone(), *c)).collect())
    }

    /// Market snapshot for one period, treating each automaker (including any
    /// aggregate `OTHERS` row) as one firm.
    pub fn snapshot(&self, market_id: &str, period: &str) -> Result<MarketSnapshot, MarketError> {
        let counts = self
            .rows
            .iter()
            .filter_map(|(a, m)| m.get(period).map(|c| (a.clone(), *c as f64)));
        MarketSnapshot::from_counts(counts, market_id, period)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// One year of published index values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearlyIndexRow {
    pub year: String,
    pub cr4: f64,
    pub cr8: f64,
    pub hhi: f64,
    /// Published Rosenbluth value, carried verbatim.
    pub b: f64,
    pub cci: f64,
}

fn open(path: &Path) -> Result<File, DataError> {
    File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(input)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<(), DataError> {
    let header = rdr
        .headers()
        .map_err(|e| DataError::schema(1, None, e.to_string()))?;
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(DataError::schema(
            1,
            None,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                got.join(",")
            ),
        ));
    }
    Ok(())
}

fn records<R: Read>(
    rdr: &mut csv::Reader<R>,
    width: usize,
) -> impl Iterator<Item = Result<(usize, csv::StringRecord), DataError>> + '_ {
    rdr.records().map(move |r| {
        let rec = r.map_err(|e| {
            let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
            DataError::Parse {
                location: Location { row, column: None },
                message: e.to_string(),
            }
        })?;
        let row = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != width {
            return Err(DataError::schema(
                row,
                None,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        Ok((row, rec))
    })
}

fn parse_f64(row: usize, column: &str, raw: &str) -> Result<f64, DataError> {
    let v: f64 = raw
        .parse()
        .map_err(|_| DataError::parse(row, column, format!("`{raw}` is not a number")))?;
    if !v.is_finite() {
        return Err(DataError::parse(
            row,
            column,
            format!("`{raw}` is not finite"),
        ));
    }
    Ok(v)
}

fn parse_fraction(row: usize, column: &str, raw: &str) -> Result<f64, DataError> {
    let v = parse_f64(row, column, raw)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(DataError::schema(
            row,
            Some(column),
            format!("{v} is outside [0, 1]"),
        ));
    }
    Ok(v)
}

fn parse_optional_fraction(row: usize, column: &str, raw: &str) -> Result<Option<f64>, DataError> {
    // Some published tables drop the trailing dot.
    if raw == MISSING || raw == "n.d" {
        Ok(None)
    } else {
        parse_fraction(row, column, raw).map(Some)
    }
}

/// Integers may be written with thousands separators in quoted fields.
fn parse_count(row: usize, column: &str, raw: &str) -> Result<u64, DataError> {
    let cleaned: String = raw.chars().filter(|c| *c != '_' && *c != ',').collect();
    match cleaned.parse::<i128>() {
        Ok(v) if v < 0 => Err(DataError::schema(
            row,
            Some(column),
            format!("{v} is negative"),
        )),
        Ok(v) => u64::try_from(v)
            .map_err(|_| DataError::parse(row, column, format!("`{raw}` is too large"))),
        Err(_) => Err(DataError::parse(
            row,
            column,
            format!("`{raw}` is not a whole number"),
        )),
    }
}

pub fn read_country_indices<R: Read>(input: R) -> Result<Vec<CountryIndexRecord>, DataError> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &COUNTRY_HEADER)?;
    let mut out = Vec::new();
    for item in records(&mut rdr, COUNTRY_HEADER.len()) {
        let (row, rec) = item?;
        let country = rec[0].to_string();
        if country.is_empty() {
            return Err(DataError::schema(row, Some("country"), "empty country"));
        }
        let num_firms = parse_count(row, "num_firms", &rec[1])?;
        if num_firms == 0 {
            return Err(DataError::schema(
                row,
                Some("num_firms"),
                "must be positive",
            ));
        }
        let num_firms = u32::try_from(num_firms)
            .map_err(|_| DataError::parse(row, "num_firms", "too large"))?;
        let total_production = parse_count(row, "total_production", &rec[2])?;
        let cr3 = parse_optional_fraction(row, "cr3", &rec[3])?;
        let hhi = parse_optional_fraction(row, "hhi", &rec[4])?;
        if let Some(h) = hhi {
            if h < 1.0 / f64::from(num_firms) - 1e-9 {
                return Err(DataError::schema(
                    row,
                    Some("hhi"),
                    format!(
                        "{h} is below 1/num_firms = {:.4}",
                        1.0 / f64::from(num_firms)
                    ),
                ));
            }
        }
        out.push(CountryIndexRecord {
            country,
            num_firms,
            total_production,
            cr3,
            hhi,
        });
    }
    Ok(out)
}

pub fn load_country_indices(path: impl AsRef<Path>) -> Result<Vec<CountryIndexRecord>, DataError> {
    read_country_indices(open(path.as_ref())?)
}

pub fn read_licensing_panel<R: Read>(input: R) -> Result<LicensingPanel, DataError> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &PANEL_HEADER)?;
    let mut rows: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for item in records(&mut rdr, PANEL_HEADER.len()) {
        let (row, rec) = item?;
        let automaker = rec[0].to_string();
        let period = rec[1].to_string();
        if automaker.is_empty() {
            return Err(DataError::schema(row, Some("automaker"), "empty automaker"));
        }
        if period.is_empty() {
            return Err(DataError::schema(row, Some("period"), "empty period"));
        }
        if rec[2].is_empty() {
            return Err(DataError::MissingCell { automaker, period });
        }
        let count = parse_count(row, "count", &rec[2])?;
        if rows
            .entry(automaker.clone())
            .or_default()
            .insert(period.clone(), count)
            .is_some()
        {
            return Err(DataError::schema(
                row,
                None,
                format!("duplicate cell for `{automaker}` / `{period}`"),
            ));
        }
    }
    LicensingPanel::new(rows)
}

pub fn load_licensing_panel(path: impl AsRef<Path>) -> Result<LicensingPanel, DataError> {
    read_licensing_panel(open(path.as_ref())?)
}

/// Reads a share file (`firm,share`) or a count file (`firm,count`).
///
/// Leading `# key: value` comment lines carry metadata; `market_id` and
/// `period` are recognised, anything else is ignored.
pub fn read_market_file(
    text: &str,
    default_market_id: &str,
    policy: RenormalizePolicy,
) -> Result<MarketSnapshot, DataError> {
    let mut market_id = default_market_id.to_string();
    let mut period = String::new();
    for line in text.lines() {
        let Some(meta) = line.trim().strip_prefix('#') else {
            continue;
        };
        if let Some((key, value)) = meta.split_once(':') {
            match key.trim() {
                "market_id" | "market" => market_id = value.trim().to_string(),
                "period" => period = value.trim().to_string(),
                _ => {}
            }
        }
    }

    let mut rdr = reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| DataError::schema(1, None, e.to_string()))?
        .clone();
    let header: Vec<&str> = header.iter().collect();
    let is_counts = match header.as_slice() {
        ["firm", "share"] => false,
        ["firm", "count"] => true,
        other => {
            return Err(DataError::schema(
                1,
                None,
                format!(
                    "expected header `firm,share` or `firm,count`, found `{}`",
                    other.join(",")
                ),
            ))
        }
    };
    let value_column = header[1];
    let mut entries = Vec::new();
    for item in records(&mut rdr, 2) {
        let (row, rec) = item?;
        let value = parse_f64(row, value_column, &rec[1])?;
        if !is_counts && value > 1.0 {
            return Err(DataError::schema(
                row,
                Some(value_column),
                format!("{value} is above 1"),
            ));
        }
        entries.push((rec[0].to_string(), value));
    }
    let snapshot = if is_counts {
        MarketSnapshot::from_counts(entries, market_id, period)?
    } else {
        MarketSnapshot::from_shares(entries, market_id, period, policy)?
    };
    Ok(snapshot)
}

pub fn load_market_file(
    path: impl AsRef<Path>,
    policy: RenormalizePolicy,
) -> Result<MarketSnapshot, DataError> {
    let path = path.as_ref();
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|source| DataError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_market_file(&text, &stem, policy)
}

pub fn read_yearly_indices<R: Read>(input: R) -> Result<Vec<YearlyIndexRow>, DataError> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &YEARLY_INDEX_HEADER)?;
    let mut out = Vec::new();
    for item in records(&mut rdr, YEARLY_INDEX_HEADER.len()) {
        let (row, rec) = item?;
        let b = parse_f64(row, "b", &rec[4])?;
        out.push(YearlyIndexRow {
            year: rec[0].to_string(),
            cr4: parse_fraction(row, "cr4", &rec[1])?,
            cr8: parse_fraction(row, "cr8", &rec[2])?,
            hhi: parse_fraction(row, "hhi", &rec[3])?,
            b,
            cci: parse_fraction(row, "cci", &rec[5])?,
        });
    }
    Ok(out)
}

pub fn load_yearly_indices(path: impl AsRef<Path>) -> Result<Vec<YearlyIndexRow>, DataError> {
    read_yearly_indices(open(path.as_ref())?)
}

/// First non-comment line of a CSV file, used to tell file kinds apart.
pub fn sniff_header(text: &str) -> Option<&str> {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
}
