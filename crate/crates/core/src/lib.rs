//! Market-concentration analytics.
//!
//! * [`market`] – firm shares and ranked market snapshots.
//! * [`indices`] – concentration ratios, HHI, dominance, Rosenbluth and
//!   Horvath indices, Pareto top share and the combined [`IndexReport`].
//! * [`bands`] – HHI-points and CR4 classification bands.
//! * [`merger`] – merging firms and screening the HHI change.
//! * [`stats`] – descriptive statistics, Tukey summaries, correlation and OLS.
//! * [`clustering`] – deterministic k-means over labelled points.
//! * [`io`] and [`fixtures`] – CSV ingestion and bundled datasets.
//! * [`report`] – JSON, markdown and SVG output.
//! * [`cli`] – the `mconc` command line.
//!
//! ```
//! use market_concentration::{indices, MarketSnapshot};
//!
//! let market = MarketSnapshot::from_counts(
//!     [("A", 40.0), ("B", 30.0), ("C", 20.0), ("D", 10.0)],
//!     "demo",
//!     "2024",
//! )?;
//! assert!((indices::hhi(&market) - 0.30).abs() < 1e-12);
//! # Ok::<(), market_concentration::market::MarketError>(())
//! ```

pub mod analysis;
pub mod bands;
pub mod cli;
pub mod clustering;
pub mod fixtures;
pub mod indices;
pub mod io;
pub mod market;
pub mod merger;
pub mod report;
pub mod stats;

pub use bands::ConcentrationBand;
pub use clustering::{kmeans, ClusteringResult, FeaturePoint, KMeansConfig};
pub use indices::{index_report, IndexReport};
pub use market::{FirmShare, MarketSnapshot, RenormalizePolicy};
pub use merger::{merge_firms, merger_screen, MergerRule, MergerScreen, MergerVerdict};
pub use stats::{DescriptiveSummary, FiveNumberSummary, RegressionFit};
