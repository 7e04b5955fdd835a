//! The `mconc` command line.
//!
//! Exit codes: 0 success, 2 input or parse error, 3 domain or validation
//! error. Every command prints a JSON document (`--format json`) or markdown
//! (`--format md`) on stdout.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{
    concentration_points, country_column, country_pairs, panel_summary, AutomakerSummary,
};
use crate::clustering::{
    cluster_report, kmeans, ClusterError, ClusterReport, FeatureScaling, KMeansConfig,
};
use crate::fixtures;
use crate::indices::{index_report_with, IndexError};
use crate::io::{
    load_market_file, read_country_indices, read_licensing_panel, sniff_header, CountryIndexRecord,
    DataError, LicensingPanel,
};
use crate::market::{MarketError, RenormalizePolicy};
use crate::merger::{MergerError, MergerRule, MergerScreen};
use crate::report::dossier::{Bundle, Dossier, DossierError};
use crate::report::{markdown, svg, to_json, FRACTION_DECIMALS, REGRESSION_DECIMALS};
use crate::stats::{
    describe, five_number, ols_fit, DescriptiveSummary, FiveNumberSummary, LabeledValue,
    RegressionFit, StatsError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Md,
}

#[derive(Debug, Parser)]
#[command(
    name = "mconc",
    version,
    about = "Market-concentration indices, merger screening and country comparisons"
)]
pub struct Cli {
    /// Output format (default: json, except `report` which defaults to md).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Also write SVG charts (cluster, stats).
    #[arg(long, global = true)]
    pub chart: bool,
    /// Directory for SVG charts.
    #[arg(long, global = true, default_value = ".")]
    pub chart_dir: PathBuf,
    /// Seed for clustering restarts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Maximum HHI increase for the moderate-band merger rule.
    #[arg(long, global = true)]
    pub rule_b_delta: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every concentration index for a `firm,share` or `firm,count` file.
    Indices {
        file: PathBuf,
        /// Extra concentration ratios to report, e.g. `--k 2,5`.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        /// Renormalize shares whatever their sum.
        #[arg(long)]
        renormalize_any: bool,
    },
    /// Merge two firms and screen the HHI change.
    Screen {
        file: PathBuf,
        #[arg(long, num_args = 2, value_names = ["FIRM_A", "FIRM_B"], required = true)]
        merge: Vec<String>,
    },
    /// k-means over (CR3, HHI) of a country table (bundled table if omitted).
    Cluster {
        file: Option<PathBuf>,
        #[arg(short, long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        /// Standardise coordinates before clustering.
        #[arg(long)]
        zscore: bool,
    },
    /// Descriptive and box-plot statistics of a country column or a licensing panel.
    Stats {
        file: Option<PathBuf>,
        /// Country column, or automaker for a panel file.
        #[arg(long)]
        column: Option<String>,
    },
    /// Least-squares fit between two country columns.
    Regress {
        file: Option<PathBuf>,
        #[arg(long, default_value = "cr3")]
        x: String,
        #[arg(long, default_value = "hhi")]
        y: String,
    },
    /// Full dossier for a directory of CSV files (bundled data if omitted).
    Report { bundle: Option<PathBuf> },
}

/// What a command printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    fn input(message: impl fmt::Display) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }

    fn domain(message: impl fmt::Display) -> Self {
        Self {
            code: EXIT_DOMAIN,
            message: message.to_string(),
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Market(_) => CliError::domain(e),
            _ => CliError::input(e),
        }
    }
}

macro_rules! domain_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::domain(e)
            }
        }
    )*};
}

domain_errors!(
    MarketError,
    IndexError,
    MergerError,
    StatsError,
    ClusterError
);

impl From<DossierError> for CliError {
    fn from(e: DossierError) -> Self {
        match e {
            DossierError::File {
                source: DataError::Market(_),
                ..
            } => CliError::domain(e),
            DossierError::EmptyBundle(_)
            | DossierError::File { .. }
            | DossierError::UnknownFile(_)
            | DossierError::Io(_) => CliError::input(e),
            _ => CliError::domain(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenOutput {
    pub firm_a: String,
    pub firm_b: String,
    pub merged_firm: String,
    pub h0: f64,
    pub h1: f64,
    pub delta: f64,
    pub rule: MergerRule,
    pub rule_b_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterOutput {
    #[serde(flatten)]
    pub report: ClusterReport,
    pub seed: u64,
    pub dropped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsOutput {
    pub column: String,
    pub describe: DescriptiveSummary,
    pub cv_percent: Option<i64>,
    pub five_number: FiveNumberSummary,
    pub dropped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressOutput {
    pub x: String,
    pub y: String,
    #[serde(flatten)]
    pub fit: RegressionFit,
    pub dropped: Vec<String>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let mut stderr = String::new();
    match dispatch(cli, &mut stderr) {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr,
        },
        Err(e) => {
            stderr.push_str(&format!("error: {}\n", e.message));
            Outcome {
                code: e.code,
                stdout: String::new(),
                stderr,
            }
        }
    }
}

fn dispatch(cli: &Cli, stderr: &mut String) -> Result<(i32, String), CliError> {
    let format = cli.format.unwrap_or(match cli.command {
        Command::Report { .. } => Format::Md,
        _ => Format::Json,
    });
    let out = match &cli.command {
        Command::Indices {
            file,
            k,
            renormalize_any,
        } => cmd_indices(file, k, *renormalize_any, format)?,
        Command::Screen { file, merge } => {
            cmd_screen(file, &merge[0], &merge[1], cli.rule_b_delta, format)?
        }
        Command::Cluster {
            file,
            k,
            restarts,
            zscore,
        } => {
            let config = KMeansConfig::new(*k)
                .with_seed(cli.seed)
                .with_restarts(*restarts)
                .with_scaling(if *zscore {
                    FeatureScaling::ZScore
                } else {
                    FeatureScaling::None
                });
            let (text, chart) = cmd_cluster(file.as_deref(), &config, format, cli.chart)?;
            if let Some(svg) = chart {
                write_chart(&cli.chart_dir, &format!("cluster_k{k}.svg"), &svg, stderr)?;
            }
            text
        }
        Command::Stats { file, column } => {
            let (text, chart) = cmd_stats(file.as_deref(), column.as_deref(), format, cli.chart)?;
            if let Some((name, svg)) = chart {
                write_chart(&cli.chart_dir, &format!("boxplot_{name}.svg"), &svg, stderr)?;
            }
            text
        }
        Command::Regress { file, x, y } => cmd_regress(file.as_deref(), x, y, format)?,
        Command::Report { bundle } => {
            let (text, valid) = cmd_report(bundle.as_deref(), cli.seed, format)?;
            if !valid {
                stderr.push_str("error: validation failed: HHI <= CCI <= CR4 violated\n");
                return Ok((EXIT_DOMAIN, text));
            }
            text
        }
    };
    Ok((EXIT_OK, out))
}

fn write_chart(dir: &Path, name: &str, svg: &str, stderr: &mut String) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, svg).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    stderr.push_str(&format!("wrote {}\n", path.display()));
    Ok(())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_countries(file: Option<&Path>) -> Result<Vec<CountryIndexRecord>, CliError> {
    match file {
        Some(path) => Ok(read_country_indices(read_text(path)?.as_bytes())?),
        None => Ok(fixtures::country_indices()),
    }
}

pub fn cmd_indices(
    file: &Path,
    ks: &[usize],
    renormalize_any: bool,
    format: Format,
) -> Result<String, CliError> {
    let policy = if renormalize_any {
        RenormalizePolicy::Always
    } else {
        RenormalizePolicy::Strict
    };
    let snapshot = load_market_file(file, policy)?;
    let report = index_report_with(&snapshot, ks)?;
    Ok(match format {
        Format::Json => to_json("indices", &report, FRACTION_DECIMALS),
        Format::Md => markdown::index_report(&report),
    })
}

pub fn cmd_screen(
    file: &Path,
    firm_a: &str,
    firm_b: &str,
    rule_b_delta: Option<f64>,
    format: Format,
) -> Result<String, CliError> {
    let screen = match rule_b_delta {
        Some(d) => MergerScreen::with_moderate_delta(d).map_err(CliError::input)?,
        None => MergerScreen::default(),
    };
    let snapshot = load_market_file(file, RenormalizePolicy::Strict)?;
    let (_, verdict) = screen.merge_firms(&snapshot, firm_a, firm_b)?;
    let merged_firm = format!("{firm_a}+{firm_b}");
    Ok(match format {
        Format::Json => to_json(
            "screen",
            &ScreenOutput {
                firm_a: firm_a.to_string(),
                firm_b: firm_b.to_string(),
                merged_firm,
                h0: verdict.h0,
                h1: verdict.h1,
                delta: verdict.delta,
                rule: verdict.rule,
                rule_b_delta: screen.moderate_delta(),
            },
            FRACTION_DECIMALS,
        ),
        Format::Md => markdown::verdict(&verdict, &merged_firm),
    })
}

pub fn cmd_cluster(
    file: Option<&Path>,
    config: &KMeansConfig,
    format: Format,
    chart: bool,
) -> Result<(String, Option<String>), CliError> {
    let records = load_countries(file)?;
    let (points, dropped) = concentration_points(&records);
    let result = kmeans(&points, config)?;
    let report = cluster_report(&result, &points)?;
    let svg = chart.then(|| {
        svg::cluster_scatter(
            &points,
            &result,
            &format!("k-means, k = {}", config.k),
            "CR3",
            "HHI",
        )
    });
    let text = match format {
        Format::Json => to_json(
            "cluster",
            &ClusterOutput {
                report,
                seed: config.seed,
                dropped,
            },
            FRACTION_DECIMALS,
        ),
        Format::Md => markdown::clusters(&report, &dropped),
    };
    Ok((text, svg))
}

enum StatsInput {
    Countries(Vec<CountryIndexRecord>),
    Panel(LicensingPanel),
}

fn load_stats_input(file: Option<&Path>) -> Result<StatsInput, CliError> {
    let Some(path) = file else {
        return Ok(StatsInput::Countries(fixtures::country_indices()));
    };
    let text = read_text(path)?;
    if sniff_header(&text).is_some_and(|h| h.starts_with("automaker")) {
        Ok(StatsInput::Panel(read_licensing_panel(text.as_bytes())?))
    } else {
        Ok(StatsInput::Countries(read_country_indices(
            text.as_bytes(),
        )?))
    }
}

pub fn cmd_stats(
    file: Option<&Path>,
    column: Option<&str>,
    format: Format,
    chart: bool,
) -> Result<(String, Option<(String, String)>), CliError> {
    let (column, series, dropped) = match load_stats_input(file)? {
        StatsInput::Countries(records) => {
            let column = column.unwrap_or("hhi");
            let (series, dropped) = country_column(&records, column)
                .ok_or_else(|| CliError::input(format!("unknown column `{column}`")))?;
            (column.to_string(), series, dropped)
        }
        StatsInput::Panel(panel) => match column {
            None => return Ok((panel_table(&panel, format)?, None)),
            Some(automaker) => {
                let series = panel
                    .series(automaker)
                    .ok_or_else(|| CliError::input(format!("unknown automaker `{automaker}`")))?
                    .into_iter()
                    .map(|(p, c)| LabeledValue::new(p, c as f64))
                    .collect();
                (automaker.to_string(), series, Vec::new())
            }
        },
    };
    let values: Vec<f64> = series.iter().map(|p| p.value).collect();
    let summary = describe(&values)?;
    let five = five_number(&series)?;
    let svg = chart.then(|| {
        let name: String = column
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        (
            name,
            svg::box_plot(&series, &five, &format!("Box plot of {column}"), &column),
        )
    });
    let text = match format {
        Format::Json => to_json(
            "stats",
            &StatsOutput {
                cv_percent: summary.cv_percent(),
                column,
                describe: summary,
                five_number: five,
                dropped,
            },
            FRACTION_DECIMALS,
        ),
        Format::Md => markdown::summaries(&column, Some(&summary), &five, &dropped),
    };
    Ok((text, svg))
}

fn panel_table(panel: &LicensingPanel, format: Format) -> Result<String, CliError> {
    let rows: Vec<AutomakerSummary> = panel_summary(panel)?;
    Ok(match format {
        Format::Json => to_json("panel_stats", &rows, FRACTION_DECIMALS),
        Format::Md => {
            let mut out =
                String::from("| automaker | mean | standard deviation | CV |\n|---|---|---|---|\n");
            for r in rows {
                let cv = r
                    .cv_percent
                    .map_or_else(|| "n/a".into(), |c| format!("{c}%"));
                out.push_str(&format!(
                    "| {} | {:.0} | {:.0} | {cv} |\n",
                    r.automaker, r.summary.mean, r.summary.sample_std
                ));
            }
            out
        }
    })
}

pub fn cmd_regress(
    file: Option<&Path>,
    x: &str,
    y: &str,
    format: Format,
) -> Result<String, CliError> {
    let records = load_countries(file)?;
    let (points, dropped) = country_pairs(&records, x, y)
        .ok_or_else(|| CliError::input(format!("unknown column `{x}` or `{y}`")))?;
    let xs: Vec<f64> = points.iter().map(|p| p.coords[0]).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.coords[1]).collect();
    let fit = ols_fit(&xs, &ys)?;
    Ok(match format {
        Format::Json => to_json(
            "regress",
            &RegressOutput {
                x: x.to_string(),
                y: y.to_string(),
                fit,
                dropped,
            },
            REGRESSION_DECIMALS,
        ),
        Format::Md => markdown::regression(&fit, x, y),
    })
}

/// Returns the rendered dossier and whether all validation checks passed.
pub fn cmd_report(
    bundle: Option<&Path>,
    seed: u64,
    format: Format,
) -> Result<(String, bool), CliError> {
    let bundle = match bundle {
        Some(dir) => Bundle::load(dir)?,
        None => Bundle::bundled(),
    };
    let dossier = Dossier::build(&bundle, seed)?;
    let text = match format {
        Format::Json => to_json("report", &dossier, FRACTION_DECIMALS),
        Format::Md => dossier.to_markdown(),
    };
    Ok((text, !dossier.has_violations()))
}
