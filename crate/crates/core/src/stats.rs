//! Descriptive statistics, Tukey box-plot summaries, correlation and simple
//! least-squares regression.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("series is empty")]
    EmptySeries,
    #[error("coefficient of variation needs a positive mean, got {0}")]
    NonPositiveMeanForCV(f64),
    #[error("x has {x} values but y has {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("{0} has zero variance")]
    ZeroVariance(&'static str),
    #[error("series contains a non-finite value")]
    NonFinite,
}

fn check_finite(values: &[f64]) -> Result<(), StatsError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}

pub fn mean(values: &[f64]) -> Result<f64, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptySeries);
    }
    check_finite(values)?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Mean, sample standard deviation and coefficient of variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveSummary {
    pub n: usize,
    pub mean: f64,
    /// Standard deviation with divisor `n - 1`.
    pub sample_std: f64,
    /// `sample_std / mean`, present only when the mean is positive.
    pub cv: Option<f64>,
}

impl DescriptiveSummary {
    pub fn coefficient_of_variation(&self) -> Result<f64, StatsError> {
        self.cv.ok_or(StatsError::NonPositiveMeanForCV(self.mean))
    }

    /// CV as a whole percentage.
    pub fn cv_percent(&self) -> Option<i64> {
        self.cv.map(|cv| (cv * 100.0).round() as i64)
    }
}

pub fn describe(values: &[f64]) -> Result<DescriptiveSummary, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFewPoints {
            needed: 2,
            got: values.len(),
        });
    }
    check_finite(values)?;
    let (m, sample_std) = if values.iter().all(|v| *v == values[0]) {
        (values[0], 0.0)
    } else {
        let m = mean(values)?;
        let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
        (m, (ss / (values.len() - 1) as f64).sqrt())
    };
    Ok(DescriptiveSummary {
        n: values.len(),
        mean: m,
        sample_std,
        cv: (m > 0.0).then(|| sample_std / m),
    })
}

/// A value tagged with the label it belongs to (country, automaker, year).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledValue {
    pub label: String,
    pub value: f64,
}

impl LabeledValue {
    pub fn new(label: impl Into<String>, value: f64) -> Self {
        Self {
            label: label.into(),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiveNumberSummary {
    pub n: usize,
    pub min: f64,
    pub lower_hinge: f64,
    pub median: f64,
    pub upper_hinge: f64,
    pub max: f64,
    pub iqr: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
    /// Points strictly outside the fences, sorted by value then label.
    pub outliers: Vec<LabeledValue>,
}

impl FiveNumberSummary {
    /// Smallest and largest values inside the fences (whisker ends).
    pub fn whiskers(&self, values: &[f64]) -> (f64, f64) {
        let inside = values
            .iter()
            .copied()
            .filter(|v| *v >= self.lower_fence && *v <= self.upper_fence);
        let lo = inside.clone().fold(f64::INFINITY, f64::min);
        let hi = inside.fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Tukey five-number summary. Hinges are medians of the lower and upper
/// halves, each half including the median when `n` is odd. Outliers lie
/// beyond `hinge -/+ 1.5 * IQR`.
pub fn five_number(series: &[LabeledValue]) -> Result<FiveNumberSummary, StatsError> {
    if series.len() < 3 {
        return Err(StatsError::TooFewPoints {
            needed: 3,
            got: series.len(),
        });
    }
    let mut sorted: Vec<f64> = series.iter().map(|p| p.value).collect();
    check_finite(&sorted)?;
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let half = n.div_ceil(2);
    let lower_hinge = median_of_sorted(&sorted[..half]);
    let upper_hinge = median_of_sorted(&sorted[n - half..]);
    let iqr = upper_hinge - lower_hinge;
    let lower_fence = lower_hinge - 1.5 * iqr;
    let upper_fence = upper_hinge + 1.5 * iqr;
    let mut outliers: Vec<LabeledValue> = series
        .iter()
        .filter(|p| p.value < lower_fence || p.value > upper_fence)
        .cloned()
        .collect();
    outliers.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.label.cmp(&b.label))
    });
    Ok(FiveNumberSummary {
        n,
        min: sorted[0],
        lower_hinge,
        median: median_of_sorted(&sorted),
        upper_hinge,
        max: sorted[n - 1],
        iqr,
        lower_fence,
        upper_fence,
        outliers,
    })
}

pub fn column_median(values: &[f64]) -> Result<f64, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptySeries);
    }
    check_finite(values)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(median_of_sorted(&sorted))
}

/// Centered sums of squares and cross-products.
struct Moments {
    sxx: f64,
    syy: f64,
    sxy: f64,
    mean_x: f64,
    mean_y: f64,
}

fn moments(x: &[f64], y: &[f64], min_points: usize) -> Result<Moments, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    if x.len() < min_points {
        return Err(StatsError::TooFewPoints {
            needed: min_points,
            got: x.len(),
        });
    }
    let mean_x = mean(x)?;
    let mean_y = mean(y)?;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mean_x, b - mean_y);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    // A constant series can leave rounding residue in the sums, so test it directly.
    let constant = |v: &[f64]| v.iter().all(|a| *a == v[0]);
    if sxx == 0.0 || constant(x) {
        return Err(StatsError::ZeroVariance("x"));
    }
    if syy == 0.0 || constant(y) {
        return Err(StatsError::ZeroVariance("y"));
    }
    Ok(Moments {
        sxx,
        syy,
        sxy,
        mean_x,
        mean_y,
    })
}

impl Moments {
    fn r2(&self) -> f64 {
        ((self.sxy * self.sxy) / (self.sxx * self.syy)).min(1.0)
    }
}

/// Squared Pearson correlation.
pub fn pearson_r2(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    moments(x, y, 3).map(|m| m.r2())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n: usize,
}

impl RegressionFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Ordinary least squares fit of `y = slope * x + intercept`; needs three points.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<RegressionFit, StatsError> {
    let m = moments(x, y, 3)?;
    let slope = m.sxy / m.sxx;
    Ok(RegressionFit {
        slope,
        intercept: m.mean_y - slope * m.mean_x,
        r2: m.r2(),
        n: x.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labeled(values: &[f64]) -> Vec<LabeledValue> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| LabeledValue::new(format!("p{i}"), *v))
            .collect()
    }

    #[test]
    fn describe_small_series() {
        let d = describe(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(d.mean, 2.0);
        assert_eq!(d.sample_std, 1.0);
        assert_eq!(d.cv, Some(0.5));
        assert_eq!(d.cv_percent(), Some(50));
    }

    #[test]
    fn describe_constant_and_degenerate() {
        let d = describe(&[5.0; 4]).unwrap();
        assert_eq!(d.sample_std, 0.0);
        assert_eq!(d.cv, Some(0.0));
        assert_eq!(mean(&[4.0]).unwrap(), 4.0);
        assert_eq!(
            describe(&[4.0]),
            Err(StatsError::TooFewPoints { needed: 2, got: 1 })
        );
        let neg = describe(&[-1.0, -2.0]).unwrap();
        assert!(matches!(
            neg.coefficient_of_variation(),
            Err(StatsError::NonPositiveMeanForCV(_))
        ));
    }

    #[test]
    fn five_number_symmetric() {
        let f = five_number(&labeled(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap();
        assert_eq!(
            (f.min, f.lower_hinge, f.median, f.upper_hinge, f.max),
            (1.0, 2.0, 3.0, 4.0, 5.0)
        );
        assert!(f.outliers.is_empty());
    }

    #[test]
    fn five_number_flags_spike() {
        let f = five_number(&labeled(&[0.0, 0.0, 0.0, 0.0, 100.0])).unwrap();
        assert_eq!(f.iqr, 0.0);
        assert_eq!(f.outliers, vec![LabeledValue::new("p4", 100.0)]);
    }

    #[test]
    fn five_number_even_length_halves() {
        let f = five_number(&labeled(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0])).unwrap();
        assert_eq!((f.lower_hinge, f.median, f.upper_hinge), (2.0, 3.5, 5.0));
    }

    #[test]
    fn five_number_needs_three_points() {
        assert!(matches!(
            five_number(&labeled(&[1.0, 2.0])),
            Err(StatsError::TooFewPoints { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn correlation_and_fit() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson_r2(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        let fit = ols_fit(&x, &x).unwrap();
        assert_eq!((fit.slope, fit.intercept, fit.r2), (1.0, 0.0, 1.0));
        assert_eq!(
            pearson_r2(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::ZeroVariance("x"))
        );
        assert_eq!(
            pearson_r2(&[1.0, 2.0], &[1.0]),
            Err(StatsError::LengthMismatch { x: 2, y: 1 })
        );
    }

    #[test]
    fn fit_needs_three_points() {
        let fit = ols_fit(&[0.0, 1.0, 2.0], &[0.0, 2.0, 4.0]).unwrap();
        assert_eq!((fit.slope, fit.intercept, fit.r2), (2.0, 0.0, 1.0));
        for two in [
            ols_fit(&[0.0, 1.0], &[0.0, 2.0]).err(),
            pearson_r2(&[0.0, 1.0], &[0.0, 2.0]).err(),
        ] {
            assert_eq!(two, Some(StatsError::TooFewPoints { needed: 3, got: 2 }));
        }
    }

    #[test]
    fn medians() {
        assert_eq!(column_median(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(column_median(&[4.0, 1.0, 3.0, 2.0]).unwrap(), 2.5);
        assert_eq!(column_median(&[]), Err(StatsError::EmptySeries));
    }
}
