//! Concentration indices over a ranked [`MarketSnapshot`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bands::{classify_cr4, classify_hhi, ConcentrationBand};
use crate::market::MarketSnapshot;

/// Concentration ratios always present in an [`IndexReport`].
pub const DEFAULT_CR_KS: [usize; 4] = [1, 3, 4, 8];

/// Denominators closer to zero than this are treated as degenerate.
const DEGENERATE_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("alpha must be a positive finite number, got {0}")]
    NonPositiveAlpha(f64),
    #[error("fraction of firms must be in (0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("Rosenbluth denominator {0} is not positive")]
    DegenerateDenominator(f64),
    #[error(transparent)]
    Band(#[from] crate::bands::BandError),
}

/// Result of [`concentration_ratio`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationRatio {
    pub k: usize,
    pub value: f64,
    /// `k` reached or exceeded the number of firms, so the ratio is 1.
    pub clamped: bool,
}

/// Combined share of the `k` largest firms.
pub fn concentration_ratio(
    snapshot: &MarketSnapshot,
    k: usize,
) -> Result<ConcentrationRatio, IndexError> {
    if k == 0 {
        return Err(IndexError::ZeroK);
    }
    if k >= snapshot.n() {
        return Ok(ConcentrationRatio {
            k,
            value: 1.0,
            clamped: true,
        });
    }
    Ok(ConcentrationRatio {
        k,
        value: snapshot.shares().take(k).sum(),
        clamped: false,
    })
}

/// Herfindahl-Hirschman index as a fraction, `sum(p^2)`.
pub fn hhi(snapshot: &MarketSnapshot) -> f64 {
    snapshot.shares().map(|p| p * p).sum()
}

/// HHI on the 0..=10000 points scale (shares expressed as percentages).
pub fn hhi_points(snapshot: &MarketSnapshot) -> f64 {
    hhi(snapshot) * 10_000.0
}

/// Generalised dominance function `sum(p^(2a)) / (sum(p^a))^2`.
///
/// `alpha = 1` gives the HHI, `alpha = 2` the dominance index.
pub fn dominance_general(snapshot: &MarketSnapshot, alpha: f64) -> Result<f64, IndexError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(IndexError::NonPositiveAlpha(alpha));
    }
    let (num, den) = snapshot.shares().fold((0.0, 0.0), |(num, den), p| {
        let pa = p.powf(alpha);
        (num + pa * pa, den + pa)
    });
    Ok(num / (den * den))
}

/// Dominance index, `sum(p^4) / (sum(p^2))^2`.
pub fn dominance_index(snapshot: &MarketSnapshot) -> f64 {
    let (num, den) = snapshot.shares().fold((0.0, 0.0), |(num, den), p| {
        let p2 = p * p;
        (num + p2 * p2, den + p2)
    });
    num / (den * den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RosenbluthVariant {
    /// Rank-weighted form `1 / (2 * sum(i * p_i) - 1)`, bounded by `[1/n, 1]`.
    #[default]
    Standard,
    /// `1 / (2 * CR_n - 1)` as commonly typeset; always 1 for a full market.
    PaperLiteral,
}

pub fn rosenbluth(
    snapshot: &MarketSnapshot,
    variant: RosenbluthVariant,
) -> Result<f64, IndexError> {
    let weighted = match variant {
        RosenbluthVariant::Standard => snapshot
            .shares()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum::<f64>(),
        RosenbluthVariant::PaperLiteral => concentration_ratio(snapshot, snapshot.n())?.value,
    };
    let denominator = 2.0 * weighted - 1.0;
    if denominator <= DEGENERATE_EPS {
        return Err(IndexError::DegenerateDenominator(denominator));
    }
    Ok(1.0 / denominator)
}

/// Horvath comprehensive concentration index,
/// `p_1 + sum_{i>=2} p_i^2 * (2 - p_i)`.
pub fn cci(snapshot: &MarketSnapshot) -> f64 {
    let mut shares = snapshot.shares();
    let leader = shares.next().unwrap_or(0.0);
    leader + shares.map(|p| p * p * (1.0 + (1.0 - p))).sum::<f64>()
}

/// Cumulative share of the top `ceil(fraction * n)` active firms.
///
/// Zero-share firms are excluded from `n`.
pub fn pareto_top_share(
    snapshot: &MarketSnapshot,
    fraction_of_firms: f64,
) -> Result<f64, IndexError> {
    if !(fraction_of_firms > 0.0 && fraction_of_firms <= 1.0) {
        return Err(IndexError::InvalidFraction(fraction_of_firms));
    }
    let active = snapshot.active_firms().max(1);
    let top = ((fraction_of_firms * active as f64).ceil() as usize).clamp(1, active);
    if top == active {
        return Ok(1.0);
    }
    Ok(snapshot.shares().take(top).sum())
}

/// Every index for one snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub market_id: String,
    pub period: String,
    pub n: usize,
    /// `CR_k` keyed by `k`; values for `k >= n` are 1.
    pub cr: BTreeMap<usize, f64>,
    pub hhi: f64,
    pub hhi_points: f64,
    pub di: f64,
    pub rosenbluth_standard: f64,
    pub rosenbluth_paper_literal: f64,
    pub cci: f64,
    pub pareto_top20: f64,
    pub hhi_band: ConcentrationBand,
    pub cr4_band: ConcentrationBand,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl IndexReport {
    pub fn cr(&self, k: usize) -> Option<f64> {
        self.cr.get(&k).copied()
    }
}

/// Computes an [`IndexReport`] with [`DEFAULT_CR_KS`].
pub fn index_report(snapshot: &MarketSnapshot) -> Result<IndexReport, IndexError> {
    index_report_with(snapshot, &DEFAULT_CR_KS)
}

/// Computes an [`IndexReport`] with the default ratios plus `extra_ks`.
pub fn index_report_with(
    snapshot: &MarketSnapshot,
    extra_ks: &[usize],
) -> Result<IndexReport, IndexError> {
    let mut notes: Vec<String> = snapshot.notes().to_vec();
    let mut cr = BTreeMap::new();
    let mut clamped = Vec::new();
    for &k in DEFAULT_CR_KS.iter().chain(extra_ks) {
        if cr.contains_key(&k) {
            continue;
        }
        let ratio = concentration_ratio(snapshot, k)?;
        if ratio.clamped {
            clamped.push(k);
        }
        cr.insert(k, ratio.value);
    }
    if !clamped.is_empty() {
        let ks: Vec<String> = clamped.iter().map(|k| format!("CR{k}")).collect();
        notes.push(format!(
            "{} clamped to 1: market has only {} firms",
            ks.join(", "),
            snapshot.n()
        ));
    }
    let h = hhi(snapshot);
    let points = hhi_points(snapshot);
    let cr4 = cr[&4];
    Ok(IndexReport {
        market_id: snapshot.market_id().to_string(),
        period: snapshot.period().to_string(),
        n: snapshot.n(),
        hhi: h,
        hhi_points: points,
        di: dominance_index(snapshot),
        rosenbluth_standard: rosenbluth(snapshot, RosenbluthVariant::Standard)?,
        rosenbluth_paper_literal: rosenbluth(snapshot, RosenbluthVariant::PaperLiteral)?,
        cci: cci(snapshot),
        pareto_top20: pareto_top_share(snapshot, 0.2)?,
        hhi_band: classify_hhi(points)?,
        cr4_band: classify_cr4((cr4 * 100.0).min(100.0))?,
        cr,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::RenormalizePolicy;

    fn snap(shares: &[f64]) -> MarketSnapshot {
        let entries = shares
            .iter()
            .enumerate()
            .map(|(i, &p)| (format!("F{i:02}"), p));
        MarketSnapshot::from_shares(entries, "m", "p", RenormalizePolicy::Strict).unwrap()
    }

    fn equal(n: usize) -> MarketSnapshot {
        MarketSnapshot::from_counts((0..n).map(|i| (format!("F{i:02}"), 1.0)), "m", "p").unwrap()
    }

    const DEMO: [f64; 4] = [0.4, 0.3, 0.2, 0.1];

    #[test]
    fn cr_sums_largest_shares() {
        let s = snap(&DEMO);
        let cr2 = concentration_ratio(&s, 2).unwrap();
        assert!((cr2.value - 0.7).abs() < 1e-15);
        assert!(!cr2.clamped);
        let cr4 = concentration_ratio(&s, 4).unwrap();
        assert_eq!(cr4.value, 1.0);
        assert!(cr4.clamped);
        assert_eq!(concentration_ratio(&s, 0), Err(IndexError::ZeroK));
        assert_eq!(concentration_ratio(&snap(&[1.0]), 1).unwrap().value, 1.0);
    }

    #[test]
    fn hhi_of_demo_and_extremes() {
        assert!((hhi(&snap(&DEMO)) - 0.30).abs() < 1e-15);
        assert!((hhi_points(&snap(&DEMO)) - 3000.0).abs() < 1e-9);
        assert_eq!(hhi(&snap(&[1.0])), 1.0);
        assert_eq!(hhi_points(&snap(&[1.0])), 10_000.0);
        for n in 1..=20 {
            assert!((hhi(&equal(n)) - 1.0 / n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn dominance_family() {
        let s = snap(&DEMO);
        assert!((dominance_general(&s, 1.0).unwrap() - hhi(&s)).abs() < 1e-12);
        assert_eq!(dominance_general(&snap(&[1.0]), 3.5).unwrap(), 1.0);
        assert!((dominance_general(&snap(&[0.5, 0.5]), 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((dominance_index(&s) - 0.0354 / 0.09).abs() < 1e-12);
        assert!((dominance_index(&s) - dominance_general(&s, 2.0).unwrap()).abs() < 1e-15);
        assert_eq!(dominance_index(&snap(&[1.0])), 1.0);
        assert!(matches!(
            dominance_general(&s, 0.0),
            Err(IndexError::NonPositiveAlpha(_))
        ));
        assert!(matches!(
            dominance_general(&s, f64::NAN),
            Err(IndexError::NonPositiveAlpha(_))
        ));
    }

    #[test]
    fn dominance_of_equal_firms_by_brute_force() {
        for n in 1..=10 {
            let p = 1.0 / n as f64;
            let num: f64 = (0..n).map(|_| p.powi(4)).sum();
            let den: f64 = (0..n).map(|_| p.powi(2)).sum();
            let di = dominance_index(&equal(n));
            assert!((di - num / (den * den)).abs() < 1e-12);
            assert!((di - p).abs() < 1e-12);
        }
    }

    #[test]
    fn rosenbluth_variants() {
        assert_eq!(
            rosenbluth(&snap(&[1.0]), RosenbluthVariant::Standard).unwrap(),
            1.0
        );
        for n in 1..=10 {
            let weighted: f64 = (1..=n).map(|i| i as f64 / n as f64).sum();
            let b = rosenbluth(&equal(n), RosenbluthVariant::Standard).unwrap();
            assert!((b - 1.0 / (2.0 * weighted - 1.0)).abs() < 1e-12);
            assert!((b - 1.0 / n as f64).abs() < 1e-12);
        }
        let s = snap(&DEMO);
        // 2 * (0.4 + 0.6 + 0.6 + 0.4) - 1 = 3
        assert!((rosenbluth(&s, RosenbluthVariant::Standard).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            rosenbluth(&s, RosenbluthVariant::PaperLiteral).unwrap(),
            1.0
        );
    }

    #[test]
    fn cci_hand_values() {
        assert_eq!(cci(&snap(&[1.0])), 1.0);
        assert!((cci(&snap(&[0.5, 0.5])) - 0.875).abs() < 1e-15);
        let expected = 0.4 + 0.09 * 1.7 + 0.04 * 1.8 + 0.01 * 1.9;
        assert!((cci(&snap(&DEMO)) - expected).abs() < 1e-15);
        assert!((cci(&snap(&DEMO)) - 0.644).abs() < 1e-12);
    }

    #[test]
    fn pareto_share() {
        assert!((pareto_top_share(&equal(10), 0.2).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(pareto_top_share(&snap(&[1.0]), 0.2).unwrap(), 1.0);
        assert_eq!(pareto_top_share(&snap(&DEMO), 0.25).unwrap(), 0.4);
        assert!(pareto_top_share(&snap(&DEMO), 0.0).is_err());
        assert!(pareto_top_share(&snap(&DEMO), 1.5).is_err());
    }

    #[test]
    fn report_of_demo() {
        let r = index_report(&snap(&DEMO)).unwrap();
        assert_eq!(r.cr(4), Some(1.0));
        assert_eq!(r.cr(8), Some(1.0));
        assert!((r.hhi - 0.30).abs() < 1e-12);
        assert!((r.cci - 0.644).abs() < 1e-12);
        assert!((r.di - 0.393_333).abs() < 1e-6);
        assert!((r.rosenbluth_standard - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.hhi_band, ConcentrationBand::HighlyConcentrated);
        assert!(r.notes.iter().any(|n| n.contains("clamped")));
    }

    #[test]
    fn report_of_monopoly_is_all_ones() {
        let r = index_report(&snap(&[1.0])).unwrap();
        for v in r.cr.values() {
            assert_eq!(*v, 1.0);
        }
        assert_eq!(
            [
                r.hhi,
                r.di,
                r.rosenbluth_standard,
                r.rosenbluth_paper_literal,
                r.cci,
                r.pareto_top20
            ],
            [1.0; 6]
        );
        assert_eq!(r.hhi_points, 10_000.0);
        assert_eq!(r.hhi_band, ConcentrationBand::HighlyConcentrated);
        assert_eq!(r.cr4_band, ConcentrationBand::HighlyConcentrated);
    }

    #[test]
    fn report_of_five_equal_firms() {
        let r = index_report(&equal(5)).unwrap();
        assert!((r.hhi - 0.2).abs() < 1e-15);
        assert!((r.di - 0.2).abs() < 1e-15);
        assert!((r.rosenbluth_standard - 0.2).abs() < 1e-15);
    }
}
