//! Market snapshots: ranked vectors of firm shares.
//!
//! A [`MarketSnapshot`] is the unit every index is computed over. Construction
//! goes through [`MarketSnapshot::from_counts`] or [`MarketSnapshot::from_shares`],
//! which validate the input, normalize it to shares summing to one and rank
//! firms by descending share (ties by ascending firm id).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest tolerated drift of a share vector's sum away from one.
pub const SHARE_SUM_TOLERANCE: f64 = 5e-3;

/// Share sums this close to one are left untouched.
const EXACT_SUM_SLACK: f64 = 1e-12;

/// Firm id conventionally used for an aggregate "everyone else" row.
pub const OTHERS_ID: &str = "OTHERS";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarketError {
    #[error("market has no firms")]
    Empty,
    #[error("every count is zero; shares are undefined")]
    AllZeroTotal,
    #[error("firm `{firm}` has negative count {value}")]
    NegativeCount { firm: String, value: f64 },
    #[error("firm `{firm}` has negative share {value}")]
    NegativeShare { firm: String, value: f64 },
    #[error("firm `{firm}` has non-finite value")]
    NonFinite { firm: String },
    #[error("shares sum to {sum}, more than {SHARE_SUM_TOLERANCE} away from 1")]
    SharesDoNotSum { sum: f64 },
    #[error("firm id is empty")]
    EmptyFirmId,
    #[error("firm `{0}` appears more than once")]
    DuplicateFirm(String),
}

/// A firm and its fraction of the market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirmShare {
    pub firm_id: String,
    pub share: f64,
}

/// What to do with a share vector that does not sum to exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenormalizePolicy {
    /// Renormalize when the sum is within [`SHARE_SUM_TOLERANCE`] of one, reject otherwise.
    #[default]
    Strict,
    /// Renormalize any positive sum.
    Always,
}

/// One market in one period, firms ranked by descending share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketSnapshot {
    market_id: String,
    period: String,
    firms: Vec<FirmShare>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

impl MarketSnapshot {
    /// Builds a snapshot from raw quantities (production, sales, licences).
    pub fn from_counts<I, S>(
        counts: I,
        market_id: impl Into<String>,
        period: impl Into<String>,
    ) -> Result<Self, MarketError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let entries = canonical_entries(counts, |firm, value| MarketError::NegativeCount {
            firm,
            value,
        })?;
        let total: f64 = entries.iter().map(|(_, v)| v).sum();
        if total <= 0.0 {
            return Err(MarketError::AllZeroTotal);
        }
        let firms = entries
            .into_iter()
            .map(|(firm_id, count)| FirmShare {
                firm_id,
                share: count / total,
            })
            .collect();
        Ok(Self::ranked(
            market_id.into(),
            period.into(),
            firms,
            Vec::new(),
        ))
    }

    /// Builds a snapshot from fractions that should already sum to one.
    pub fn from_shares<I, S>(
        shares: I,
        market_id: impl Into<String>,
        period: impl Into<String>,
        policy: RenormalizePolicy,
    ) -> Result<Self, MarketError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let entries = canonical_entries(shares, |firm, value| MarketError::NegativeShare {
            firm,
            value,
        })?;
        let sum: f64 = entries.iter().map(|(_, v)| v).sum();
        if sum <= 0.0 {
            return Err(MarketError::AllZeroTotal);
        }
        let drift = (sum - 1.0).abs();
        if policy == RenormalizePolicy::Strict && drift > SHARE_SUM_TOLERANCE {
            return Err(MarketError::SharesDoNotSum { sum });
        }
        let mut notes = Vec::new();
        let firms = if drift <= EXACT_SUM_SLACK {
            entries
                .into_iter()
                .map(|(firm_id, share)| FirmShare { firm_id, share })
                .collect()
        } else {
            notes.push(format!("shares summed to {sum}; renormalized to 1"));
            entries
                .into_iter()
                .map(|(firm_id, share)| FirmShare {
                    firm_id,
                    share: share / sum,
                })
                .collect()
        };
        Ok(Self::ranked(market_id.into(), period.into(), firms, notes))
    }

    /// Rebuilds a snapshot from shares already known to sum to one
    /// (e.g. after merging two firms). Ranks but does not renormalize.
    pub(crate) fn from_ranked_parts(
        market_id: String,
        period: String,
        firms: Vec<FirmShare>,
        notes: Vec<String>,
    ) -> Self {
        Self::ranked(market_id, period, firms, notes)
    }

    fn ranked(
        market_id: String,
        period: String,
        mut firms: Vec<FirmShare>,
        mut notes: Vec<String>,
    ) -> Self {
        firms.sort_by(rank_order);
        if firms
            .iter()
            .any(|f| f.firm_id.eq_ignore_ascii_case(OTHERS_ID))
        {
            notes.push(format!(
                "`{OTHERS_ID}` is an aggregate of several firms treated as one; \
                 rank-based indices are biased upward"
            ));
        }
        Self {
            market_id,
            period,
            firms,
            notes,
        }
    }

    pub fn market_id(&self) -> &str {
        &self.market_id
    }

    pub fn period(&self) -> &str {
        &self.period
    }

    /// Firms in rank order (largest share first).
    pub fn firms(&self) -> &[FirmShare] {
        &self.firms
    }

    /// Shares in rank order.
    pub fn shares(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.firms.iter().map(|f| f.share)
    }

    /// Number of firms, including zero-share firms.
    pub fn n(&self) -> usize {
        self.firms.len()
    }

    /// Number of firms with a strictly positive share.
    pub fn active_firms(&self) -> usize {
        self.firms.iter().filter(|f| f.share > 0.0).count()
    }

    pub fn share_of(&self, firm_id: &str) -> Option<f64> {
        self.firms
            .iter()
            .find(|f| f.firm_id == firm_id)
            .map(|f| f.share)
    }

    /// Advisory notes attached during construction (renormalization, aggregates).
    pub fn notes(&self) -> &[String] {
        &self.notes
    }
}

/// Descending share, then ascending firm id.
fn rank_order(a: &FirmShare, b: &FirmShare) -> Ordering {
    b.share
        .total_cmp(&a.share)
        .then_with(|| a.firm_id.cmp(&b.firm_id))
}

/// Validates raw entries and returns them sorted by firm id, so that sums are
/// taken in an order independent of the caller's iteration order.
fn canonical_entries<I, S>(
    entries: I,
    negative: impl Fn(String, f64) -> MarketError,
) -> Result<Vec<(String, f64)>, MarketError>
where
    I: IntoIterator<Item = (S, f64)>,
    S: Into<String>,
{
    let mut map = BTreeMap::new();
    for (firm, value) in entries {
        let firm = firm.into();
        if firm.trim().is_empty() {
            return Err(MarketError::EmptyFirmId);
        }
        if !value.is_finite() {
            return Err(MarketError::NonFinite { firm });
        }
        if value < 0.0 {
            return Err(negative(firm, value));
        }
        if map.insert(firm.clone(), value).is_some() {
            return Err(MarketError::DuplicateFirm(firm));
        }
    }
    if map.is_empty() {
        return Err(MarketError::Empty);
    }
    Ok(map.into_iter().collect())
}
