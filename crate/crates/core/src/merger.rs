//! Horizontal-merger screening on pre- and post-merger HHI.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indices::hhi;
use crate::market::{FirmShare, MarketSnapshot};

/// Post-merger HHI below which the market is still considered dispersed.
pub const DEVOLVED_BELOW: f64 = 0.1;
/// Post-merger HHI from which the market counts as already concentrated.
pub const CONCENTRATED_FROM: f64 = 0.18;
/// Default maximum HHI increase for the moderately-concentrated rule.
pub const DEFAULT_MODERATE_DELTA: f64 = 0.1;
/// Maximum HHI increase for the already-concentrated rule.
pub const CONCENTRATED_DELTA: f64 = 0.005;

/// Tolerated negative delta from rounding when HHI is recomputed after a merger.
const ORDER_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MergerError {
    #[error("firm `{0}` is not in the market")]
    UnknownFirm(String),
    #[error("cannot merge firm `{0}` with itself")]
    SameFirm(String),
    #[error("post-merger HHI {h1} is below pre-merger HHI {h0}")]
    InvalidOrder { h0: f64, h1: f64 },
    #[error("HHI {0} is outside (0, 1]")]
    OutOfRange(f64),
    #[error("rule (b) delta threshold {0} must be in (0, 1]")]
    InvalidThreshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergerRule {
    /// Post-merger HHI under 0.1: the market stays dispersed.
    Devolved,
    /// Post-merger HHI in [0.1, 0.18) with a small increase.
    SmallIncrease,
    /// Post-merger HHI at least 0.18 but the increase is negligible.
    NoCausalNexus,
    /// None of the safe-harbour rules apply.
    FlaggedForReview,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergerVerdict {
    pub h0: f64,
    pub h1: f64,
    pub delta: f64,
    pub rule: MergerRule,
}

/// Thresholds for [`MergerScreen::screen`]. Only the rule (b) delta is tunable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergerScreen {
    moderate_delta: f64,
}

impl Default for MergerScreen {
    fn default() -> Self {
        Self {
            moderate_delta: DEFAULT_MODERATE_DELTA,
        }
    }
}

impl MergerScreen {
    /// Overrides the maximum HHI increase accepted in the moderate band
    /// (antitrust practice commonly uses 0.01).
    pub fn with_moderate_delta(delta: f64) -> Result<Self, MergerError> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(MergerError::InvalidThreshold(delta));
        }
        Ok(Self {
            moderate_delta: delta,
        })
    }

    pub fn moderate_delta(&self) -> f64 {
        self.moderate_delta
    }

    pub fn screen(&self, h0: f64, h1: f64) -> Result<MergerVerdict, MergerError> {
        for h in [h0, h1] {
            if !(h > 0.0 && h <= 1.0 + ORDER_SLACK) {
                return Err(MergerError::OutOfRange(h));
            }
        }
        if h1 < h0 - ORDER_SLACK {
            return Err(MergerError::InvalidOrder { h0, h1 });
        }
        Ok(self.classify(h0, h1))
    }

    fn classify(&self, h0: f64, h1: f64) -> MergerVerdict {
        let delta = h1 - h0;
        let rule = if h1 < DEVOLVED_BELOW {
            MergerRule::Devolved
        } else if h1 < CONCENTRATED_FROM && delta < self.moderate_delta {
            MergerRule::SmallIncrease
        } else if h1 >= CONCENTRATED_FROM && delta < CONCENTRATED_DELTA {
            MergerRule::NoCausalNexus
        } else {
            MergerRule::FlaggedForReview
        };
        MergerVerdict {
            h0,
            h1,
            delta,
            rule,
        }
    }

    /// Merges two firms of `snapshot` into one and screens the result.
    ///
    /// The merged firm is named `"{firm_a}+{firm_b}"`.
    pub fn merge_firms(
        &self,
        snapshot: &MarketSnapshot,
        firm_a: &str,
        firm_b: &str,
    ) -> Result<(MarketSnapshot, MergerVerdict), MergerError> {
        if firm_a == firm_b {
            return Err(MergerError::SameFirm(firm_a.to_string()));
        }
        let share_a = snapshot
            .share_of(firm_a)
            .ok_or_else(|| MergerError::UnknownFirm(firm_a.to_string()))?;
        let share_b = snapshot
            .share_of(firm_b)
            .ok_or_else(|| MergerError::UnknownFirm(firm_b.to_string()))?;

        let mut firms: Vec<FirmShare> = snapshot
            .firms()
            .iter()
            .filter(|f| f.firm_id != firm_a && f.firm_id != firm_b)
            .cloned()
            .collect();
        firms.push(FirmShare {
            firm_id: format!("{firm_a}+{firm_b}"),
            share: share_a + share_b,
        });
        let merged = MarketSnapshot::from_ranked_parts(
            snapshot.market_id().to_string(),
            snapshot.period().to_string(),
            firms,
            Vec::new(),
        );
        let verdict = self.screen(hhi(snapshot), hhi(&merged))?;
        Ok((merged, verdict))
    }
}

/// Screens with the default thresholds.
pub fn merger_screen(h0: f64, h1: f64) -> Result<MergerVerdict, MergerError> {
    MergerScreen::default().screen(h0, h1)
}

/// Merges two firms and screens with the default thresholds.
pub fn merge_firms(
    snapshot: &MarketSnapshot,
    firm_a: &str,
    firm_b: &str,
) -> Result<(MarketSnapshot, MergerVerdict), MergerError> {
    MergerScreen::default().merge_firms(snapshot, firm_a, firm_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::RenormalizePolicy;

    fn snap(entries: &[(&str, f64)]) -> MarketSnapshot {
        MarketSnapshot::from_shares(entries.iter().copied(), "m", "p", RenormalizePolicy::Strict)
            .unwrap()
    }

    #[test]
    fn rules_a_to_c() {
        assert_eq!(
            merger_screen(0.07, 0.08).unwrap().rule,
            MergerRule::Devolved
        );
        assert_eq!(
            merger_screen(0.12, 0.15).unwrap().rule,
            MergerRule::SmallIncrease
        );
        assert_eq!(
            merger_screen(0.20, 0.203).unwrap().rule,
            MergerRule::NoCausalNexus
        );
        assert_eq!(
            merger_screen(0.20, 0.30).unwrap().rule,
            MergerRule::FlaggedForReview
        );
        assert_eq!(
            merger_screen(0.17, 0.179).unwrap().rule,
            MergerRule::SmallIncrease
        );
        assert_eq!(
            merger_screen(0.10, 0.18).unwrap().rule,
            MergerRule::FlaggedForReview
        );
    }

    #[test]
    fn rule_coverage_over_threshold_grid() {
        // Independent restatement of the rule table, checked on a grid.
        let screen = MergerScreen::default();
        for i in 1..=100 {
            for j in i..=100 {
                let (h0, h1) = (i as f64 / 100.0, j as f64 / 100.0);
                let d = h1 - h0;
                let expected = if h1 < 0.1 {
                    MergerRule::Devolved
                } else if (0.1..0.18).contains(&h1) && d < 0.1 {
                    MergerRule::SmallIncrease
                } else if h1 >= 0.18 && d < 0.005 {
                    MergerRule::NoCausalNexus
                } else {
                    MergerRule::FlaggedForReview
                };
                assert_eq!(screen.screen(h0, h1).unwrap().rule, expected, "{h0} {h1}");
            }
        }
    }

    #[test]
    fn tighter_rule_b_threshold() {
        let strict = MergerScreen::with_moderate_delta(0.01).unwrap();
        assert_eq!(
            strict.screen(0.12, 0.15).unwrap().rule,
            MergerRule::FlaggedForReview
        );
        assert!(MergerScreen::with_moderate_delta(0.0).is_err());
    }

    #[test]
    fn screen_rejects_decreasing_hhi() {
        assert!(matches!(
            merger_screen(0.3, 0.2),
            Err(MergerError::InvalidOrder { .. })
        ));
        assert!(matches!(
            merger_screen(0.0, 0.2),
            Err(MergerError::OutOfRange(_))
        ));
    }

    #[test]
    fn merge_two_smallest() {
        let s = snap(&[("A", 0.4), ("B", 0.3), ("C", 0.2), ("D", 0.1)]);
        let (post, v) = merge_firms(&s, "C", "D").unwrap();
        assert!((v.delta - 2.0 * 0.2 * 0.1).abs() < 1e-12);
        assert!((v.h1 - 0.34).abs() < 1e-12);
        assert_eq!(post.n(), 3);
        assert!(post.firms().windows(2).all(|w| w[0].share >= w[1].share));
        assert!((post.share_of("C+D").unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(v.rule, MergerRule::FlaggedForReview);
    }

    #[test]
    fn merge_to_monopoly() {
        let s = snap(&[("A", 0.5), ("B", 0.5)]);
        let (post, v) = merge_firms(&s, "A", "B").unwrap();
        assert_eq!(post.n(), 1);
        assert_eq!(v.h1, 1.0);
        assert_eq!(v.delta, 0.5);
        assert_eq!(v.rule, MergerRule::FlaggedForReview);
    }

    #[test]
    fn merge_zero_share_firms() {
        let s = snap(&[("A", 1.0), ("Y", 0.0), ("Z", 0.0)]);
        let (_, v) = merge_firms(&s, "Y", "Z").unwrap();
        assert_eq!(v.delta, 0.0);
    }

    #[test]
    fn merge_errors() {
        let s = snap(&[("A", 0.5), ("B", 0.5)]);
        assert_eq!(
            merge_firms(&s, "A", "Q").unwrap_err(),
            MergerError::UnknownFirm("Q".into())
        );
        assert_eq!(
            merge_firms(&s, "A", "A").unwrap_err(),
            MergerError::SameFirm("A".into())
        );
    }
}
