//! Classification bands for HHI points and four-firm concentration ratios.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack for values pushed past a bound by floating-point rounding.
const ROUNDING_SLACK: f64 = 1e-9;

pub const HHI_MODERATE_FROM: f64 = 1500.0;
pub const HHI_MODERATE_TO: f64 = 2500.0;
pub const CR4_MODERATE_ABOVE: f64 = 45.0;
pub const CR4_MODERATE_TO: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcentrationBand {
    Unconcentrated,
    ModeratelyConcentrated,
    HighlyConcentrated,
}

impl fmt::Display for ConcentrationBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConcentrationBand::Unconcentrated => "unconcentrated",
            ConcentrationBand::ModeratelyConcentrated => "moderately concentrated",
            ConcentrationBand::HighlyConcentrated => "highly concentrated",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BandError {
    #[error("HHI of {0} points is outside (0, 10000]")]
    HhiOutOfRange(f64),
    #[error("CR4 of {0}% is outside [0, 100]")]
    Cr4OutOfRange(f64),
}

/// Bands on the points scale: below 1500, 1500 through 2500, above 2500.
pub fn classify_hhi(points: f64) -> Result<ConcentrationBand, BandError> {
    if !(points > 0.0 && points <= 10_000.0 + ROUNDING_SLACK) {
        return Err(BandError::HhiOutOfRange(points));
    }
    Ok(if points < HHI_MODERATE_FROM {
        ConcentrationBand::Unconcentrated
    } else if points <= HHI_MODERATE_TO {
        ConcentrationBand::ModeratelyConcentrated
    } else {
        ConcentrationBand::HighlyConcentrated
    })
}

/// Bands on CR4 in percent: up to 45, above 45 through 60, above 60.
pub fn classify_cr4(cr4_percent: f64) -> Result<ConcentrationBand, BandError> {
    if !(0.0..=100.0 + ROUNDING_SLACK).contains(&cr4_percent) {
        return Err(BandError::Cr4OutOfRange(cr4_percent));
    }
    Ok(if cr4_percent <= CR4_MODERATE_ABOVE {
        ConcentrationBand::Unconcentrated
    } else if cr4_percent <= CR4_MODERATE_TO {
        ConcentrationBand::ModeratelyConcentrated
    } else {
        ConcentrationBand::HighlyConcentrated
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConcentrationBand::*;

    #[test]
    fn hhi_bands() {
        assert_eq!(classify_hhi(1463.0), Ok(Unconcentrated));
        assert_eq!(classify_hhi(1499.999), Ok(Unconcentrated));
        assert_eq!(classify_hhi(1500.0), Ok(ModeratelyConcentrated));
        assert_eq!(classify_hhi(2500.0), Ok(ModeratelyConcentrated));
        assert_eq!(classify_hhi(2600.0), Ok(HighlyConcentrated));
        assert_eq!(classify_hhi(10_000.0), Ok(HighlyConcentrated));
        assert!(classify_hhi(0.0).is_err());
        assert!(classify_hhi(10_001.0).is_err());
        assert!(classify_hhi(f64::NAN).is_err());
    }

    #[test]
    fn cr4_bands() {
        assert_eq!(classify_cr4(53.755), Ok(ModeratelyConcentrated));
        assert_eq!(classify_cr4(70.508), Ok(HighlyConcentrated));
        assert_eq!(classify_cr4(45.0), Ok(Unconcentrated));
        assert_eq!(classify_cr4(60.0), Ok(ModeratelyConcentrated));
        assert_eq!(classify_cr4(60.0001), Ok(HighlyConcentrated));
        assert_eq!(classify_cr4(0.0), Ok(Unconcentrated));
        assert!(classify_cr4(-1.0).is_err());
        assert!(classify_cr4(101.0).is_err());
    }
}
