//! Social value orientation of non-participants.
//!
//! The orientation angle of the vector `(alpha, beta)`: own outside payoff
//! against the payoff handed to participants.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub const ALTRUISTIC_MIN_DEG: f64 = 57.15;
pub const PROSOCIAL_MIN_DEG: f64 = 22.45;
pub const INDIVIDUALISTIC_MIN_DEG: f64 = -12.04;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SvoLabel {
    Altruistic,
    Prosocial,
    Individualistic,
    Competitive,
}

impl SvoLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SvoLabel::Altruistic => "altruistic",
            SvoLabel::Prosocial => "prosocial",
            SvoLabel::Individualistic => "individualistic",
            SvoLabel::Competitive => "competitive",
        }
    }
}

impl fmt::Display for SvoLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SvoClass {
    pub theta_deg: f64,
    pub label: SvoLabel,
    /// `|theta| > 90` (negative outside payoff). The four categories are only
    /// defined for `theta` in `[-90, 90]`; such angles are labelled by
    /// extending the outer categories.
    pub extrapolated: bool,
}

/// Classify `(alpha, beta)` by its quadrant-aware orientation angle. Boundary
/// angles belong to the more altruistic neighbour.
pub fn classify_svo(alpha: f64, beta: f64) -> Result<SvoClass> {
    if alpha == 0.0 && beta == 0.0 {
        return Err(Error::UndefinedOrientation);
    }
    let theta_deg = beta.atan2(alpha).to_degrees();
    let label = if theta_deg >= ALTRUISTIC_MIN_DEG {
        SvoLabel::Altruistic
    } else if theta_deg >= PROSOCIAL_MIN_DEG {
        SvoLabel::Prosocial
    } else if theta_deg >= INDIVIDUALISTIC_MIN_DEG {
        SvoLabel::Individualistic
    } else {
        SvoLabel::Competitive
    };
    Ok(SvoClass {
        theta_deg,
        label,
        extrapolated: theta_deg.abs() > 90.0,
    })
}
