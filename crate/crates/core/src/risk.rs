//! Spatial risk field: zero at the caution boundary, one at the critical
//! boundary, linear in between, saturated outside that band.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{Corridor, ScenarioError, ScenarioSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    #[error("caution padding must be > 0, got {0}")]
    NonPositivePadding(f64),
    #[error("risk profile needs at least 2 stations, got {0}")]
    TooFewStations(usize),
    #[error("lookahead must be > 0, got {0}")]
    NonPositiveLookahead(f64),
    #[error("no road left ahead of x = {0} m for a profile")]
    NoRoadAhead(f64),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Risk on both sides of a point, with signed distances to the critical
/// boundaries (positive inside the drivable region).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskSample {
    pub r_left: f64,
    pub r_right: f64,
    pub d_left: f64,
    pub d_right: f64,
}

impl RiskSample {
    pub fn level(&self) -> f64 {
        self.r_left.max(self.r_right)
    }
}

/// `clamp(1 - d / p, 0, 1)` for distance `d` to a critical boundary and
/// padding `p`.
pub fn risk_from_distance(d: f64, padding: f64) -> Result<f64, RiskError> {
    if padding.is_nan() || padding <= 0.0 {
        return Err(RiskError::NonPositivePadding(padding));
    }
    Ok(ramp(d, padding))
}

/// Saturated ramp. The interior branch is kept strictly inside (0, 1) so
/// that `r == 1` iff `d <= 0` and `r == 0` iff `d >= padding`, even where
/// `1 - d/p` would round onto an endpoint.
#[inline]
fn ramp(d: f64, padding: f64) -> f64 {
    const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;
    const ABOVE_ZERO: f64 = f64::EPSILON / 2.0;
    if d <= 0.0 {
        1.0
    } else if d >= padding {
        0.0
    } else {
        (1.0 - d / padding).clamp(ABOVE_ZERO, BELOW_ONE)
    }
}

/// Risk of a point given an already evaluated corridor.
pub fn risk_in_corridor(corridor: &Corridor, y: f64, padding: f64) -> RiskSample {
    let d_left = corridor.left_critical - y;
    let d_right = y - corridor.right_critical;
    RiskSample {
        r_left: ramp(d_left, padding),
        r_right: ramp(d_right, padding),
        d_left,
        d_right,
    }
}

pub fn risk_at(spec: &ScenarioSpec, x: f64, y: f64) -> Result<RiskSample, RiskError> {
    let corridor = spec.corridor_at(x)?;
    Ok(risk_in_corridor(&corridor, y, spec.caution_padding))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileStation {
    pub x: f64,
    pub corridor: Corridor,
    /// Risk the current lateral position would have at this station.
    pub risk_at_marker: RiskSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskProfile {
    pub stations: Vec<ProfileStation>,
    pub lookahead: f64,
    pub sample_count: usize,
}

/// Sample the corridor ahead of `(x, y)` at `n` evenly spaced stations up to
/// `x + lookahead` (or the road end, whichever comes first).
pub fn risk_profile(spec: &ScenarioSpec, x: f64, y: f64, lookahead: f64, n: usize) -> Result<RiskProfile, RiskError> {
    if n < 2 {
        return Err(RiskError::TooFewStations(n));
    }
    if lookahead.is_nan() || lookahead <= 0.0 {
        return Err(RiskError::NonPositiveLookahead(lookahead));
    }
    spec.check_on_road(x)?;
    let end = (x + lookahead).min(spec.road_length);
    if end <= x {
        return Err(RiskError::NoRoadAhead(x));
    }
    let span = end - x;
    let last = (n - 1) as f64;
    let stations = (0..n)
        .map(|i| {
            // pin the last station to `end` exactly
            let sx = if i == n - 1 { end } else { x + span * (i as f64) / last };
            let corridor = spec.corridor_at(sx)?;
            Ok(ProfileStation {
                x: sx,
                corridor,
                risk_at_marker: risk_in_corridor(&corridor, y, spec.caution_padding),
            })
        })
        .collect::<Result<Vec<_>, RiskError>>()?;
    Ok(RiskProfile {
        stations,
        lookahead,
        sample_count: n,
    })
}
