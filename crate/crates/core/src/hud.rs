//! Semantic HUD frame: risk bands ahead of the car, the car marker and its
//! zone, plus the four-option anticipation questions built from it.
//!
//! Nothing here knows about colors or pixels. A renderer maps
//! [`ZoneClass::level`] to a yellow-to-red gradient and hides the whole layer
//! when [`HudState::enabled`] is false.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::risk::{risk_in_corridor, risk_profile, RiskError, RiskSample};
use crate::scenario::{Corridor, ScenarioSpec};
use crate::vehicle::VehicleState;

/// Minimum band difference for two options to count as different pictures.
pub const BAND_TOLERANCE: f64 = 0.2;
/// Smallest boundary shift used for geometry distractors.
pub const MIN_GEOMETRY_SHIFT: f64 = 0.5;
pub const OPTION_COUNT: usize = 4;
const MAX_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HudError {
    #[error(transparent)]
    Risk(#[from] RiskError),
    #[error("could not build {OPTION_COUNT} distinct options after {MAX_ATTEMPTS} attempts")]
    DegenerateQuestion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZoneKind {
    Safe,
    Caution,
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZoneSide {
    None,
    Left,
    Right,
    Both,
}

impl ZoneKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ZoneKind::Safe => "safe",
            ZoneKind::Caution => "caution",
            ZoneKind::Critical => "critical",
        }
    }
}

impl ZoneSide {
    pub fn as_str(self) -> &'static str {
        match self {
            ZoneSide::None => "none",
            ZoneSide::Left => "left",
            ZoneSide::Right => "right",
            ZoneSide::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneClass {
    pub kind: ZoneKind,
    pub side: ZoneSide,
    /// max(r_left, r_right)
    pub level: f64,
}

pub fn zone_of(risk: &RiskSample) -> ZoneClass {
    let level = risk.r_left.max(risk.r_right);
    let kind = if level <= 0.0 {
        ZoneKind::Safe
    } else if level >= 1.0 {
        ZoneKind::Critical
    } else {
        ZoneKind::Caution
    };
    let side = match (risk.r_left > 0.0, risk.r_right > 0.0) {
        (false, false) => ZoneSide::None,
        (true, false) => ZoneSide::Left,
        (false, true) => ZoneSide::Right,
        (true, true) => ZoneSide::Both,
    };
    ZoneClass { kind, side, level }
}

fn default_lookahead() -> f64 {
    50.0
}
fn default_station_count() -> usize {
    16
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HudConfig {
    #[serde(default = "default_lookahead")]
    pub lookahead: f64,
    #[serde(default = "default_station_count")]
    pub stations: usize,
}

impl Default for HudConfig {
    fn default() -> Self {
        HudConfig {
            lookahead: default_lookahead(),
            stations: default_station_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HudStation {
    /// Distance ahead of the car, m.
    pub x_ahead: f64,
    pub band: Corridor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HudState {
    pub enabled: bool,
    pub stations: Vec<HudStation>,
    pub marker_y: f64,
    pub marker_zone: ZoneClass,
    pub r_left: f64,
    pub r_right: f64,
}

impl HudState {
    /// True when two frames would read as different answers: another zone
    /// kind or side, or bands that differ by more than [`BAND_TOLERANCE`].
    pub fn semantically_differs(&self, other: &HudState) -> bool {
        if self.marker_zone.kind != other.marker_zone.kind || self.marker_zone.side != other.marker_zone.side {
            return true;
        }
        if self.stations.len() != other.stations.len() {
            return true;
        }
        self.stations
            .iter()
            .zip(&other.stations)
            .any(|(a, b)| a.band.max_abs_diff(&b.band) > BAND_TOLERANCE)
    }
}

/// Compose the HUD frame for `state`. Disabled frames still carry the
/// marker zone (it is logged) but no bands.
pub fn hud_state(
    spec: &ScenarioSpec,
    state: &VehicleState,
    enabled: bool,
    config: &HudConfig,
) -> Result<HudState, RiskError> {
    let corridor = spec.corridor_at(state.x)?;
    let risk = risk_in_corridor(&corridor, state.y, spec.caution_padding);
    let stations = if enabled {
        risk_profile(spec, state.x, state.y, config.lookahead, config.stations)?
            .stations
            .into_iter()
            .map(|s| HudStation {
                x_ahead: s.x - state.x,
                band: s.corridor,
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(HudState {
        enabled,
        stations,
        marker_y: state.y,
        marker_zone: zone_of(&risk),
        r_left: risk.r_left,
        r_right: risk.r_right,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnticipationQuestion {
    pub frozen: VehicleState,
    pub road_length: f64,
    pub road_width: f64,
    pub options: Vec<HudState>,
    pub correct_index: usize,
}

impl AnticipationQuestion {
    pub fn correct(&self) -> &HudState {
        &self.options[self.correct_index]
    }

    pub fn distractors(&self) -> impl Iterator<Item = &HudState> {
        self.options
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.correct_index)
            .map(|(_, o)| o)
    }
}

/// Re-derive the marker zone of `frame` from its own first band.
fn with_marker(frame: &HudState, marker_y: f64, padding: f64) -> HudState {
    let band = frame.stations[0].band;
    let risk = risk_in_corridor(&band, marker_y, padding);
    HudState {
        marker_y,
        marker_zone: zone_of(&risk),
        r_left: risk.r_left,
        r_right: risk.r_right,
        ..frame.clone()
    }
}

fn map_bands(frame: &HudState, f: impl Fn(&Corridor) -> Corridor) -> HudState {
    HudState {
        stations: frame
            .stations
            .iter()
            .map(|s| HudStation {
                x_ahead: s.x_ahead,
                band: f(&s.band),
            })
            .collect(),
        ..frame.clone()
    }
}

/// Candidate marker positions, one per (kind, side) the first band allows.
fn marker_candidates(band: &Corridor, padding: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::new();
    if band.left_caution > band.right_caution {
        out.push(rng.random_range(band.right_caution..=band.left_caution));
    }
    let depth = rng.random_range(0.2..0.8) * padding;
    out.push(band.left_critical - depth);
    out.push(band.right_critical + depth);
    let beyond = rng.random_range(0.1..0.5);
    out.push(band.left_critical + beyond);
    out.push(band.right_critical - beyond);
    out
}

fn zone_distractor(correct: &HudState, padding: f64, rng: &mut ChaCha8Rng) -> Option<HudState> {
    let band = correct.stations[0].band;
    let options: Vec<HudState> = marker_candidates(&band, padding, rng)
        .into_iter()
        .map(|y| with_marker(correct, y, padding))
        .filter(|c| c.marker_zone.kind != correct.marker_zone.kind)
        .collect();
    options.choose(rng).cloned()
}

fn side_distractor(correct: &HudState, padding: f64, rng: &mut ChaCha8Rng) -> Option<HudState> {
    let band = correct.stations[0].band;
    let options: Vec<HudState> = marker_candidates(&band, padding, rng)
        .into_iter()
        .map(|y| with_marker(correct, y, padding))
        .filter(|c| c.marker_zone.side != correct.marker_zone.side)
        .collect();
    options.choose(rng).cloned()
}

fn geometry_distractor(correct: &HudState, spec: &ScenarioSpec, rng: &mut ChaCha8Rng) -> HudState {
    let padding = spec.caution_padding;
    let half = spec.road_width() / 2.0;
    let shift = rng.random_range(MIN_GEOMETRY_SHIFT..=3.0 * MIN_GEOMETRY_SHIFT);
    let mutated = match rng.random_range(0..4u8) {
        // mirror the road picture about the centerline
        0 => map_bands(correct, |b| Corridor {
            left_critical: -b.right_critical,
            right_critical: -b.left_critical,
            left_caution: -b.right_caution,
            right_caution: -b.left_caution,
        }),
        // an obstacle-free picture
        1 => map_bands(correct, |_| Corridor {
            left_critical: half,
            right_critical: -half,
            left_caution: half - padding,
            right_caution: -half + padding,
        }),
        // left boundaries pulled in
        2 => map_bands(correct, |b| Corridor {
            left_critical: b.left_critical - shift,
            left_caution: b.left_caution - shift,
            ..*b
        }),
        // right boundaries pulled in
        _ => map_bands(correct, |b| Corridor {
            right_critical: b.right_critical + shift,
            right_caution: b.right_caution + shift,
            ..*b
        }),
    };
    with_marker(&mutated, correct.marker_y, padding)
}

/// Build a four-option question for a frozen frame. The correct option is
/// exactly `hud_state(spec, frozen, true, config)`; the others are distinct
/// mutations of it (zone kind, zone side, band geometry) in random order.
pub fn make_anticipation_question(
    spec: &ScenarioSpec,
    frozen: &VehicleState,
    config: &HudConfig,
    rng: &mut ChaCha8Rng,
) -> Result<AnticipationQuestion, HudError> {
    let correct = hud_state(spec, frozen, true, config)?;
    let padding = spec.caution_padding;
    let mut options = vec![correct.clone()];
    let accept = |cand: HudState, options: &mut Vec<HudState>| {
        if options.iter().all(|o| o.semantically_differs(&cand)) {
            options.push(cand);
        }
    };

    if let Some(c) = zone_distractor(&correct, padding, rng) {
        accept(c, &mut options);
    }
    if let Some(c) = side_distractor(&correct, padding, rng) {
        accept(c, &mut options);
    }
    let g = geometry_distractor(&correct, spec, rng);
    accept(g, &mut options);

    let mut attempts = 0;
    while options.len() < OPTION_COUNT {
        if attempts == MAX_ATTEMPTS {
            return Err(HudError::DegenerateQuestion);
        }
        attempts += 1;
        let cand = match rng.random_range(0..3u8) {
            0 => zone_distractor(&correct, padding, rng),
            1 => side_distractor(&correct, padding, rng),
            _ => Some(geometry_distractor(&correct, spec, rng)),
        };
        if let Some(c) = cand {
            accept(c, &mut options);
        }
    }
    options.truncate(OPTION_COUNT);

    let mut order: Vec<usize> = (0..OPTION_COUNT).collect();
    order.shuffle(rng);
    let correct_index = order.iter().position(|&i| i == 0).expect("permutation");
    let options = order.into_iter().map(|i| options[i].clone()).collect();
    Ok(AnticipationQuestion {
        frozen: *frozen,
        road_length: spec.road_length,
        road_width: spec.road_width(),
        options,
        correct_index,
    })
}
