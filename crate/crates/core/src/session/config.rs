use serde::{Deserialize, Serialize};

use crate::driver::DriverParams;
use crate::feedback::{GuidanceParams, TorqueParams};
use crate::hud::HudConfig;
use crate::scenario::ScenarioSpec;
use crate::vehicle::SimParams;

use super::SessionError;

/// Simulation rate. Every session ticks at this rate.
pub const TICK_RATE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    HudOn,
    HudOff,
}

impl Condition {
    pub fn hud_enabled(self) -> bool {
        matches!(self, Condition::HudOn)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Headless,
    Live,
    Replay,
    Quiz,
}

fn default_tick_rate() -> f64 {
    TICK_RATE
}
fn default_true() -> bool {
    true
}
fn default_question_count() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    pub scenario: ScenarioSpec,
    pub condition: Condition,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_tick_rate")]
    pub tick_rate: f64,
    #[serde(default)]
    pub driver: Option<DriverParams>,
    #[serde(default)]
    pub torque: TorqueParams,
    #[serde(default)]
    pub sim: SimParams,
    #[serde(default)]
    pub guidance: GuidanceParams,
    #[serde(default)]
    pub hud: HudConfig,
    /// Haptic assist (guidance lock and repelling torque) on or off.
    #[serde(default = "default_true")]
    pub assist: bool,
    /// Starting lateral position; defaults to the right-most lane center.
    #[serde(default)]
    pub initial_y: Option<f64>,
    /// Anticipation questions per quiz session.
    #[serde(default = "default_question_count")]
    pub questions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub participant_index: Option<u32>,
}

impl SessionConfig {
    /// Headless defaults on `scenario` with the default synthetic driver.
    pub fn headless(scenario: ScenarioSpec, condition: Condition) -> Self {
        let target_y = scenario.lane_centers()[0];
        SessionConfig {
            scenario,
            condition,
            mode: Mode::Headless,
            tick_rate: TICK_RATE,
            driver: Some(DriverParams {
                target_y,
                ..DriverParams::default()
            }),
            torque: TorqueParams::default(),
            sim: SimParams::default(),
            guidance: GuidanceParams::default(),
            hud: HudConfig::default(),
            assist: true,
            initial_y: None,
            questions: default_question_count(),
            seed: 0,
            participant_index: None,
        }
    }

    pub fn initial_y(&self) -> f64 {
        self.initial_y.unwrap_or_else(|| self.scenario.lane_centers()[0])
    }

    pub fn ticks_for(&self, duration: f64) -> u64 {
        (duration * self.tick_rate).round() as u64
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        self.scenario.validate()?;
        self.torque
            .validate()
            .map_err(|e| SessionError::Config(e.to_string()))?;
        self.sim.validate().map_err(|e| SessionError::Config(e.to_string()))?;
        if let Some(d) = &self.driver {
            d.validate().map_err(|e| SessionError::Config(e.to_string()))?;
        }
        if self.tick_rate != TICK_RATE {
            return Err(SessionError::Config(format!(
                "tick_rate must be {TICK_RATE} Hz, got {}",
                self.tick_rate
            )));
        }
        if (self.tick_rate * self.sim.dt - 1.0).abs() > 1e-9 {
            return Err(SessionError::Config(format!(
                "sim.dt ({}) must equal 1 / tick_rate ({})",
                self.sim.dt,
                1.0 / self.tick_rate
            )));
        }
        if self.hud.stations < 2 || self.hud.lookahead.is_nan() || self.hud.lookahead <= 0.0 {
            return Err(SessionError::Config("hud needs >= 2 stations and lookahead > 0".into()));
        }
        let g = &self.guidance;
        if !(g.preview >= 0.0 && g.max_wheel_angle > 0.0 && g.kp.is_finite() && g.kd.is_finite()) {
            return Err(SessionError::Config("invalid guidance parameters".into()));
        }
        if let Some(y) = self.initial_y {
            if !y.is_finite() {
                return Err(SessionError::Config("initial_y must be finite".into()));
            }
        }
        Ok(())
    }

    /// Checks that the car stays on the road for `duration` seconds.
    pub fn validate_duration(&self, duration: f64) -> Result<(), SessionError> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(SessionError::Config(format!("duration must be > 0, got {duration}")));
        }
        let travel = self.scenario.speed * duration;
        if travel >= self.scenario.road_length {
            return Err(SessionError::Config(format!(
                "a {duration} s run covers {travel} m but the road is only {} m long",
                self.scenario.road_length
            )));
        }
        Ok(())
    }
}

/// Condition order for a participant: even indices see the HUD first.
pub fn counterbalance(participant_index: u32) -> (Condition, Condition) {
    if participant_index.is_multiple_of(2) {
        (Condition::HudOn, Condition::HudOff)
    } else {
        (Condition::HudOff, Condition::HudOn)
    }
}
