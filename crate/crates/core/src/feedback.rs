//! Haptic steering feedback: the repelling risk-to-torque law and the
//! saturated position lock that holds the wheel at the guidance angle.
//!
//! Sign convention: positive torque turns the wheel to the left (+y).

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::risk::{RiskError, RiskSample};
use crate::scenario::ScenarioSpec;
use crate::vehicle::VehicleState;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeedbackError {
    #[error("risk must lie in [0, 1], got {0}")]
    RiskOutOfRange(f64),
    #[error("invalid torque parameter `{0}`")]
    InvalidParam(&'static str),
}

fn default_t_max() -> f64 {
    2.0
}
fn default_gamma() -> f64 {
    1.0
}
fn default_lock_stiffness() -> f64 {
    20.0
}
fn default_lock_saturation() -> f64 {
    2.0
}

/// Shape of the risk-to-torque curve and of the position lock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorqueParams {
    /// Repelling torque at full risk, N·m.
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    /// Curve exponent: `T(R) = t_max * R^gamma`.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// N·m/rad
    #[serde(default = "default_lock_stiffness")]
    pub lock_stiffness: f64,
    /// Lock torque ceiling; a driver pushing harder than this wins.
    #[serde(default = "default_lock_saturation")]
    pub lock_saturation: f64,
    /// Optional per-component rate limit, N·m/s.
    #[serde(default)]
    pub slew_limit: Option<f64>,
}

impl Default for TorqueParams {
    fn default() -> Self {
        TorqueParams {
            t_max: default_t_max(),
            gamma: default_gamma(),
            lock_stiffness: default_lock_stiffness(),
            lock_saturation: default_lock_saturation(),
            slew_limit: None,
        }
    }
}

impl TorqueParams {
    pub fn validate(&self) -> Result<(), FeedbackError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.t_max) {
            return Err(FeedbackError::InvalidParam("t_max"));
        }
        if !ok(self.gamma) {
            return Err(FeedbackError::InvalidParam("gamma"));
        }
        if !ok(self.lock_saturation) {
            return Err(FeedbackError::InvalidParam("lock_saturation"));
        }
        if !(self.lock_stiffness.is_finite() && self.lock_stiffness >= 0.0) {
            return Err(FeedbackError::InvalidParam("lock_stiffness"));
        }
        if let Some(s) = self.slew_limit {
            if !ok(s) {
                return Err(FeedbackError::InvalidParam("slew_limit"));
            }
        }
        Ok(())
    }
}

/// Torque applied by the assist system to the steering wheel.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AssistTorque {
    pub repel: f64,
    pub lock: f64,
    pub total: f64,
}

impl AssistTorque {
    pub fn new(repel: f64, lock: f64) -> Self {
        AssistTorque {
            repel,
            lock,
            total: repel + lock,
        }
    }

    pub const ZERO: AssistTorque = AssistTorque {
        repel: 0.0,
        lock: 0.0,
        total: 0.0,
    };

    /// Rate-limit each component towards `self` starting from `prev`.
    pub fn slew_from(self, prev: AssistTorque, max_rate: f64, dt: f64) -> AssistTorque {
        let step = max_rate * dt;
        let limit = |target: f64, from: f64| from + (target - from).clamp(-step, step);
        AssistTorque::new(limit(self.repel, prev.repel), limit(self.lock, prev.lock))
    }
}

/// Repelling torque magnitude for risk `r`.
pub fn torque_from_risk(r: f64, params: &TorqueParams) -> Result<f64, FeedbackError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(FeedbackError::RiskOutOfRange(r));
    }
    Ok(params.t_max * r.powf(params.gamma))
}

/// Net repelling torque: pushes left when the right side is riskier and
/// vice versa; equal risks cancel.
pub fn net_repel(risk: &RiskSample, params: &TorqueParams) -> f64 {
    let side = |r: f64| params.t_max * r.clamp(0.0, 1.0).powf(params.gamma);
    side(risk.r_right) - side(risk.r_left)
}

/// Spring towards the guidance angle, saturated at `lock_saturation`.
pub fn lock_torque(theta: f64, theta_guidance: f64, params: &TorqueParams) -> f64 {
    let sat = params.lock_saturation;
    (-params.lock_stiffness * (theta - theta_guidance)).clamp(-sat, sat)
}

pub fn assist_torque(risk: &RiskSample, theta: f64, theta_guidance: f64, params: &TorqueParams) -> AssistTorque {
    AssistTorque::new(net_repel(risk, params), lock_torque(theta, theta_guidance, params))
}

fn default_preview() -> f64 {
    20.0
}
fn default_guidance_kp() -> f64 {
    0.1
}
fn default_guidance_kd() -> f64 {
    0.15
}
fn default_max_wheel_angle() -> f64 {
    TAU
}

/// Lane-targeting guidance law. These gains belong to the simulated
/// automation, not to the driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuidanceParams {
    /// Distance ahead at which lane risk is compared, m.
    #[serde(default = "default_preview")]
    pub preview: f64,
    /// rad of wheel per m of lateral error
    #[serde(default = "default_guidance_kp")]
    pub kp: f64,
    /// rad·s/m, applied to lateral velocity
    #[serde(default = "default_guidance_kd")]
    pub kd: f64,
    #[serde(default = "default_max_wheel_angle")]
    pub max_wheel_angle: f64,
}

impl Default for GuidanceParams {
    fn default() -> Self {
        GuidanceParams {
            preview: default_preview(),
            kp: default_guidance_kp(),
            kd: default_guidance_kd(),
            max_wheel_angle: default_max_wheel_angle(),
        }
    }
}

/// Lane center with the lowest risk at the preview station. Ties go to the
/// lane the vehicle is currently in, then to the nearest lane.
pub fn guidance_target(spec: &ScenarioSpec, state: &VehicleState, params: &GuidanceParams) -> Result<f64, RiskError> {
    spec.check_on_road(state.x)?;
    let preview_x = (state.x + params.preview).min(spec.road_length);
    let corridor = spec.corridor_at(preview_x)?;
    let centers = spec.lane_centers();
    let current = centers
        .iter()
        .copied()
        .min_by(|a, b| (a - state.y).abs().total_cmp(&(b - state.y).abs()))
        .expect("at least one lane");
    let mut best = current;
    let mut best_risk = crate::risk::risk_in_corridor(&corridor, current, spec.caution_padding).level();
    for &c in &centers {
        let r = crate::risk::risk_in_corridor(&corridor, c, spec.caution_padding).level();
        let closer = (c - state.y).abs() < (best - state.y).abs();
        if r < best_risk || (r == best_risk && best != current && closer) {
            best = c;
            best_risk = r;
        }
    }
    Ok(best)
}

/// Steering-wheel angle the automation wants: PD on lateral error to the
/// target lane center, clamped to `±max_wheel_angle`.
pub fn guidance_angle(spec: &ScenarioSpec, state: &VehicleState, params: &GuidanceParams) -> Result<f64, RiskError> {
    let target = guidance_target(spec, state, params)?;
    Ok(pd_wheel_angle(target, state, params))
}

pub(crate) fn pd_wheel_angle(target_y: f64, state: &VehicleState, params: &GuidanceParams) -> f64 {
    let angle = params.kp * (target_y - state.y) - params.kd * state.lateral_velocity();
    angle.clamp(-params.max_wheel_angle, params.max_wheel_angle)
}
