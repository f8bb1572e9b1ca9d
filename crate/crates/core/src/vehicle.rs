//! Fixed-step vehicle and steering-column model.
//!
//! The driver acts through a torsion bar: they command a wheel angle and the
//! bar transmits `k_tb * (theta_input - theta)` to a single-inertia steering
//! wheel that also receives the assist torque and viscous damping. The road
//! wheels follow the steering wheel through a fixed ratio and the chassis
//! moves as a kinematic bicycle at constant speed.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feedback::AssistTorque;

/// Heading is held strictly inside (-π/2, π/2).
pub const MAX_HEADING: f64 = FRAC_PI_2 - 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VehicleError {
    #[error("non-finite input to vehicle step: {0}")]
    NonFinite(&'static str),
    #[error("invalid simulation parameter `{0}`")]
    InvalidParam(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    /// Heading, 0 along +x.
    pub psi: f64,
    pub v: f64,
    /// Steering-wheel angle, positive turns left.
    pub theta: f64,
    pub theta_dot: f64,
}

impl VehicleState {
    pub fn at(x: f64, y: f64, v: f64) -> Self {
        VehicleState {
            x,
            y,
            psi: 0.0,
            v,
            theta: 0.0,
            theta_dot: 0.0,
        }
    }

    pub fn lateral_velocity(&self) -> f64 {
        self.v * self.psi.sin()
    }

    fn is_finite(&self) -> bool {
        [self.x, self.y, self.psi, self.v, self.theta, self.theta_dot]
            .iter()
            .all(|v| v.is_finite())
    }
}

fn default_dt() -> f64 {
    0.02
}
fn default_wheelbase() -> f64 {
    2.8
}
fn default_steering_ratio() -> f64 {
    15.0
}
fn default_wheel_inertia() -> f64 {
    0.05
}
fn default_k_tb() -> f64 {
    5.0
}
fn default_damping() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimParams {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_wheelbase")]
    pub wheelbase: f64,
    #[serde(default = "default_steering_ratio")]
    pub steering_ratio: f64,
    /// kg·m²
    #[serde(default = "default_wheel_inertia")]
    pub wheel_inertia: f64,
    /// Torsion-bar stiffness, N·m/rad.
    #[serde(default = "default_k_tb")]
    pub k_tb: f64,
    /// Steering-column viscous damping, N·m·s/rad.
    #[serde(default = "default_damping")]
    pub damping: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            dt: default_dt(),
            wheelbase: default_wheelbase(),
            steering_ratio: default_steering_ratio(),
            wheel_inertia: default_wheel_inertia(),
            k_tb: default_k_tb(),
            damping: default_damping(),
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<(), VehicleError> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.dt) {
            return Err(VehicleError::InvalidParam("dt"));
        }
        if !pos(self.wheelbase) {
            return Err(VehicleError::InvalidParam("wheelbase"));
        }
        if !pos(self.steering_ratio) {
            return Err(VehicleError::InvalidParam("steering_ratio"));
        }
        if !pos(self.wheel_inertia) {
            return Err(VehicleError::InvalidParam("wheel_inertia"));
        }
        if !pos(self.k_tb) {
            return Err(VehicleError::InvalidParam("k_tb"));
        }
        if !(self.damping.is_finite() && self.damping >= 0.0) {
            return Err(VehicleError::InvalidParam("damping"));
        }
        Ok(())
    }
}

/// Torsion-bar torque for a driver angle against the current wheel angle.
pub fn torsion_bar_torque(theta_input: f64, theta: f64, params: &SimParams) -> f64 {
    params.k_tb * (theta_input - theta)
}

/// Advance one tick. Returns the next state and the torsion-bar torque that
/// acted during the tick.
pub fn step(
    state: &VehicleState,
    theta_input: f64,
    assist: &AssistTorque,
    params: &SimParams,
) -> Result<(VehicleState, f64), VehicleError> {
    if !state.is_finite() {
        return Err(VehicleError::NonFinite("state"));
    }
    if !theta_input.is_finite() {
        return Err(VehicleError::NonFinite("theta_input"));
    }
    if !assist.total.is_finite() {
        return Err(VehicleError::NonFinite("assist"));
    }
    let dt = params.dt;
    let tbt = torsion_bar_torque(theta_input, state.theta, params);
    let accel = (tbt + assist.total - params.damping * state.theta_dot) / params.wheel_inertia;
    let theta_dot = state.theta_dot + accel * dt;
    let theta = state.theta + theta_dot * dt;

    let delta = theta / params.steering_ratio;
    let x = state.x + state.v * state.psi.cos() * dt;
    let y = state.y + state.v * state.psi.sin() * dt;
    let psi = (state.psi + (state.v / params.wheelbase) * delta.tan() * dt).clamp(-MAX_HEADING, MAX_HEADING);

    Ok((
        VehicleState {
            x,
            y,
            psi,
            v: state.v,
            theta,
            theta_dot,
        },
        tbt,
    ))
}
