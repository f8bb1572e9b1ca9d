//! Synthetic driver for headless runs: a delayed PD tracker on lateral
//! position with seeded Gaussian steering noise.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vehicle::VehicleState;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DriverError {
    #[error("invalid driver parameter `{0}`")]
    InvalidParam(&'static str),
}

fn default_target_y() -> f64 {
    -1.8
}
fn default_kp() -> f64 {
    0.1
}
fn default_kd() -> f64 {
    0.15
}
fn default_delay() -> f64 {
    0.25
}
fn default_noise_sd() -> f64 {
    0.02
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriverParams {
    /// Lateral position the driver wants to hold, m.
    #[serde(default = "default_target_y")]
    pub target_y: f64,
    /// rad/m
    #[serde(default = "default_kp")]
    pub kp: f64,
    /// rad·s/m
    #[serde(default = "default_kd")]
    pub kd: f64,
    /// Reaction delay, s.
    #[serde(default = "default_delay")]
    pub delay: f64,
    /// Steering noise standard deviation, rad.
    #[serde(default = "default_noise_sd")]
    pub noise_sd: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for DriverParams {
    fn default() -> Self {
        DriverParams {
            target_y: default_target_y(),
            kp: default_kp(),
            kd: default_kd(),
            delay: default_delay(),
            noise_sd: default_noise_sd(),
            seed: 0,
        }
    }
}

impl DriverParams {
    pub fn validate(&self) -> Result<(), DriverError> {
        if !self.target_y.is_finite() {
            return Err(DriverError::InvalidParam("target_y"));
        }
        if !(self.kp.is_finite() && self.kd.is_finite()) {
            return Err(DriverError::InvalidParam("gains"));
        }
        if !(self.delay.is_finite() && self.delay >= 0.0) {
            return Err(DriverError::InvalidParam("delay"));
        }
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return Err(DriverError::InvalidParam("noise_sd"));
        }
        Ok(())
    }
}

/// Most recent states, newest last, one per tick.
#[derive(Debug, Clone)]
pub struct StateHistory {
    states: VecDeque<VehicleState>,
    capacity: usize,
}

impl StateHistory {
    pub fn new(capacity: usize) -> Self {
        StateHistory {
            states: VecDeque::with_capacity(capacity.max(1)),
            capacity: capacity.max(1),
        }
    }

    pub fn push(&mut self, state: VehicleState) {
        if self.states.len() == self.capacity {
            self.states.pop_front();
        }
        self.states.push_back(state);
    }

    /// The state `ticks_ago` ticks before the newest, or the oldest held.
    pub fn delayed(&self, ticks_ago: usize) -> Option<&VehicleState> {
        let n = self.states.len();
        if n == 0 {
            return None;
        }
        self.states.get(n - 1 - ticks_ago.min(n - 1))
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

pub fn delay_ticks(delay: f64, dt: f64) -> usize {
    (delay / dt).round() as usize
}

/// Wheel angle commanded by the driver from a delayed observation.
pub fn driver_input(history: &StateHistory, params: &DriverParams, dt: f64, rng: &mut ChaCha8Rng) -> f64 {
    let noise = Normal::new(0.0, params.noise_sd)
        .expect("noise_sd validated")
        .sample(rng);
    let Some(seen) = history.delayed(delay_ticks(params.delay, dt)) else {
        return noise;
    };
    params.kp * (params.target_y - seen.y) - params.kd * seen.lateral_velocity() + noise
}

/// A driver with its own history buffer and random stream.
#[derive(Debug, Clone)]
pub struct SyntheticDriver {
    params: DriverParams,
    dt: f64,
    history: StateHistory,
    rng: ChaCha8Rng,
}

impl SyntheticDriver {
    pub fn new(params: DriverParams, dt: f64) -> Self {
        SyntheticDriver {
            params,
            dt,
            history: StateHistory::new(delay_ticks(params.delay, dt) + 1),
            rng: ChaCha8Rng::seed_from_u64(params.seed),
        }
    }

    /// Record the current state and return this tick's input angle.
    pub fn input(&mut self, state: &VehicleState) -> f64 {
        self.history.push(*state);
        driver_input(&self.history, &self.params, self.dt, &mut self.rng)
    }
}
