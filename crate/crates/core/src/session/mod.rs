//! Session orchestration: the fixed-rate simulation loop, telemetry, metrics
//! and the study protocol around it (condition order, quiz freeze points).
//!
//! One tick `k` at `t = k / tick_rate`:
//!
//! 1. read the driver's wheel angle (synthetic driver, replay trace or the
//!    latest live input),
//! 2. evaluate risk at the car and the HUD frame for the current state,
//! 3. compute guidance, lock and repelling torque (when assist is on),
//! 4. advance the vehicle by one step,
//! 5. emit a record describing the state at `t` and what acted on it.

mod config;
pub mod live;
mod metrics;
mod telemetry;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::driver::SyntheticDriver;
use crate::feedback::{assist_torque, guidance_angle, AssistTorque};
use crate::hud::{hud_state, make_anticipation_question, AnticipationQuestion, HudError, HudState};
use crate::risk::{risk_in_corridor, RiskError, RiskSample};
use crate::scenario::ScenarioError;
use crate::vehicle::{step, VehicleError, VehicleState};

pub use config::{counterbalance, Condition, Mode, SessionConfig, TICK_RATE};
pub use metrics::{compute_metrics, SessionMetrics};
pub use telemetry::{SessionLog, TelemetryRecord, COLUMNS, FORMAT_LINE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("invalid session config: {0}")]
    Config(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Risk(#[from] RiskError),
    #[error(transparent)]
    Vehicle(#[from] VehicleError),
    #[error(transparent)]
    Hud(#[from] HudError),
    #[error("telemetry: {0}")]
    Telemetry(String),
    #[error("log has no records")]
    EmptyLog,
    #[error("protocol violation: {0}")]
    Protocol(String),
}

/// Everything computed during one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct TickFrame {
    pub seq: u64,
    pub t: f64,
    /// State at `t`, before the step.
    pub state: VehicleState,
    pub theta_input: f64,
    pub tbt: f64,
    pub risk: RiskSample,
    pub assist: AssistTorque,
    pub hud: HudState,
}

impl TickFrame {
    pub fn record(&self) -> TelemetryRecord {
        TelemetryRecord {
            t: self.t,
            x: self.state.x,
            y: self.state.y,
            psi: self.state.psi,
            theta: self.state.theta,
            theta_input: self.theta_input,
            tbt: self.tbt,
            r_left: self.risk.r_left,
            r_right: self.risk.r_right,
            t_repel: self.assist.repel,
            t_lock: self.assist.lock,
            zone: self.hud.marker_zone,
        }
    }
}

/// The deterministic plant plus assist system, advanced one tick at a time
/// by whoever supplies the driver input.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SessionConfig,
    state: VehicleState,
    seq: u64,
    prev_assist: AssistTorque,
}

impl Simulation {
    pub fn new(config: &SessionConfig) -> Result<Self, SessionError> {
        config.validate()?;
        let state = VehicleState::at(0.0, config.initial_y(), config.scenario.speed);
        Ok(Simulation {
            config: config.clone(),
            state,
            seq: 0,
            prev_assist: AssistTorque::ZERO,
        })
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn state(&self) -> &VehicleState {
        &self.state
    }

    /// Index of the next tick.
    pub fn seq(&self) -> u64 {
        self.seq
    }

    pub fn time(&self) -> f64 {
        self.seq as f64 / self.config.tick_rate
    }

    /// HUD frame for the current state under this session's condition.
    pub fn current_hud(&self) -> Result<HudState, SessionError> {
        Ok(hud_state(
            &self.config.scenario,
            &self.state,
            self.config.condition.hud_enabled(),
            &self.config.hud,
        )?)
    }

    pub fn tick(&mut self, theta_input: f64) -> Result<TickFrame, SessionError> {
        let cfg = &self.config;
        let spec = &cfg.scenario;
        let corridor = spec.corridor_at(self.state.x)?;
        let risk = risk_in_corridor(&corridor, self.state.y, spec.caution_padding);
        let hud = self.current_hud()?;

        let mut assist = if cfg.assist {
            let theta_guidance = guidance_angle(spec, &self.state, &cfg.guidance)?;
            assist_torque(&risk, self.state.theta, theta_guidance, &cfg.torque)
        } else {
            AssistTorque::ZERO
        };
        if let Some(rate) = cfg.torque.slew_limit {
            assist = assist.slew_from(self.prev_assist, rate, cfg.sim.dt);
        }

        let (next, tbt) = step(&self.state, theta_input, &assist, &cfg.sim)?;
        let frame = TickFrame {
            seq: self.seq,
            t: self.time(),
            state: self.state,
            theta_input,
            tbt,
            risk,
            assist,
            hud,
        };
        self.state = next;
        self.prev_assist = assist;
        self.seq += 1;
        Ok(frame)
    }
}

/// Run a session with the synthetic driver for `duration` seconds.
pub fn run_headless(config: &SessionConfig, duration: f64) -> Result<SessionLog, SessionError> {
    let driver_params = config
        .driver
        .ok_or_else(|| SessionError::Config("headless sessions need driver parameters".into()))?;
    config.validate()?;
    config.validate_duration(duration)?;
    let ticks = config.ticks_for(duration);
    let mut sim = Simulation::new(config)?;
    let mut driver = SyntheticDriver::new(driver_params, config.sim.dt);
    let mut records = Vec::with_capacity(ticks as usize);
    for _ in 0..ticks {
        let input = driver.input(sim.state());
        records.push(sim.tick(input)?.record());
    }
    Ok(SessionLog {
        config: config.clone(),
        records,
    })
}

/// Run a session from a recorded input trace, one angle per tick.
pub fn run_with_inputs(config: &SessionConfig, inputs: &[f64]) -> Result<SessionLog, SessionError> {
    config.validate()?;
    if inputs.is_empty() {
        return Err(SessionError::Config("input trace is empty".into()));
    }
    config.validate_duration(inputs.len() as f64 / config.tick_rate)?;
    let mut sim = Simulation::new(config)?;
    let records = inputs
        .iter()
        .map(|&u| sim.tick(u).map(|f| f.record()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SessionLog {
        config: config.clone(),
        records,
    })
}

/// Tick indices at which a quiz session freezes: `count` points spread
/// evenly through the run, never at the first or last tick.
pub fn freeze_ticks(total_ticks: u64, count: usize) -> Vec<u64> {
    (1..=count as u64)
        .map(|i| (total_ticks * i) / (count as u64 + 1))
        .collect()
}

/// Questions for an offline quiz: a headless run frozen at evenly spaced
/// points. The question stream is seeded by `config.seed`.
pub fn offline_quiz(config: &SessionConfig, duration: f64) -> Result<Vec<AnticipationQuestion>, SessionError> {
    let log = run_headless(config, duration)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    freeze_ticks(log.records.len() as u64, config.questions)
        .into_iter()
        .map(|k| {
            // reconstruct the vehicle state at tick k from its record
            let r = &log.records[k as usize];
            let frozen = VehicleState {
                x: r.x,
                y: r.y,
                psi: r.psi,
                v: config.scenario.speed,
                theta: r.theta,
                theta_dot: 0.0,
            };
            Ok(make_anticipation_question(
                &config.scenario,
                &frozen,
                &config.hud,
                &mut rng,
            )?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioSpec;

    fn config() -> SessionConfig {
        SessionConfig::headless(ScenarioSpec::straight(5000.0), Condition::HudOn)
    }

    #[test]
    fn record_count_matches_duration() {
        let log = run_headless(&config(), 150.0).unwrap();
        assert_eq!(log.records.len(), 7500);
        for (k, r) in log.records.iter().enumerate() {
            assert_eq!(r.t, k as f64 / 50.0);
        }
    }

    #[test]
    fn headless_needs_driver() {
        let mut c = config();
        c.driver = None;
        assert!(matches!(run_headless(&c, 1.0), Err(SessionError::Config(_))));
    }

    #[test]
    fn rejects_runs_past_road_end() {
        let c = SessionConfig::headless(ScenarioSpec::straight(100.0), Condition::HudOn);
        assert!(run_headless(&c, 10.0).is_err());
        assert!(run_headless(&c, 3.0).is_ok());
    }

    #[test]
    fn rejects_bad_tick_rate() {
        let mut c = config();
        c.tick_rate = 60.0;
        assert!(run_headless(&c, 1.0).is_err());
        let mut c = config();
        c.sim.dt = 0.01;
        assert!(run_headless(&c, 1.0).is_err());
    }

    #[test]
    fn counterbalance_alternates() {
        assert_eq!(counterbalance(0), (Condition::HudOn, Condition::HudOff));
        assert_eq!(counterbalance(1), (Condition::HudOff, Condition::HudOn));
        assert_eq!(counterbalance(2), (Condition::HudOn, Condition::HudOff));
    }

    #[test]
    fn freeze_points_are_interior() {
        assert_eq!(freeze_ticks(7500, 4), vec![1500, 3000, 4500, 6000]);
        assert!(freeze_ticks(10, 4).iter().all(|&k| k > 0 && k < 10));
    }

    #[test]
    fn offline_quiz_count() {
        let qs = offline_quiz(&config(), 20.0).unwrap();
        assert_eq!(qs.len(), 4);
    }
}
