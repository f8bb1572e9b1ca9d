//! Wire protocol and the transport-independent live session.
//!
//! The server is authoritative: clients send wheel angles and quiz answers,
//! the server sends one `tick` per simulation step. Input messages land in a
//! single slot that is read once at each tick boundary, so an input that
//! arrives while tick `n` is being produced first affects tick `n + 1`.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hud::{make_anticipation_question, HudState, HudStation, ZoneClass, OPTION_COUNT};
use crate::scenario::ObstacleSpec;

use super::{freeze_ticks, Mode, SessionConfig, SessionError, SessionLog, Simulation, TelemetryRecord, TickFrame};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehiclePose {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HudPayload {
    pub enabled: bool,
    pub stations: Vec<HudStation>,
    pub marker_y: f64,
    pub zone: ZoneClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorquePayload {
    pub repel: f64,
    pub lock: f64,
    pub total: f64,
    pub tbt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickPayload {
    pub seq: u64,
    pub t: f64,
    pub vehicle: VehiclePose,
    pub hud: HudPayload,
    pub torque: TorquePayload,
}

impl From<&TickFrame> for TickPayload {
    fn from(f: &TickFrame) -> Self {
        TickPayload {
            seq: f.seq,
            t: f.t,
            vehicle: VehiclePose {
                x: f.state.x,
                y: f.state.y,
                psi: f.state.psi,
                theta: f.state.theta,
            },
            hud: HudPayload {
                enabled: f.hud.enabled,
                stations: f.hud.stations.clone(),
                marker_y: f.hud.marker_y,
                zone: f.hud.marker_zone,
            },
            torque: TorquePayload {
                repel: f.assist.repel,
                lock: f.assist.lock,
                total: f.assist.total,
                tbt: f.tbt,
            },
        }
    }
}

/// What the participant sees while a question is open: the road without
/// any HUD layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrozenScene {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub theta: f64,
    pub lane_width: f64,
    pub num_lanes: u32,
    pub obstacles_ahead: Vec<ObstacleSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello {
        protocol: u32,
        server: String,
        config: Box<SessionConfig>,
    },
    Tick(TickPayload),
    Pause,
    Resume,
    Question {
        id: u32,
        options: Vec<HudState>,
        frozen: FrozenScene,
    },
    End {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Input { steer: f64 },
    Pause,
    Resume,
    Answer { id: u32, chosen_index: usize },
}

impl ServerMessage {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize")
    }
}

impl ClientMessage {
    pub fn parse(text: &str) -> Result<ClientMessage, SessionError> {
        serde_json::from_str(text).map_err(|e| SessionError::Protocol(format!("bad client frame: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("client messages serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuizAnswer {
    pub id: u32,
    pub chosen_index: usize,
    pub correct_index: usize,
    /// Seconds between sending the question and receiving the answer.
    pub response_time: f64,
}

#[derive(Debug, Clone)]
struct PendingQuestion {
    id: u32,
    correct_index: usize,
    asked_at: f64,
}

#[derive(Debug, Clone)]
struct Quiz {
    freeze: VecDeque<u64>,
    rng: ChaCha8Rng,
    pending: Option<PendingQuestion>,
    answers: Vec<QuizAnswer>,
    next_id: u32,
}

#[derive(Debug, Clone)]
pub struct LiveSession {
    sim: Simulation,
    total_ticks: u64,
    mailbox: f64,
    replay: Option<Vec<f64>>,
    client_paused: bool,
    quiz: Option<Quiz>,
    records: Vec<TelemetryRecord>,
    finished: bool,
}

impl LiveSession {
    /// `replay` supplies the driver input for every tick (client inputs are
    /// then ignored); it is required in replay mode.
    pub fn new(config: &SessionConfig, duration: f64, replay: Option<Vec<f64>>) -> Result<Self, SessionError> {
        if config.mode == Mode::Headless {
            return Err(SessionError::Config(
                "live sessions need mode live, replay or quiz".into(),
            ));
        }
        let total_ticks = match &replay {
            Some(trace) => {
                if trace.iter().any(|u| !u.is_finite()) {
                    return Err(SessionError::Config("replay trace has non-finite input".into()));
                }
                trace.len() as u64
            }
            None if config.mode == Mode::Replay => {
                return Err(SessionError::Config("replay mode needs an input trace".into()));
            }
            None => config.ticks_for(duration),
        };
        if total_ticks == 0 {
            return Err(SessionError::Config("session has no ticks".into()));
        }
        config.validate_duration(total_ticks as f64 / config.tick_rate)?;
        let sim = Simulation::new(config)?;
        let quiz = (config.mode == Mode::Quiz).then(|| Quiz {
            freeze: freeze_ticks(total_ticks, config.questions).into(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            pending: None,
            answers: Vec::new(),
            next_id: 0,
        });
        Ok(LiveSession {
            sim,
            total_ticks,
            mailbox: 0.0,
            replay,
            client_paused: false,
            quiz,
            records: Vec::with_capacity(total_ticks as usize),
            finished: false,
        })
    }

    pub fn config(&self) -> &SessionConfig {
        self.sim.config()
    }

    pub fn hello(&self) -> ServerMessage {
        ServerMessage::Hello {
            protocol: PROTOCOL_VERSION,
            server: format!("riskhud {}", env!("CARGO_PKG_VERSION")),
            config: Box::new(self.sim.config().clone()),
        }
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn is_awaiting_answer(&self) -> bool {
        self.quiz.as_ref().is_some_and(|q| q.pending.is_some())
    }

    pub fn answers(&self) -> &[QuizAnswer] {
        self.quiz.as_ref().map_or(&[], |q| &q.answers)
    }

    pub fn records(&self) -> &[TelemetryRecord] {
        &self.records
    }

    pub fn into_log(self) -> SessionLog {
        SessionLog {
            config: self.sim.config().clone(),
            records: self.records,
        }
    }

    /// Last-write-wins input slot, read at the next tick boundary.
    pub fn deposit_input(&mut self, steer: f64) -> Result<(), SessionError> {
        if !steer.is_finite() {
            return Err(SessionError::Protocol("non-finite steer".into()));
        }
        self.mailbox = steer;
        Ok(())
    }

    pub fn receive_text(&mut self, text: &str, now: f64) -> Result<Vec<ServerMessage>, SessionError> {
        let msg = ClientMessage::parse(text)?;
        self.receive(msg, now)
    }

    /// Apply a client message. `now` is session wall time in seconds.
    pub fn receive(&mut self, msg: ClientMessage, now: f64) -> Result<Vec<ServerMessage>, SessionError> {
        if self.finished {
            return Err(SessionError::Protocol("session already ended".into()));
        }
        match msg {
            ClientMessage::Input { steer } => {
                self.deposit_input(steer)?;
                Ok(Vec::new())
            }
            ClientMessage::Pause | ClientMessage::Resume if self.quiz.is_some() => Err(SessionError::Protocol(
                "pause/resume are server-driven in quiz mode".into(),
            )),
            ClientMessage::Pause => {
                self.client_paused = true;
                Ok(vec![ServerMessage::Pause])
            }
            ClientMessage::Resume => {
                self.client_paused = false;
                Ok(vec![ServerMessage::Resume])
            }
            ClientMessage::Answer { id, chosen_index } => {
                let quiz = self
                    .quiz
                    .as_mut()
                    .ok_or_else(|| SessionError::Protocol("answer outside quiz mode".into()))?;
                if chosen_index >= OPTION_COUNT {
                    return Err(SessionError::Protocol(format!(
                        "chosen_index {chosen_index} out of range"
                    )));
                }
                let pending = quiz
                    .pending
                    .take_if(|p| p.id == id)
                    .ok_or_else(|| SessionError::Protocol(format!("no open question with id {id}")))?;
                quiz.answers.push(QuizAnswer {
                    id,
                    chosen_index,
                    correct_index: pending.correct_index,
                    response_time: (now - pending.asked_at).max(0.0),
                });
                Ok(vec![ServerMessage::Resume])
            }
        }
    }

    fn frozen_scene(&self) -> FrozenScene {
        let s = self.sim.state();
        let spec = &self.sim.config().scenario;
        let horizon = s.x + self.sim.config().hud.lookahead + spec.taper_length;
        FrozenScene {
            t: self.sim.time(),
            x: s.x,
            y: s.y,
            psi: s.psi,
            theta: s.theta,
            lane_width: spec.lane_width,
            num_lanes: spec.num_lanes,
            obstacles_ahead: spec
                .obstacles
                .iter()
                .filter(|o| o.x_end + spec.taper_length >= s.x && o.x_start - spec.taper_length <= horizon)
                .copied()
                .collect(),
        }
    }

    /// Called at every tick boundary. Returns the messages to send; empty
    /// while paused or waiting for an answer.
    pub fn tick(&mut self, now: f64) -> Result<Vec<ServerMessage>, SessionError> {
        if self.finished {
            return Ok(Vec::new());
        }
        let seq = self.sim.seq();
        if let Some(quiz) = &self.quiz {
            if quiz.pending.is_some() {
                return Ok(Vec::new());
            }
            if quiz.freeze.front() == Some(&seq) {
                let frozen = self.frozen_scene();
                let state = *self.sim.state();
                let config = self.sim.config().clone();
                let quiz = self.quiz.as_mut().expect("quiz mode");
                quiz.freeze.pop_front();
                let question = make_anticipation_question(&config.scenario, &state, &config.hud, &mut quiz.rng)?;
                let id = quiz.next_id;
                quiz.next_id += 1;
                quiz.pending = Some(PendingQuestion {
                    id,
                    correct_index: question.correct_index,
                    asked_at: now,
                });
                return Ok(vec![
                    ServerMessage::Pause,
                    ServerMessage::Question {
                        id,
                        options: question.options,
                        frozen,
                    },
                ]);
            }
        }
        if self.client_paused {
            return Ok(Vec::new());
        }
        if seq >= self.total_ticks {
            self.finished = true;
            return Ok(vec![ServerMessage::End { reason: None }]);
        }
        let input = match &self.replay {
            Some(trace) => trace[seq as usize],
            None => self.mailbox,
        };
        let frame = self.sim.tick(input)?;
        self.records.push(frame.record());
        Ok(vec![ServerMessage::Tick(TickPayload::from(&frame))])
    }
}
