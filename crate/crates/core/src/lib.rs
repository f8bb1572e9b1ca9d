//! Continuous risk-based lateral assistance: a spatial risk field shared by
//! a haptic steering law and a head-up display, a deterministic vehicle and
//! steering-column model that yields torsion-bar torque, and the analytics
//! used to evaluate drivers' acceptance and anticipation.

pub mod driver;
pub mod feedback;
pub mod hud;
pub mod risk;
pub mod scenario;
pub mod session;
pub mod stats;
pub mod vehicle;

pub use feedback::{AssistTorque, GuidanceParams, TorqueParams};
pub use hud::{HudConfig, HudState, ZoneClass, ZoneKind, ZoneSide};
pub use risk::{RiskProfile, RiskSample};
pub use scenario::{Corridor, ObstacleSpec, ScenarioSpec, Side};
pub use session::{Condition, SessionConfig, SessionLog, SessionMetrics, TelemetryRecord};
pub use vehicle::{SimParams, VehicleState};

/// The obstacle course used for headless experiments: a 4 km two-lane road
/// with three right-side and one left-side obstruction.
pub fn obstacle_course() -> ScenarioSpec {
    scenario::parse_scenario(include_str!("../scenarios/obstacle_course.json")).expect("bundled scenario is valid")
}
