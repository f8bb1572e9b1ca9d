//! Telemetry CSV: a commented header carrying the full session config as
//! JSON, then one row per tick.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! parsed log reproduces every value bit for bit.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::hud::{ZoneClass, ZoneKind, ZoneSide};

use super::{SessionConfig, SessionError};

pub const FORMAT_LINE: &str = "# riskhud telemetry v1";
const CONFIG_PREFIX: &str = "# config: ";
pub const COLUMNS: [&str; 14] = [
    "t",
    "x",
    "y",
    "psi",
    "theta",
    "theta_input",
    "tbt",
    "r_left",
    "r_right",
    "t_repel",
    "t_lock",
    "zone_kind",
    "zone_side",
    "zone_level",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TelemetryRecord {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub theta: f64,
    pub theta_input: f64,
    pub tbt: f64,
    pub r_left: f64,
    pub r_right: f64,
    pub t_repel: f64,
    pub t_lock: f64,
    pub zone: ZoneClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub config: SessionConfig,
    pub records: Vec<TelemetryRecord>,
}

impl SessionLog {
    pub fn dt(&self) -> f64 {
        1.0 / self.config.tick_rate
    }

    /// Driver input angles, one per tick, for replay.
    pub fn inputs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.theta_input).collect()
    }

    pub fn to_csv(&self) -> String {
        let config = serde_json::to_string(&self.config).expect("config serializes");
        let mut out = String::with_capacity(64 * (self.records.len() + 4));
        out.push_str(FORMAT_LINE);
        out.push('\n');
        out.push_str(CONFIG_PREFIX);
        out.push_str(&config);
        out.push('\n');
        out.push_str(&COLUMNS.join(","));
        out.push('\n');
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.t,
                r.x,
                r.y,
                r.psi,
                r.theta,
                r.theta_input,
                r.tbt,
                r.r_left,
                r.r_right,
                r.t_repel,
                r.t_lock,
                r.zone.kind.as_str(),
                r.zone.side.as_str(),
                r.zone.level
            )
            .expect("writing to a String");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<SessionLog, SessionError> {
        let bad = |line: usize, msg: String| SessionError::Telemetry(format!("line {line}: {msg}"));
        let mut config = None;
        let mut header_seen = false;
        let mut records = Vec::new();
        if text.lines().next() != Some(FORMAT_LINE) {
            return Err(bad(1, format!("expected `{FORMAT_LINE}`")));
        }
        for (i, line) in text.lines().enumerate().skip(1) {
            let lineno = i + 1;
            if line.starts_with('#') {
                if let Some(json) = line.strip_prefix(CONFIG_PREFIX) {
                    config = Some(
                        serde_json::from_str::<SessionConfig>(json).map_err(|e| bad(lineno, format!("config: {e}")))?,
                    );
                }
                continue;
            }
            if !header_seen {
                if line != COLUMNS.join(",") {
                    return Err(bad(lineno, "unexpected column header".into()));
                }
                header_seen = true;
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != COLUMNS.len() {
                return Err(bad(
                    lineno,
                    format!("expected {} fields, got {}", COLUMNS.len(), fields.len()),
                ));
            }
            let num = |k: usize| {
                fields[k]
                    .parse::<f64>()
                    .map_err(|e| bad(lineno, format!("{}: {e}", COLUMNS[k])))
            };
            let kind = match fields[11] {
                "safe" => ZoneKind::Safe,
                "caution" => ZoneKind::Caution,
                "critical" => ZoneKind::Critical,
                other => return Err(bad(lineno, format!("zone_kind `{other}`"))),
            };
            let side = match fields[12] {
                "none" => ZoneSide::None,
                "left" => ZoneSide::Left,
                "right" => ZoneSide::Right,
                "both" => ZoneSide::Both,
                other => return Err(bad(lineno, format!("zone_side `{other}`"))),
            };
            records.push(TelemetryRecord {
                t: num(0)?,
                x: num(1)?,
                y: num(2)?,
                psi: num(3)?,
                theta: num(4)?,
                theta_input: num(5)?,
                tbt: num(6)?,
                r_left: num(7)?,
                r_right: num(8)?,
                t_repel: num(9)?,
                t_lock: num(10)?,
                zone: ZoneClass {
                    kind,
                    side,
                    level: num(13)?,
                },
            });
        }
        let config = config.ok_or_else(|| SessionError::Telemetry("missing `# config:` header line".into()))?;
        if !header_seen {
            return Err(SessionError::Telemetry("missing column header".into()));
        }
        Ok(SessionLog { config, records })
    }
}
