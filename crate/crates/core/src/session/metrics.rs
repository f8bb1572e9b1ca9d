use serde::{Deserialize, Serialize};

use crate::hud::ZoneKind;

use super::telemetry::TelemetryRecord;
use super::SessionError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionMetrics {
    /// Largest |TBT| over the session, N·m.
    pub max_tbt: f64,
    pub time_in_caution: f64,
    pub time_in_critical: f64,
    /// Entries into the critical zone. A session that starts critical does
    /// not count as an entry.
    pub critical_crossings: u32,
}

pub fn compute_metrics(records: &[TelemetryRecord], dt: f64) -> Result<SessionMetrics, SessionError> {
    if records.is_empty() {
        return Err(SessionError::EmptyLog);
    }
    let mut m = SessionMetrics {
        max_tbt: 0.0,
        time_in_caution: 0.0,
        time_in_critical: 0.0,
        critical_crossings: 0,
    };
    let mut caution_ticks = 0u64;
    let mut critical_ticks = 0u64;
    let mut prev: Option<ZoneKind> = None;
    for r in records {
        m.max_tbt = m.max_tbt.max(r.tbt.abs());
        match r.zone.kind {
            ZoneKind::Caution => caution_ticks += 1,
            ZoneKind::Critical => critical_ticks += 1,
            ZoneKind::Safe => {}
        }
        if r.zone.kind == ZoneKind::Critical && prev.is_some_and(|p| p != ZoneKind::Critical) {
            m.critical_crossings += 1;
        }
        prev = Some(r.zone.kind);
    }
    m.time_in_caution = caution_ticks as f64 * dt;
    m.time_in_critical = critical_ticks as f64 * dt;
    Ok(m)
}
