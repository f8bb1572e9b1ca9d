//! Straight multi-lane road scenarios and their critical/caution corridor.
//!
//! Coordinates: `x` runs forward along the road, `y` is lateral with `y = 0`
//! on the centerline and `+y` to the left. Road edges sit at `±W/2` where
//! `W = num_lanes * lane_width`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {constraint}")]
    Invalid { field: String, constraint: String },
    #[error("x = {x} m is outside the road [0, {road_length}]")]
    OutOfRoad { x: f64, road_length: f64 },
}

impl ScenarioError {
    fn invalid(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        ScenarioError::Invalid {
            field: field.into(),
            constraint: constraint.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A static lateral obstruction that pushes one critical boundary inward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSpec {
    pub x_start: f64,
    pub x_end: f64,
    pub side: Side,
    /// How far the critical boundary moves inward from the road edge.
    pub intrusion: f64,
}

impl ObstacleSpec {
    /// Intrusion at `x`, including the linear lead-in and lead-out ramps.
    pub fn intrusion_at(&self, x: f64, taper_length: f64) -> f64 {
        if x >= self.x_start && x <= self.x_end {
            self.intrusion
        } else if taper_length <= 0.0 {
            0.0
        } else if x < self.x_start {
            let gap = self.x_start - x;
            if gap >= taper_length {
                0.0
            } else {
                self.intrusion * (1.0 - gap / taper_length)
            }
        } else {
            let gap = x - self.x_end;
            if gap >= taper_length {
                0.0
            } else {
                self.intrusion * (1.0 - gap / taper_length)
            }
        }
    }
}

fn default_lane_width() -> f64 {
    3.6
}
fn default_num_lanes() -> u32 {
    2
}
fn default_speed() -> f64 {
    25.0
}
fn default_caution_padding() -> f64 {
    1.5
}
fn default_taper_length() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub road_length: f64,
    #[serde(default = "default_lane_width")]
    pub lane_width: f64,
    #[serde(default = "default_num_lanes")]
    pub num_lanes: u32,
    /// Constant forward speed in m/s.
    #[serde(default = "default_speed")]
    pub speed: f64,
    /// Distance between a critical boundary and its caution boundary.
    #[serde(default = "default_caution_padding")]
    pub caution_padding: f64,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
    #[serde(default = "default_taper_length")]
    pub taper_length: f64,
    #[serde(default)]
    pub seed: u64,
}

/// Lateral boundaries at one longitudinal station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corridor {
    pub left_critical: f64,
    pub right_critical: f64,
    pub left_caution: f64,
    pub right_caution: f64,
}

impl Corridor {
    pub fn critical(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.left_critical,
            Side::Right => self.right_critical,
        }
    }

    /// Largest absolute difference over the four boundary fields.
    pub fn max_abs_diff(&self, other: &Corridor) -> f64 {
        [
            self.left_critical - other.left_critical,
            self.right_critical - other.right_critical,
            self.left_caution - other.left_caution,
            self.right_caution - other.right_caution,
        ]
        .iter()
        .fold(0.0_f64, |m, d| m.max(d.abs()))
    }
}

/// Parse and validate a JSON scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec, ScenarioError> {
    let spec: ScenarioSpec = serde_json::from_str(text).map_err(|e| ScenarioError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    spec.validate()?;
    Ok(spec)
}

impl ScenarioSpec {
    /// An obstacle-free road with all defaults.
    pub fn straight(road_length: f64) -> Self {
        ScenarioSpec {
            road_length,
            lane_width: default_lane_width(),
            num_lanes: default_num_lanes(),
            speed: default_speed(),
            caution_padding: default_caution_padding(),
            obstacles: Vec::new(),
            taper_length: default_taper_length(),
            seed: 0,
        }
    }

    pub fn road_width(&self) -> f64 {
        f64::from(self.num_lanes) * self.lane_width
    }

    /// Lane-center lateral positions, right-most lane first.
    pub fn lane_centers(&self) -> Vec<f64> {
        let n = f64::from(self.num_lanes);
        (0..self.num_lanes)
            .map(|i| self.lane_width * (f64::from(i) + 0.5 - n / 2.0))
            .collect()
    }

    /// Largest obstacle intrusion divided by the taper length: the steepest
    /// slope any boundary can have. Zero without obstacles, infinite for
    /// step-shaped (zero-taper) obstacles.
    pub fn boundary_slope(&self) -> f64 {
        let max_intrusion = self.obstacles.iter().map(|o| o.intrusion).fold(0.0_f64, f64::max);
        if max_intrusion == 0.0 {
            0.0
        } else if self.taper_length == 0.0 {
            f64::INFINITY
        } else {
            max_intrusion / self.taper_length
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ScenarioError::invalid(
                    field,
                    format!("must be a finite value > 0, got {v}"),
                ))
            }
        };
        positive("road_length", self.road_length)?;
        positive("lane_width", self.lane_width)?;
        positive("speed", self.speed)?;
        positive("caution_padding", self.caution_padding)?;
        if self.num_lanes < 1 {
            return Err(ScenarioError::invalid("num_lanes", "must be at least 1"));
        }
        if !(self.taper_length.is_finite() && self.taper_length >= 0.0) {
            return Err(ScenarioError::invalid(
                "taper_length",
                format!("must be a finite value >= 0, got {}", self.taper_length),
            ));
        }

        let width = self.road_width();
        let mut prev_start = f64::NEG_INFINITY;
        for (i, o) in self.obstacles.iter().enumerate() {
            let name = |f: &str| format!("obstacles[{i}].{f}");
            if !(o.x_start.is_finite() && o.x_end.is_finite() && o.intrusion.is_finite()) {
                return Err(ScenarioError::invalid(
                    format!("obstacles[{i}]"),
                    "fields must be finite",
                ));
            }
            if o.x_start >= o.x_end {
                return Err(ScenarioError::invalid(
                    name("x_start"),
                    format!("x_start ({}) must be less than x_end ({})", o.x_start, o.x_end),
                ));
            }
            if o.x_start < 0.0 || o.x_end > self.road_length {
                return Err(ScenarioError::invalid(
                    format!("obstacles[{i}]"),
                    format!(
                        "extent [{}, {}] must lie within [0, {}]",
                        o.x_start, o.x_end, self.road_length
                    ),
                ));
            }
            if !(o.intrusion > 0.0 && o.intrusion < width) {
                return Err(ScenarioError::invalid(
                    name("intrusion"),
                    format!("must be in (0, {width}), got {}", o.intrusion),
                ));
            }
            if o.x_start < prev_start {
                return Err(ScenarioError::invalid(
                    name("x_start"),
                    "obstacles must be sorted by x_start",
                ));
            }
            prev_start = o.x_start;
        }
        Ok(())
    }

    fn intrusion(&self, side: Side, x: f64) -> f64 {
        self.obstacles
            .iter()
            .filter(|o| o.side == side)
            .map(|o| o.intrusion_at(x, self.taper_length))
            .fold(0.0_f64, f64::max)
    }

    pub fn check_on_road(&self, x: f64) -> Result<(), ScenarioError> {
        if x.is_finite() && (0.0..=self.road_length).contains(&x) {
            Ok(())
        } else {
            Err(ScenarioError::OutOfRoad {
                x,
                road_length: self.road_length,
            })
        }
    }

    /// Critical and caution boundaries at station `x`.
    pub fn corridor_at(&self, x: f64) -> Result<Corridor, ScenarioError> {
        self.check_on_road(x)?;
        let half = self.road_width() / 2.0;
        let left_critical = half - self.intrusion(Side::Left, x);
        let right_critical = -half + self.intrusion(Side::Right, x);
        Ok(Corridor {
            left_critical,
            right_critical,
            left_caution: left_critical - self.caution_padding,
            right_caution: right_critical + self.caution_padding,
        })
    }

    /// The same road with every obstacle moved to the opposite side.
    pub fn mirrored(&self) -> ScenarioSpec {
        let mut out = self.clone();
        for o in &mut out.obstacles {
            o.side = o.side.opposite();
        }
        out
    }
}

/// Free function form of [`ScenarioSpec::corridor_at`].
pub fn corridor_at(spec: &ScenarioSpec, x: f64) -> Result<Corridor, ScenarioError> {
    spec.corridor_at(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn right_obstacle() -> ScenarioSpec {
        let mut s = ScenarioSpec::straight(500.0);
        s.obstacles.push(ObstacleSpec {
            x_start: 100.0,
            x_end: 120.0,
            side: Side::Right,
            intrusion: 1.2,
        });
        s
    }

    #[test]
    fn minimal_document_fills_defaults() {
        let s = parse_scenario(r#"{"road_length": 500}"#).unwrap();
        assert_eq!(s.road_length, 500.0);
        assert_eq!(s.lane_width, 3.6);
        assert_eq!(s.num_lanes, 2);
        assert_eq!(s.speed, 25.0);
        assert_eq!(s.caution_padding, 1.5);
        assert_eq!(s.taper_length, 10.0);
        assert!(s.obstacles.is_empty());
    }

    #[test]
    fn explicit_caution_padding() {
        let s = parse_scenario(r#"{"road_length": 500, "caution_padding": 1.5}"#).unwrap();
        assert_eq!(s.caution_padding, 1.5);
    }

    #[test]
    fn reversed_obstacle_names_the_obstacle() {
        let err = parse_scenario(
            r#"{"road_length": 500, "obstacles": [
                {"x_start": 100, "x_end": 120, "side": "left", "intrusion": 1.0},
                {"x_start": 200, "x_end": 150, "side": "right", "intrusion": 1.0}]}"#,
        )
        .unwrap_err();
        match err {
            ScenarioError::Invalid { field, .. } => assert_eq!(field, "obstacles[1].x_start"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected_with_position() {
        let err = parse_scenario("{\n  \"road_length\": 500,\n  \"lanes\": 3\n}").unwrap_err();
        match err {
            ScenarioError::Syntax { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("lanes"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_scenario(
            r#"{"road_length": 500, "obstacles": [{"x_start": 1, "x_end": 2, "side": "left", "intrusion": 1, "h": 1}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ScenarioError::Syntax { .. }));
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_scenario("{\"road_length\": 500,,}").unwrap_err();
        match err {
            ScenarioError::Syntax { line, column, .. } => {
                assert_eq!(line, 1);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_rules() {
        let cases = [
            (r#"{"road_length": 0}"#, "road_length"),
            (r#"{"road_length": 10, "lane_width": -1}"#, "lane_width"),
            (r#"{"road_length": 10, "num_lanes": 0}"#, "num_lanes"),
            (r#"{"road_length": 10, "speed": 0}"#, "speed"),
            (r#"{"road_length": 10, "caution_padding": 0}"#, "caution_padding"),
            (r#"{"road_length": 10, "taper_length": -1}"#, "taper_length"),
            (
                r#"{"road_length": 10, "obstacles": [{"x_start": 1, "x_end": 2, "side": "left", "intrusion": 7.2}]}"#,
                "obstacles[0].intrusion",
            ),
            (
                r#"{"road_length": 10, "obstacles": [{"x_start": 1, "x_end": 20, "side": "left", "intrusion": 1}]}"#,
                "obstacles[0]",
            ),
            (
                r#"{"road_length": 10, "obstacles": [
                    {"x_start": 5, "x_end": 6, "side": "left", "intrusion": 1},
                    {"x_start": 1, "x_end": 2, "side": "left", "intrusion": 1}]}"#,
                "obstacles[1].x_start",
            ),
        ];
        for (doc, expected_field) in cases {
            match parse_scenario(doc) {
                Err(ScenarioError::Invalid { field, .. }) => assert_eq!(field, expected_field, "{doc}"),
                other => panic!("{doc}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn obstacle_free_corridor() {
        let s = ScenarioSpec::straight(500.0);
        for x in [0.0, 17.3, 500.0] {
            let c = s.corridor_at(x).unwrap();
            assert_eq!(c.left_critical, 3.6);
            assert_eq!(c.right_critical, -3.6);
            assert!((c.left_caution - 2.1).abs() < 1e-12);
            assert!((c.right_caution + 2.1).abs() < 1e-12);
        }
    }

    #[test]
    fn obstacle_body_and_taper() {
        let s = right_obstacle();
        let body = s.corridor_at(110.0).unwrap();
        assert!((body.right_critical + 2.4).abs() < 1e-12);
        assert_eq!(body.left_critical, 3.6);
        let lead_in = s.corridor_at(95.0).unwrap();
        assert!((lead_in.right_critical + 3.0).abs() < 1e-12);
        let lead_out = s.corridor_at(125.0).unwrap();
        assert!((lead_out.right_critical + 3.0).abs() < 1e-12);
        assert_eq!(s.corridor_at(90.0).unwrap().right_critical, -3.6);
        assert_eq!(s.corridor_at(130.0).unwrap().right_critical, -3.6);
    }

    #[test]
    fn overlapping_obstacles_take_max() {
        let mut s = right_obstacle();
        s.obstacles.push(ObstacleSpec {
            x_start: 110.0,
            x_end: 140.0,
            side: Side::Right,
            intrusion: 0.5,
        });
        assert!((s.corridor_at(115.0).unwrap().right_critical + 2.4).abs() < 1e-12);
        assert!((s.corridor_at(135.0).unwrap().right_critical + 3.1).abs() < 1e-12);
    }

    #[test]
    fn zero_taper_is_a_step() {
        let mut s = right_obstacle();
        s.taper_length = 0.0;
        assert_eq!(s.corridor_at(99.999).unwrap().right_critical, -3.6);
        assert!((s.corridor_at(100.0).unwrap().right_critical + 2.4).abs() < 1e-12);
        assert_eq!(s.boundary_slope(), f64::INFINITY);
    }

    #[test]
    fn off_road_station_is_an_error() {
        let s = ScenarioSpec::straight(500.0);
        assert!(matches!(s.corridor_at(-0.1), Err(ScenarioError::OutOfRoad { .. })));
        assert!(matches!(s.corridor_at(500.1), Err(ScenarioError::OutOfRoad { .. })));
        assert!(s.corridor_at(f64::NAN).is_err());
    }

    #[test]
    fn lane_centers_two_and_three_lanes() {
        let mut s = ScenarioSpec::straight(100.0);
        assert_eq!(s.lane_centers(), vec![-1.8, 1.8]);
        s.num_lanes = 3;
        let c = s.lane_centers();
        assert!((c[0] + 3.6).abs() < 1e-12 && c[1].abs() < 1e-12 && (c[2] - 3.6).abs() < 1e-12);
    }
}
