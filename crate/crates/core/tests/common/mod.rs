//! Independent oracles shared by the integration tests. Nothing here calls
//! into the corridor or incomplete-beta code it is used to check.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use riskhud_core::scenario::{ObstacleSpec, ScenarioSpec, Side};

/// Ray-casting point-in-polygon test (boundary points count as inside for
/// the horizontal edges used here).
fn in_polygon(poly: &[(f64, f64)], px: f64, py: f64) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = poly[i];
        let (xj, yj) = poly[j];
        if (yi > py) != (yj > py) {
            let x_cross = xi + (py - yi) * (xj - xi) / (yj - yi);
            if px < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Footprint of an obstacle as a trapezoid in the (x, y) plane, extended a
/// little beyond the road edge so the edge itself is interior.
fn footprint(o: &ObstacleSpec, half_width: f64, taper: f64) -> Vec<(f64, f64)> {
    let outside = 10.0;
    match o.side {
        Side::Left => vec![
            (o.x_start - taper, half_width),
            (o.x_start, half_width - o.intrusion),
            (o.x_end, half_width - o.intrusion),
            (o.x_end + taper, half_width),
            (o.x_end + taper, half_width + outside),
            (o.x_start - taper, half_width + outside),
        ],
        Side::Right => vec![
            (o.x_start - taper, -half_width),
            (o.x_start, -half_width + o.intrusion),
            (o.x_end, -half_width + o.intrusion),
            (o.x_end + taper, -half_width),
            (o.x_end + taper, -half_width - outside),
            (o.x_start - taper, -half_width - outside),
        ],
    }
}

/// Whether (x, y) is blocked on `side`: past that road edge or inside one of
/// that side's obstacle footprints.
pub fn blocked(spec: &ScenarioSpec, side: Side, x: f64, y: f64) -> bool {
    let half = f64::from(spec.num_lanes) * spec.lane_width / 2.0;
    let past_edge = match side {
        Side::Left => y >= half,
        Side::Right => y <= -half,
    };
    past_edge
        || spec
            .obstacles
            .iter()
            .filter(|o| o.side == side)
            .any(|o| in_polygon(&footprint(o, half, spec.taper_length), x, y))
}

pub const SCAN_STEP: f64 = 1e-3;

/// Signed distance from y to the first blocked point on `side`, found by
/// stepping 1 mm at a time (negative when y is already blocked).
pub fn scan_distance(spec: &ScenarioSpec, side: Side, x: f64, y: f64) -> f64 {
    let dir = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    let start_blocked = blocked(spec, side, x, y);
    let mut k = 1u32;
    loop {
        let probe = y + dir * if start_blocked { -1.0 } else { 1.0 } * f64::from(k) * SCAN_STEP;
        if blocked(spec, side, x, probe) != start_blocked {
            let d = (f64::from(k) - 0.5) * SCAN_STEP;
            return if start_blocked { -d } else { d };
        }
        k += 1;
        assert!(k < 1_000_000, "scan ran away");
    }
}

/// Brute-force (r_left, r_right) from the lateral scan.
pub fn scan_risk(spec: &ScenarioSpec, x: f64, y: f64) -> (f64, f64) {
    let p = spec.caution_padding;
    let r = |d: f64| (1.0 - d / p).clamp(0.0, 1.0);
    (
        r(scan_distance(spec, Side::Left, x, y)),
        r(scan_distance(spec, Side::Right, x, y)),
    )
}

/// A random valid scenario with up to four obstacles.
pub fn random_scenario(rng: &mut ChaCha8Rng) -> ScenarioSpec {
    let num_lanes = rng.random_range(1..=3u32);
    let lane_width = rng.random_range(3.0..4.0);
    let width = f64::from(num_lanes) * lane_width;
    let road_length = 1000.0;
    let taper_length = rng.random_range(2.0..30.0);
    let caution_padding = rng.random_range(1.0..2.5);
    let mut obstacles: Vec<ObstacleSpec> = (0..rng.random_range(0..=4))
        .map(|_| {
            let x_start = rng.random_range(50.0..800.0);
            ObstacleSpec {
                x_start,
                x_end: x_start + rng.random_range(5.0..120.0),
                side: if rng.random_bool(0.5) { Side::Left } else { Side::Right },
                intrusion: rng.random_range(0.05..0.6) * width,
            }
        })
        .collect();
    obstacles.sort_by(|a, b| a.x_start.total_cmp(&b.x_start));
    let spec = ScenarioSpec {
        road_length,
        lane_width,
        num_lanes,
        speed: 25.0,
        caution_padding,
        obstacles,
        taper_length,
        seed: 0,
    };
    spec.validate().expect("generator yields valid scenarios");
    spec
}

/// Student-t density without its normalizing constant.
fn t_kernel(x: f64, nu: f64) -> f64 {
    (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0)
}

/// Integrand after x = tan(u), which maps the real line onto (-π/2, π/2).
fn t_kernel_u(u: f64, nu: f64) -> f64 {
    let c = u.cos();
    if c <= 0.0 {
        // limit of cos^(nu-1) behaviour at the ends
        return if nu > 1.0 { 0.0 } else { 1.0 };
    }
    let x = u.tan();
    t_kernel(x, nu) / (c * c)
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    adaptive(f, a, m, left, tol / 2.0, depth - 1) + adaptive(f, m, b, right, tol / 2.0, depth - 1)
}

pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    // split into panels so the adaptive rule cannot be fooled by symmetry
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = lo + h;
            adaptive(f, lo, hi, simpson(f, lo, hi), tol / panels as f64, 40)
        })
        .sum()
}

/// P(T > t) by quadrature of the t density, normalized numerically.
pub fn t_sf_quadrature(t: f64, df: u32) -> f64 {
    let nu = f64::from(df);
    let f = move |u: f64| t_kernel_u(u, nu);
    let total = integrate(&f, -FRAC_PI_2, FRAC_PI_2, 1e-14);
    let tail = integrate(&f, t.atan(), FRAC_PI_2, 1e-14);
    tail / total
}

/// Cauchy check for the quadrature itself: P(T > t) = 1/2 - atan(t)/π.
pub fn cauchy_sf(t: f64) -> f64 {
    0.5 - t.atan() / PI
}
