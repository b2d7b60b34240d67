#![allow(dead_code)]

use std::f64::consts::PI;

use canalkit_core::{CanalSurface, CurveSpec, FramedCurve, GridSpec, Interval, ParamGrid, RadiusSpec, Sign};

pub const SQRT3_2: f64 = 0.866_025_403_784_438_6;

pub struct Fixture {
    pub name: &'static str,
    pub surface: CanalSurface,
    pub grid: ParamGrid,
}

pub fn build(curve: CurveSpec, radius: RadiusSpec, sign: Sign, s_range: (f64, f64)) -> CanalSurface {
    let window = Interval::new(s_range.0, s_range.1).unwrap();
    CanalSurface::new(FramedCurve::new(curve).unwrap(), radius, sign, window).unwrap()
}

pub fn helix() -> CurveSpec {
    CurveSpec::Helix { a: 0.5, b: SQRT3_2 }
}

pub fn line() -> CurveSpec {
    CurveSpec::Line { origin: [0.0; 3], direction: [1.0, 0.0, 0.0] }
}

pub fn wavy() -> RadiusSpec {
    RadiusSpec::Sinusoid { mean: 2.0, amplitude: 0.3, frequency: 1.0, phase: 0.0 }
}

fn grid(surface: &CanalSurface, t_exclude: f64) -> ParamGrid {
    ParamGrid::new(surface.s_range(), GridSpec { ns: 33, nt: 65, t_exclude })
}

/// Helix tube of radius 2 on the branch whose focal circle sits at t = 0.
pub fn helix_tube() -> Fixture {
    let surface = build(helix(), RadiusSpec::Constant { value: 2.0 }, Sign::Minus, (0.0, 2.0 * PI));
    Fixture { name: "helix tube", grid: grid(&surface, 0.1), surface }
}

/// Circle of radius 2 swept by spheres of radius 1.
pub fn torus() -> Fixture {
    let surface =
        build(CurveSpec::Circle { radius: 2.0 }, RadiusSpec::Constant { value: 1.0 }, Sign::Plus, (0.0, 4.0 * PI));
    Fixture { name: "torus", grid: grid(&surface, 0.0), surface }
}

/// Straight center with radius 2 + 0.3 sin s.
pub fn revolution() -> Fixture {
    let surface = build(line(), wavy(), Sign::Plus, (0.0, 2.0 * PI));
    Fixture { name: "revolution", grid: grid(&surface, 0.0), surface }
}

/// Helix center with radius 2 + 0.3 sin s: neither tube nor revolution.
pub fn generic() -> Fixture {
    let surface = build(helix(), wavy(), Sign::Plus, (0.0, 2.0 * PI));
    Fixture { name: "generic canal", grid: grid(&surface, 0.0), surface }
}

/// Straight center with constant radius `c`.
pub fn cylinder(c: f64) -> Fixture {
    let surface = build(line(), RadiusSpec::Constant { value: c }, Sign::Plus, (0.0, 2.0 * PI));
    Fixture { name: "cylinder", grid: grid(&surface, 0.0), surface }
}

/// |a - b| / max(1, |b|).
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
