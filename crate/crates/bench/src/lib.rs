//! Shared surfaces for the criterion benchmarks.

use std::f64::consts::PI;

use canalkit_core::{CanalSurface, CurveSpec, FramedCurve, Interval, RadiusSpec, Sign};

fn build(curve: CurveSpec, radius: RadiusSpec, sign: Sign) -> CanalSurface {
    let window = Interval::new(0.0, 2.0 * PI).expect("finite window");
    CanalSurface::new(FramedCurve::new(curve).expect("valid curve"), radius, sign, window).expect("valid surface")
}

/// Helix (½cos s, ½sin s, s√3/2) with constant radius 2.
pub fn helix_tube() -> CanalSurface {
    build(CurveSpec::Helix { a: 0.5, b: 0.75f64.sqrt() }, RadiusSpec::Constant { value: 2.0 }, Sign::Minus)
}

/// Same helix with radius 2 + 0.3 sin s.
pub fn generic_canal() -> CanalSurface {
    build(
        CurveSpec::Helix { a: 0.5, b: 0.75f64.sqrt() },
        RadiusSpec::Sinusoid { mean: 2.0, amplitude: 0.3, frequency: 1.0, phase: 0.0 },
        Sign::Plus,
    )
}
