//! Unit-speed center curves and their Frenet apparatus.
//!
//! Built-in families are unit speed by construction. Arbitrary curves enter
//! through [`AnalyticCurve`], a callback that returns the position and the
//! first four derivatives; those are checked for unit speed when the curve
//! is built.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Interval;

pub type Vec3 = Vector3<f64>;

/// Below this |α''| a curve point is treated as straight.
pub const KAPPA_MIN: f64 = 1e-12;

/// Tolerance used when an analytic curve is validated at construction.
pub const UNIT_SPEED_TOL: f64 = 1e-9;

/// Samples used when an analytic curve is validated at construction.
pub const UNIT_SPEED_SAMPLES: usize = 257;

/// Position and derivatives α', α'', α''', α'''' at one arclength value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveJet {
    pub position: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
    pub d3: Vec3,
    pub d4: Vec3,
}

type JetFn = dyn Fn(f64) -> CurveJet + Send + Sync;

/// A user supplied curve given by its derivative jet.
#[derive(Clone)]
pub struct AnalyticCurve {
    jet: Arc<JetFn>,
    domain: Interval,
    fixed_frame: bool,
}

impl AnalyticCurve {
    /// `domain` must be finite; it is the window sampled by unit-speed validation.
    pub fn new<F>(domain: Interval, jet: F) -> Self
    where
        F: Fn(f64) -> CurveJet + Send + Sync + 'static,
    {
        Self { jet: Arc::new(jet), domain, fixed_frame: false }
    }

    /// Use the deterministic fixed frame wherever the curvature vanishes
    /// instead of failing with [`Error::VanishingCurvature`].
    pub fn with_fixed_frame(mut self) -> Self {
        self.fixed_frame = true;
        self
    }

    pub fn jet(&self, s: f64) -> CurveJet {
        (self.jet)(s)
    }
}

impl fmt::Debug for AnalyticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticCurve")
            .field("domain", &self.domain)
            .field("fixed_frame", &self.fixed_frame)
            .finish_non_exhaustive()
    }
}

fn origin() -> [f64; 3] {
    [0.0; 3]
}

fn x_axis() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

/// Center curve description, deserializable from scene files, e.g.
/// `{"family":"helix","a":0.5,"b":0.8660254037844386}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CurveSpec {
    /// α(s) = origin + s·direction/|direction|.
    Line {
        #[serde(default = "origin")]
        origin: [f64; 3],
        #[serde(default = "x_axis")]
        direction: [f64; 3],
    },
    /// Circle of the given radius about the origin in the z = 0 plane.
    Circle { radius: f64 },
    /// (a cos(s/c), a sin(s/c), b s/c) with c = √(a² + b²).
    Helix { a: f64, b: f64 },
    #[serde(skip)]
    AnalyticJet(AnalyticCurve),
}

/// Frenet apparatus at one arclength value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameJet {
    pub s: f64,
    pub position: Vec3,
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
    pub kappa: f64,
    pub kappa_prime: f64,
    pub tau: f64,
}

#[derive(Clone, Debug)]
enum Family {
    Line { origin: Vec3, direction: Vec3 },
    Circle { radius: f64 },
    Helix { a: f64, b: f64, c: f64 },
    Analytic(AnalyticCurve),
}

/// A validated unit-speed curve. Evaluation is pure.
#[derive(Clone, Debug)]
pub struct FramedCurve {
    family: Family,
    domain: Interval,
}

fn finite(values: &[f64]) -> bool {
    values.iter().all(|v| v.is_finite())
}

impl FramedCurve {
    pub fn new(spec: CurveSpec) -> Result<Self> {
        let family = match spec {
            CurveSpec::Line { origin, direction } => {
                if !finite(&origin) || !finite(&direction) {
                    return Err(Error::InvalidParams("line parameters must be finite".into()));
                }
                let direction = Vec3::from(direction);
                let norm = direction.norm();
                if norm == 0.0 {
                    return Err(Error::InvalidParams("line direction is zero".into()));
                }
                Family::Line { origin: Vec3::from(origin), direction: direction / norm }
            }
            CurveSpec::Circle { radius } => {
                if !radius.is_finite() || radius <= 0.0 {
                    return Err(Error::InvalidParams(format!("circle radius must be positive, got {radius}")));
                }
                Family::Circle { radius }
            }
            CurveSpec::Helix { a, b } => {
                if !a.is_finite() || !b.is_finite() || a <= 0.0 {
                    return Err(Error::InvalidParams(format!("helix needs finite a > 0, got a = {a}, b = {b}")));
                }
                Family::Helix { a, b, c: a.hypot(b) }
            }
            CurveSpec::AnalyticJet(curve) => {
                if !curve.domain.is_finite() {
                    return Err(Error::InvalidParams("analytic curve domain must be finite".into()));
                }
                let domain = curve.domain;
                let candidate = Self { family: Family::Analytic(curve), domain };
                let deviation = candidate.max_speed_deviation(domain, UNIT_SPEED_SAMPLES);
                if !(deviation <= UNIT_SPEED_TOL) {
                    return Err(Error::NotUnitSpeed { deviation });
                }
                return Ok(candidate);
            }
        };
        Ok(Self { family, domain: Interval::unbounded() })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// True for the line family, whose curvature vanishes identically.
    pub fn is_line(&self) -> bool {
        matches!(self.family, Family::Line { .. })
    }

    pub fn jet(&self, s: f64) -> Result<CurveJet> {
        self.domain.check(s)?;
        Ok(self.jet_unchecked(s))
    }

    fn jet_unchecked(&self, s: f64) -> CurveJet {
        match &self.family {
            Family::Line { origin, direction } => CurveJet {
                position: origin + direction * s,
                d1: *direction,
                d2: Vec3::zeros(),
                d3: Vec3::zeros(),
                d4: Vec3::zeros(),
            },
            Family::Circle { radius } => {
                let rho = *radius;
                let (sin, cos) = (s / rho).sin_cos();
                CurveJet {
                    position: Vec3::new(rho * cos, rho * sin, 0.0),
                    d1: Vec3::new(-sin, cos, 0.0),
                    d2: Vec3::new(-cos, -sin, 0.0) / rho,
                    d3: Vec3::new(sin, -cos, 0.0) / (rho * rho),
                    d4: Vec3::new(cos, sin, 0.0) / (rho * rho * rho),
                }
            }
            Family::Helix { a, b, c } => {
                let (a, b, c) = (*a, *b, *c);
                let (sin, cos) = (s / c).sin_cos();
                CurveJet {
                    position: Vec3::new(a * cos, a * sin, b * s / c),
                    d1: Vec3::new(-a * sin, a * cos, b) / c,
                    d2: Vec3::new(-cos, -sin, 0.0) * (a / (c * c)),
                    d3: Vec3::new(sin, -cos, 0.0) * (a / c.powi(3)),
                    d4: Vec3::new(cos, sin, 0.0) * (a / c.powi(4)),
                }
            }
            Family::Analytic(curve) => curve.jet(s),
        }
    }

    fn has_fixed_frame(&self) -> bool {
        match &self.family {
            Family::Line { .. } => true,
            Family::Analytic(curve) => curve.fixed_frame,
            _ => false,
        }
    }

    /// T, N, B, κ, κ' and τ at `s`.
    ///
    /// κ = |α''|, τ = det(α', α'', α''')/κ², κ' = (α''·α''')/κ. Where κ is
    /// below [`KAPPA_MIN`] and the curve allows it, the fixed frame of
    /// [`fixed_frame`] is returned with κ = κ' = τ = 0.
    pub fn frenet_apparatus(&self, s: f64) -> Result<FrameJet> {
        let jet = self.jet(s)?;
        let kappa = jet.d2.norm();
        if kappa < KAPPA_MIN {
            if !self.has_fixed_frame() {
                return Err(Error::VanishingCurvature { s });
            }
            let (tangent, normal, binormal) = fixed_frame(&jet.d1);
            return Ok(FrameJet {
                s,
                position: jet.position,
                tangent,
                normal,
                binormal,
                kappa: 0.0,
                kappa_prime: 0.0,
                tau: 0.0,
            });
        }
        let tangent = jet.d1;
        let normal = jet.d2 / kappa;
        let binormal = tangent.cross(&normal);
        let det = Matrix3::from_columns(&[jet.d1, jet.d2, jet.d3]).determinant();
        Ok(FrameJet {
            s,
            position: jet.position,
            tangent,
            normal,
            binormal,
            kappa,
            kappa_prime: jet.d2.dot(&jet.d3) / kappa,
            tau: det / (kappa * kappa),
        })
    }

    /// Curvature |α''(s)| without building a frame.
    pub fn curvature(&self, s: f64) -> Result<f64> {
        Ok(self.jet(s)?.d2.norm())
    }

    fn max_speed_deviation(&self, window: Interval, n_samples: usize) -> f64 {
        window
            .linspace(n_samples.max(2))
            .into_iter()
            .map(|s| (self.jet_unchecked(s).d1.norm() - 1.0).abs())
            .fold(0.0, |acc, d| if d.is_nan() { f64::NAN } else { acc.max(d) })
    }

    /// True iff | |α'(sᵢ)| - 1 | ≤ `tol` at `n_samples` uniform samples of `window`.
    pub fn validate_unit_speed(&self, window: Interval, n_samples: usize, tol: f64) -> bool {
        self.max_speed_deviation(window, n_samples) <= tol
    }
}

/// Orthonormal frame for a straight piece with unit tangent `direction`.
///
/// N is the first basis vector e₁, e₂, e₃ not parallel to the tangent,
/// Gram-Schmidt orthogonalized against it; B = T × N. For the x-axis this
/// is (e₁, e₂, e₃).
pub fn fixed_frame(direction: &Vec3) -> (Vec3, Vec3, Vec3) {
    let tangent = direction.normalize();
    let normal = (0..3)
        .map(|i| {
            let mut e = Vec3::zeros();
            e[i] = 1.0;
            e
        })
        .find(|e| tangent.cross(e).norm() > 1e-8)
        .map(|e| (e - tangent * tangent.dot(&e)).normalize())
        .expect("a unit vector is parallel to at most one basis vector");
    (tangent, normal, tangent.cross(&normal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const SQRT3_2: f64 = 0.866_025_403_784_438_6;

    fn helix() -> FramedCurve {
        FramedCurve::new(CurveSpec::Helix { a: 0.5, b: SQRT3_2 }).unwrap()
    }

    #[test]
    fn x_axis_uses_standard_basis() {
        let line = FramedCurve::new(CurveSpec::Line { origin: [0.0; 3], direction: [1.0, 0.0, 0.0] }).unwrap();
        let f = line.frenet_apparatus(2.5).unwrap();
        assert_eq!(f.position, Vec3::new(2.5, 0.0, 0.0));
        assert_eq!(f.tangent, Vec3::x());
        assert_eq!(f.normal, Vec3::y());
        assert_eq!(f.binormal, Vec3::z());
        assert_eq!((f.kappa, f.kappa_prime, f.tau), (0.0, 0.0, 0.0));
    }

    #[test]
    fn fixed_frame_for_oblique_and_axis_aligned_lines() {
        let (t, n, b) = fixed_frame(&Vec3::new(1.0, 1.0, 0.0));
        assert!((n - Vec3::new(1.0, -1.0, 0.0).normalize()).norm() < 1e-15);
        assert!((t.cross(&n) - b).norm() < 1e-15);
        let (_, n, b) = fixed_frame(&Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(n, Vec3::x());
        assert_eq!(b, Vec3::y());
    }

    #[test]
    fn helix_is_the_standard_one() {
        let c = helix();
        let j = c.jet(0.0).unwrap();
        assert!((j.position - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-15);
        let f = c.frenet_apparatus(1.3).unwrap();
        assert!((f.kappa - 0.5).abs() < 1e-15);
        assert!((f.tau - SQRT3_2).abs() < 1e-15);
        assert!(f.kappa_prime.abs() < 1e-15);
    }

    #[test]
    fn circle_curvature() {
        let c = FramedCurve::new(CurveSpec::Circle { radius: 2.0 }).unwrap();
        let f = c.frenet_apparatus(0.0).unwrap();
        assert!((f.kappa - 0.5).abs() < 1e-15);
        assert!(f.tau.abs() < 1e-15);
        assert!((f.normal + Vec3::x()).norm() < 1e-15);
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(matches!(FramedCurve::new(CurveSpec::Helix { a: 0.0, b: 1.0 }), Err(Error::InvalidParams(_))));
        assert!(matches!(FramedCurve::new(CurveSpec::Helix { a: f64::NAN, b: 1.0 }), Err(Error::InvalidParams(_))));
        assert!(matches!(FramedCurve::new(CurveSpec::Circle { radius: -1.0 }), Err(Error::InvalidParams(_))));
        assert!(matches!(
            FramedCurve::new(CurveSpec::Line { origin: [0.0; 3], direction: [0.0; 3] }),
            Err(Error::InvalidParams(_))
        ));
    }

    fn doubled_speed_line() -> AnalyticCurve {
        AnalyticCurve::new(Interval::new(-1.0, 1.0).unwrap(), |s| CurveJet {
            position: Vec3::new(2.0 * s, 0.0, 0.0),
            d1: Vec3::new(2.0, 0.0, 0.0),
            d2: Vec3::zeros(),
            d3: Vec3::zeros(),
            d4: Vec3::zeros(),
        })
    }

    #[test]
    fn non_unit_speed_jet_rejected() {
        let err = FramedCurve::new(CurveSpec::AnalyticJet(doubled_speed_line())).unwrap_err();
        assert!(matches!(err, Error::NotUnitSpeed { deviation } if (deviation - 1.0).abs() < 1e-15));
    }

    fn half_angle_circle() -> AnalyticCurve {
        AnalyticCurve::new(Interval::new(0.0, 4.0 * PI).unwrap(), |s| {
            let (sin, cos) = (s / 2.0).sin_cos();
            CurveJet {
                position: Vec3::new(2.0 * cos, 2.0 * sin, 0.0),
                d1: Vec3::new(-sin, cos, 0.0),
                d2: Vec3::new(-cos, -sin, 0.0) * 0.5,
                d3: Vec3::new(sin, -cos, 0.0) * 0.25,
                d4: Vec3::new(cos, sin, 0.0) * 0.125,
            }
        })
    }

    #[test]
    fn unit_speed_validation() {
        let window = Interval::new(0.0, 2.0 * PI).unwrap();
        assert!(helix().validate_unit_speed(window, 100, 1e-10));
        let circle = FramedCurve::new(CurveSpec::AnalyticJet(half_angle_circle())).unwrap();
        assert!(circle.validate_unit_speed(circle.domain(), 100, 1e-10));
    }

    #[test]
    fn analytic_curve_outside_domain() {
        let circle = FramedCurve::new(CurveSpec::AnalyticJet(half_angle_circle())).unwrap();
        assert!(matches!(circle.frenet_apparatus(-0.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn straight_analytic_curve_needs_fixed_frame() {
        let straight = AnalyticCurve::new(Interval::new(-1.0, 1.0).unwrap(), |s| CurveJet {
            position: Vec3::new(0.0, s, 0.0),
            d1: Vec3::y(),
            d2: Vec3::zeros(),
            d3: Vec3::zeros(),
            d4: Vec3::zeros(),
        });
        let c = FramedCurve::new(CurveSpec::AnalyticJet(straight.clone())).unwrap();
        assert!(matches!(c.frenet_apparatus(0.0), Err(Error::VanishingCurvature { .. })));
        let c = FramedCurve::new(CurveSpec::AnalyticJet(straight.with_fixed_frame())).unwrap();
        let f = c.frenet_apparatus(0.0).unwrap();
        assert_eq!(f.normal, Vec3::x());
        assert_eq!(f.binormal, -Vec3::z());
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec: CurveSpec = serde_json::from_str(r#"{"family":"helix","a":0.5,"b":0.8660254037844386}"#).unwrap();
        assert!(matches!(spec, CurveSpec::Helix { a, b } if a == 0.5 && b == SQRT3_2));
        let spec: CurveSpec = serde_json::from_str(r#"{"family":"line"}"#).unwrap();
        assert!(matches!(spec, CurveSpec::Line { direction: [1.0, 0.0, 0.0], .. }));
    }
}
