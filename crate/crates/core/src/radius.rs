//! Radius functions, the tube functions R and Q built from them, and the
//! regularity classification of a (curve, radius) pair.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::FramedCurve;
use crate::error::{Error, Result};
use crate::grid::Interval;

/// Slopes with |1 - r'²| at or below this are treated as |r'| = 1.
pub const SLOPE_EPS: f64 = 1e-12;

/// Default number of samples used by [`regularity_check`].
pub const REGULARITY_SAMPLES: usize = 257;

/// Residual threshold for recognising the affine and square-root families.
pub const FAMILY_FIT_TOL: f64 = 1e-9;

/// Curves whose sampled curvature stays below this are treated as straight.
pub const STRAIGHT_TOL: f64 = 1e-9;

type RadiusFn = dyn Fn(f64) -> [f64; 5] + Send + Sync;

/// A user supplied radius given by `[r, r', r'', r''', r'''']`.
#[derive(Clone)]
pub struct AnalyticRadius {
    jet: Arc<RadiusFn>,
    domain: Interval,
}

impl AnalyticRadius {
    pub fn new<F>(domain: Interval, jet: F) -> Self
    where
        F: Fn(f64) -> [f64; 5] + Send + Sync + 'static,
    {
        Self { jet: Arc::new(jet), domain }
    }
}

impl fmt::Debug for AnalyticRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticRadius").field("domain", &self.domain).finish_non_exhaustive()
    }
}

fn one() -> f64 {
    1.0
}

/// Radius function description, e.g. `{"family":"constant","value":2.0}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RadiusSpec {
    Constant {
        value: f64,
    },
    /// r = c₁ s + c₂.
    Affine {
        c1: f64,
        c2: f64,
    },
    /// r = √(s² - 2c₁ s + 2c₂).
    SqrtQuadratic {
        c1: f64,
        c2: f64,
    },
    /// r = mean + amplitude · sin(frequency · s + phase).
    Sinusoid {
        mean: f64,
        amplitude: f64,
        #[serde(default = "one")]
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    #[serde(skip)]
    AnalyticJet(AnalyticRadius),
}

/// Branch of the square root in Q = ±r√(1 - r'²). Serialized as `1` / `-1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(format!("sign must be 1 or -1, got {v}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// r and its first four derivatives at one arclength value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusJet {
    pub s: f64,
    pub r: f64,
    pub dr: f64,
    pub d2r: f64,
    pub d3r: f64,
    pub d4r: f64,
}

/// R = r r' and Q = ±r√(1 - r'²) with derivatives up to order three.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TubeFunctions {
    /// R, R', R'', R'''.
    pub axial: [f64; 4],
    /// Q, Q', Q'', Q'''.
    pub circle: [f64; 4],
    pub sign: Sign,
}

impl TubeFunctions {
    pub fn r(&self) -> f64 {
        self.axial[0]
    }

    pub fn q(&self) -> f64 {
        self.circle[0]
    }
}

impl RadiusSpec {
    /// Interval where the radius is defined; unbounded for the closed-form families.
    pub fn domain(&self) -> Interval {
        match self {
            RadiusSpec::AnalyticJet(a) => a.domain,
            _ => Interval::unbounded(),
        }
    }

    fn validate(&self) -> Result<()> {
        let params: Vec<f64> = match self {
            RadiusSpec::Constant { value } => vec![*value],
            RadiusSpec::Affine { c1, c2 } | RadiusSpec::SqrtQuadratic { c1, c2 } => vec![*c1, *c2],
            RadiusSpec::Sinusoid { mean, amplitude, frequency, phase } => vec![*mean, *amplitude, *frequency, *phase],
            RadiusSpec::AnalyticJet(_) => Vec::new(),
        };
        if params.iter().all(|p| p.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidParams("radius parameters must be finite".into()))
        }
    }

    /// `[r, r', r'', r''', r'''']` without positivity or slope checks.
    fn raw(&self, s: f64) -> [f64; 5] {
        match self {
            RadiusSpec::Constant { value } => [*value, 0.0, 0.0, 0.0, 0.0],
            RadiusSpec::Affine { c1, c2 } => [c1 * s + c2, *c1, 0.0, 0.0, 0.0],
            RadiusSpec::SqrtQuadratic { c1, c2 } => {
                // r r' = s - c₁ and r r'' + r'² = 1, so r'' = D/r³ with D = 2c₂ - c₁².
                let u = s * s - 2.0 * c1 * s + 2.0 * c2;
                let r = u.sqrt();
                let d = 2.0 * c2 - c1 * c1;
                let dr = (s - c1) / r;
                let d2r = d / r.powi(3);
                let d3r = -3.0 * d * dr / r.powi(4);
                let d4r = 12.0 * d * dr * dr / r.powi(5) - 3.0 * d * d2r / r.powi(4);
                [r, dr, d2r, d3r, d4r]
            }
            RadiusSpec::Sinusoid { mean, amplitude, frequency, phase } => {
                let (a, w) = (*amplitude, *frequency);
                let (sin, cos) = (w * s + phase).sin_cos();
                [mean + a * sin, a * w * cos, -a * w * w * sin, -a * w.powi(3) * cos, a * w.powi(4) * sin]
            }
            RadiusSpec::AnalyticJet(a) => (a.jet)(s),
        }
    }
}

/// r(s) and derivatives, rejecting r ≤ 0 and |r'| ≥ 1.
pub fn radius_jet(spec: &RadiusSpec, s: f64) -> Result<RadiusJet> {
    spec.validate()?;
    spec.domain().check(s)?;
    let [r, dr, d2r, d3r, d4r] = spec.raw(s);
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius { s, r });
    }
    if !(1.0 - dr * dr > SLOPE_EPS) {
        return Err(Error::SlopeExceedsOne { s, slope: dr.abs() });
    }
    Ok(RadiusJet { s, r, dr, d2r, d3r, d4r })
}

/// R and Q chains from a radius jet.
///
/// R' = r'² + r r'', R'' = 3r'r'' + r r''', R''' = 3r''² + 4r'r''' + r r''''.
/// Q follows from Q² = r² - R², i.e. Q Q' = R(1 - R'), differentiated twice more.
pub fn tube_functions(jet: &RadiusJet, sign: Sign) -> Result<TubeFunctions> {
    let RadiusJet { s, r, dr, d2r, d3r, d4r } = *jet;
    let slack = 1.0 - dr * dr;
    if slack.abs() <= SLOPE_EPS || slack < 0.0 {
        return Err(Error::DegenerateQ { s });
    }
    let big_r = r * dr;
    let r1 = dr * dr + r * d2r;
    let r2 = 3.0 * dr * d2r + r * d3r;
    let r3 = 3.0 * d2r * d2r + 4.0 * dr * d3r + r * d4r;
    let q = sign.value() * r * slack.sqrt();
    if q == 0.0 {
        return Err(Error::DegenerateQ { s });
    }
    let q1 = big_r * (1.0 - r1) / q;
    let q2 = (r1 - r1 * r1 - big_r * r2 - q1 * q1) / q;
    let q3 = (r2 - 3.0 * r1 * r2 - big_r * r3 - 3.0 * q1 * q2) / q;
    Ok(TubeFunctions { axial: [big_r, r1, r2, r3], circle: [q, q1, q2, q3], sign })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularityStatus {
    Regular,
    DegenerateFirstForm,
    DegenerateSecondForm,
    NotASurface,
}

/// Independent findings behind a verdict. `regular_surface` is true when the
/// pair parametrizes a regular surface even if its second form degenerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityFlags {
    pub regular_surface: bool,
    pub degenerate_first_form: bool,
    pub degenerate_second_form: bool,
    pub straight_center: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub status: RegularityStatus,
    pub detail: String,
    pub flags: RegularityFlags,
}

/// Least-squares line through `(x, y)`: returns (slope, intercept, max |residual| / max(1, |y|)).
fn affine_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residual =
        xs.iter().zip(ys).map(|(x, y)| (slope * x + intercept - y).abs() / y.abs().max(1.0)).fold(0.0, f64::max);
    (slope, intercept, residual)
}

/// Classifies the canal surface of `(curve, spec)` over `interval`.
///
/// Checks run in order: the first form degenerates where r ≤ 0 or
/// |r'| ≥ 1 at some sample; a straight center with r = √(s² - 2c₁s + 2c₂)
/// collapses to a plane curve; a straight center with affine r has a
/// degenerate second form everywhere. Sampling is deterministic.
pub fn regularity_check(
    curve: &FramedCurve,
    spec: &RadiusSpec,
    interval: Interval,
    n_samples: usize,
) -> RegularityVerdict {
    let mut flags = RegularityFlags {
        regular_surface: false,
        degenerate_first_form: false,
        degenerate_second_form: false,
        straight_center: false,
    };
    let verdict = |status, detail: String, flags| RegularityVerdict { status, detail, flags };
    if !interval.is_finite() || spec.validate().is_err() {
        flags.degenerate_first_form = true;
        return verdict(
            RegularityStatus::DegenerateFirstForm,
            "interval must be finite and parameters finite".into(),
            flags,
        );
    }
    let samples = interval.linspace(n_samples.max(3));
    let jets: Vec<[f64; 5]> = samples.iter().map(|&s| spec.raw(s)).collect();

    if let Some((s, j)) = samples.iter().zip(&jets).find(|(_, j)| !(j[0] > 0.0)) {
        flags.degenerate_first_form = true;
        return verdict(RegularityStatus::DegenerateFirstForm, format!("r({s}) = {} is not positive", j[0]), flags);
    }
    if let Some((s, j)) = samples.iter().zip(&jets).find(|(_, j)| !(1.0 - j[1] * j[1] > SLOPE_EPS)) {
        flags.degenerate_first_form = true;
        return verdict(
            RegularityStatus::DegenerateFirstForm,
            format!("|r'({s})| = {} reaches 1, so Q = 0", j[1].abs()),
            flags,
        );
    }

    let max_kappa = samples.iter().map(|&s| curve.curvature(s).unwrap_or(f64::NAN)).fold(0.0, |acc: f64, k| {
        if k.is_nan() {
            f64::NAN
        } else {
            acc.max(k)
        }
    });
    if max_kappa.is_nan() {
        flags.degenerate_first_form = true;
        return verdict(
            RegularityStatus::DegenerateFirstForm,
            "interval leaves the domain of the center curve".into(),
            flags,
        );
    }
    flags.straight_center = max_kappa <= STRAIGHT_TOL;
    flags.regular_surface = true;

    if flags.straight_center {
        let shifted: Vec<f64> = samples.iter().zip(&jets).map(|(s, j)| j[0] * j[0] - s * s).collect();
        let (slope, intercept, residual) = affine_fit(&samples, &shifted);
        if residual <= FAMILY_FIT_TOL {
            let (c1, c2) = (-0.5 * slope, 0.5 * intercept);
            flags.regular_surface = false;
            return verdict(
                RegularityStatus::NotASurface,
                format!("straight center with r = sqrt(s^2 - 2({c1})s + 2({c2})): the envelope is a plane curve"),
                flags,
            );
        }
        let radii: Vec<f64> = jets.iter().map(|j| j[0]).collect();
        let (c1, c2, residual) = affine_fit(&samples, &radii);
        if residual <= FAMILY_FIT_TOL {
            flags.degenerate_second_form = true;
            return verdict(
                RegularityStatus::DegenerateSecondForm,
                format!("straight center with affine r = {c1}s + {c2}: eg - f^2 = 0"),
                flags,
            );
        }
    }
    verdict(RegularityStatus::Regular, "regular".into(), flags)
}
