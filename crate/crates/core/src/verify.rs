//! Comparison of the closed forms against the finite-difference oracles over a grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{brioschi_oracle, gaussian, mean, second_gaussian, BrioschiDenominator};
use crate::error::{Error, Result};
use crate::grid::ParamGrid;
use crate::surface::{CanalSurface, ORACLE_STEP};
use crate::weingarten::JACOBI_TOL;

fn d_forms() -> f64 {
    1e-7
}
fn d_curvature() -> f64 {
    1e-7
}
fn d_second_gaussian() -> f64 {
    1e-5
}
fn d_area() -> f64 {
    1e-10
}
fn d_jacobi() -> f64 {
    JACOBI_TOL
}
fn d_step() -> f64 {
    ORACLE_STEP
}

/// Relative tolerances, each applied as |a - b| ≤ tol · max(1, |b|).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "d_forms")]
    pub forms: f64,
    #[serde(default = "d_curvature")]
    pub curvature: f64,
    #[serde(default = "d_second_gaussian")]
    pub second_gaussian: f64,
    #[serde(default = "d_area")]
    pub area: f64,
    #[serde(default = "d_jacobi")]
    pub jacobi: f64,
    #[serde(default = "d_step")]
    pub oracle_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            forms: d_forms(),
            curvature: d_curvature(),
            second_gaussian: d_second_gaussian(),
            area: d_area(),
            jacobi: d_jacobi(),
            oracle_step: d_step(),
        }
    }
}

/// Largest first-form condition number (E + G)² / (EG - F²) at which the
/// oracle K and H are compared. Differenced E, F, G carry absolute errors near
/// 1e-12, which the division by EG - F² amplifies next to the focal set.
pub const ORACLE_CONDITION_MAX: f64 = 1e6;

/// |a - b| / max(1, |b|).
pub fn relative_delta(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub max_delta: f64,
    pub tolerance: f64,
    pub points: usize,
    pub worst_point: Option<(f64, f64)>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub masked: usize,
    /// Regular points left out of the K and H checks by `ORACLE_CONDITION_MAX`.
    pub ill_conditioned: usize,
    pub passed: bool,
}

#[derive(Default)]
struct Acc {
    max: f64,
    worst: Option<(f64, f64)>,
    points: usize,
}

impl Acc {
    fn add(&mut self, delta: f64, at: (f64, f64)) {
        self.points += 1;
        if self.worst.is_none() || delta > self.max || delta.is_nan() {
            self.max = if delta.is_nan() { f64::INFINITY } else { delta };
            self.worst = Some(at);
        }
    }

    fn check(self, name: &str, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            max_delta: self.max,
            tolerance,
            points: self.points,
            worst_point: self.worst,
            passed: self.max <= tolerance,
        }
    }
}

/// Per-point deltas: forms, area expansion, K, H and optionally K_II.
struct PointDeltas {
    forms: f64,
    area: f64,
    /// K and H deltas, absent where the first form is ill-conditioned.
    k_h: Option<(f64, f64)>,
    k_ii: Option<f64>,
}

fn point_deltas(surf: &CanalSurface, s: f64, t: f64, tol: &Tolerances) -> Result<Option<PointDeltas>> {
    if !surf.is_regular(s, t)? {
        return Ok(None);
    }
    let oracle = match surf.forms_oracle(s, t, tol.oracle_step) {
        Ok(o) => o,
        Err(Error::SingularPoint { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let jet = surf.jet(s)?;
    let closed = jet.forms(t);
    let forms = closed.as_array().iter().zip(oracle.as_array()).map(|(a, b)| relative_delta(*a, b)).fold(0.0, f64::max);
    let area = relative_delta(jet.area2_expanded(t), closed.area2);
    let condition = (closed.E + closed.G).powi(2) / closed.area2;
    let k_h = if condition <= ORACLE_CONDITION_MAX {
        Some((
            relative_delta(gaussian(surf, s, t)?, oracle.gaussian()),
            relative_delta(mean(surf, s, t)?, oracle.mean()),
        ))
    } else {
        None
    };
    let k_ii = match second_gaussian(surf, s, t) {
        Ok(v) => {
            let b = brioschi_oracle(surf, s, t, tol.oracle_step, BrioschiDenominator::Standard)?;
            Some(relative_delta(v, b))
        }
        Err(Error::DegenerateSecondForm { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(Some(PointDeltas { forms, area, k_h, k_ii }))
}

/// Runs every oracle comparison over `grid`. Singular points are counted as
/// masked; near-focal points only skip the K and H comparisons.
pub fn verify(surf: &CanalSurface, grid: &ParamGrid, tol: &Tolerances) -> Result<VerifyReport> {
    let results: Vec<((f64, f64), Option<PointDeltas>)> = grid
        .points()
        .into_par_iter()
        .map(|(s, t)| Ok(((s, t), point_deltas(surf, s, t, tol)?)))
        .collect::<Result<_>>()?;
    let mut forms = Acc::default();
    let mut area = Acc::default();
    let mut k = Acc::default();
    let mut h = Acc::default();
    let mut k_ii = Acc::default();
    let mut masked = 0;
    let mut ill_conditioned = 0;
    for (at, d) in results {
        let Some(d) = d else {
            masked += 1;
            continue;
        };
        forms.add(d.forms, at);
        area.add(d.area, at);
        match d.k_h {
            Some((dk, dh)) => {
                k.add(dk, at);
                h.add(dh, at);
            }
            None => ill_conditioned += 1,
        }
        if let Some(x) = d.k_ii {
            k_ii.add(x, at);
        }
    }
    if forms.points == 0 {
        return Err(Error::EmptyGrid);
    }
    let checks = vec![
        forms.check("forms", tol.forms),
        area.check("area_expansion", tol.area),
        k.check("gaussian", tol.curvature),
        h.check("mean", tol.curvature),
        k_ii.check("second_gaussian", tol.second_gaussian),
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { checks, masked, ill_conditioned, passed })
}
