//! Weingarten conditions and linear curvature relations.
//!
//! A surface is (X, Y)-Weingarten when the Jacobian Φ = X_t Y_s - X_s Y_t of
//! two curvatures vanishes identically. Φ is evaluated from finite
//! differences of the closed-form curvatures; the leading factors of its
//! expansion in cos t are available separately as cheap obstructions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{
    gaussian_at, mean_at, mean_outward_at, second_gaussian_at, second_gaussian_outward_at, singular, KiiForm,
};
use crate::curve::Vec3;
use crate::diff;
use crate::error::{Error, Result};
use crate::grid::ParamGrid;
use crate::radius::RegularityStatus;
use crate::surface::{CanalJet, CanalSurface};

/// Finite-difference step for the curvature partials in Φ.
pub const JACOBI_STEP: f64 = 1e-3;

/// Default relative tolerance for Weingarten verdicts.
pub const JACOBI_TOL: f64 = 1e-6;

/// Smallest number of usable points for a linear fit.
pub const MIN_FIT_POINTS: usize = 8;

/// Relative gap below which the two smallest singular values count as equal.
pub const RANK_GAP: f64 = 1e-12;

/// A pair (X, Y) of curvatures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CurvaturePair {
    /// X = H, Y = K.
    KH,
    /// X = H, Y = K_II.
    HKII,
    /// X = K, Y = K_II.
    KKII,
}

impl CurvaturePair {
    pub const ALL: [CurvaturePair; 3] = [CurvaturePair::KH, CurvaturePair::HKII, CurvaturePair::KKII];

    fn uses_kii(self) -> bool {
        !matches!(self, CurvaturePair::KH)
    }

    /// (X, Y) with H and K_II taken for a fixed `orientation`, so that
    /// stencils straddling the focal set differentiate smooth functions.
    fn values(self, jet: &CanalJet, t: f64, orientation: f64) -> Result<(f64, f64)> {
        let h = || Ok::<_, Error>(orientation * mean_outward_at(jet, t)?);
        let kii = || Ok::<_, Error>(orientation * second_gaussian_outward_at(jet, t, KiiForm::Reconciled)?);
        Ok(match self {
            CurvaturePair::KH => (h()?, gaussian_at(jet, t)?),
            CurvaturePair::HKII => (h()?, kii()?),
            CurvaturePair::KKII => (gaussian_at(jet, t)?, kii()?),
        })
    }
}

impl fmt::Display for CurvaturePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurvaturePair::KH => "KH",
            CurvaturePair::HKII => "HKII",
            CurvaturePair::KKII => "KKII",
        })
    }
}

/// Φ at one point and the magnitude it is judged against,
/// max(|X_s Y_t|, |X_t Y_s|, 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiValue {
    pub value: f64,
    pub scale: f64,
}

impl JacobiValue {
    pub fn scaled(&self) -> f64 {
        self.value.abs() / self.scale
    }
}

/// Φ = X_t Y_s - X_s Y_t with partials by finite differences of step `h`.
pub fn jacobi(surf: &CanalSurface, pair: CurvaturePair, s: f64, t: f64, h: f64) -> Result<JacobiValue> {
    let orientation = surf.jet(s)?.orientation(t);
    let xy = |s: f64, t: f64| {
        let (x, y) = pair.values(&surf.jet_unchecked(s)?, t, orientation)?;
        Ok(Vec3::new(x, y, 0.0))
    };
    let d_s: Vec3 = diff::first(|u| xy(u, t), s, h)?;
    let d_t: Vec3 = diff::first(|u| xy(s, u), t, h)?;
    let (a, b) = (d_t.x * d_s.y, d_s.x * d_t.y);
    Ok(JacobiValue { value: a - b, scale: a.abs().max(b.abs()).max(1.0) })
}

/// Leading factor of the cos t expansion of Φ for `pair`, evaluated as printed:
/// 2Q²κ⁶r²r'(2Q²R² + R⁴ + Q⁴) for (H, K),
/// 128Q²κ¹⁰r⁵r'{4Q²R²(Q² + R⁴) + 6Q⁴R⁴ + R⁸ + Q⁸} for (H, K_II),
/// 64Q²κ¹⁰r⁶r'{4Q²R²(Q⁴ + R⁴) + R⁸ + 6Q⁴R⁴ + Q⁸} for (K, K_II).
pub fn leading_obstruction(surf: &CanalSurface, pair: CurvaturePair, s: f64) -> Result<f64> {
    let jet = surf.jet(s)?;
    let (r, rp, k) = (jet.radius.r, jet.radius.dr, jet.frame.kappa);
    let (q, big_r) = (jet.tube.q(), jet.tube.r());
    let (q2, r2) = (q * q, big_r * big_r);
    Ok(match pair {
        CurvaturePair::KH => 2.0 * q2 * k.powi(6) * r * r * rp * (2.0 * q2 * r2 + r2 * r2 + q2 * q2),
        CurvaturePair::HKII => {
            128.0
                * q2
                * k.powi(10)
                * r.powi(5)
                * rp
                * (4.0 * q2 * r2 * (q2 + r2 * r2) + 6.0 * q2 * q2 * r2 * r2 + r2.powi(4) + q2.powi(4))
        }
        CurvaturePair::KKII => {
            64.0 * q2
                * k.powi(10)
                * r.powi(6)
                * rp
                * (4.0 * q2 * r2 * (q2 * q2 + r2 * r2) + r2.powi(4) + 6.0 * q2 * q2 * r2 * r2 + q2.powi(4))
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    /// Every grid point was masked.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub max_abs_phi: f64,
    /// max |Φ| / scale over the evaluated points.
    pub max_scaled_phi: f64,
    /// Point where the scaled value is largest.
    pub worst_point: Option<(f64, f64)>,
    pub evaluated: usize,
    pub masked: usize,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub is_tube: bool,
    pub is_revolution: bool,
    pub is_cylinder: bool,
    pub max_abs_slope: f64,
    pub max_curvature: f64,
    pub tolerance: f64,
    pub weingarten: BTreeMap<CurvaturePair, PairVerdict>,
    pub notes: Vec<String>,
}

fn pair_verdict(surf: &CanalSurface, pair: CurvaturePair, grid: &ParamGrid, tol: f64) -> Result<PairVerdict> {
    let results: Vec<Option<(f64, f64, JacobiValue)>> = grid
        .points()
        .into_par_iter()
        .map(|(s, t)| match jacobi(surf, pair, s, t, JACOBI_STEP) {
            Ok(v) => Ok(Some((s, t, v))),
            Err(e) if e.is_pointwise_degeneracy() => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let masked = results.iter().filter(|r| r.is_none()).count();
    let mut verdict = PairVerdict {
        max_abs_phi: 0.0,
        max_scaled_phi: 0.0,
        worst_point: None,
        evaluated: results.len() - masked,
        masked,
        verdict: Verdict::Undetermined,
    };
    for (s, t, v) in results.into_iter().flatten() {
        verdict.max_abs_phi = verdict.max_abs_phi.max(v.value.abs());
        if verdict.worst_point.is_none() || v.scaled() > verdict.max_scaled_phi {
            verdict.max_scaled_phi = v.scaled();
            verdict.worst_point = Some((s, t));
        }
    }
    if verdict.evaluated > 0 {
        verdict.verdict = if verdict.max_scaled_phi <= tol { Verdict::Satisfied } else { Verdict::Violated };
    }
    Ok(verdict)
}

/// Tube / revolution detection and Weingarten verdicts for all pairs over `grid`.
pub fn classify(surf: &CanalSurface, grid: &ParamGrid, tol: f64) -> Result<ClassificationReport> {
    let mut max_abs_slope: f64 = 0.0;
    let mut max_curvature: f64 = 0.0;
    for &s in &grid.s {
        let jet = surf.jet(s)?;
        max_abs_slope = max_abs_slope.max(jet.radius.dr.abs());
        max_curvature = max_curvature.max(jet.frame.kappa);
    }
    let is_tube = max_abs_slope <= tol;
    let is_revolution = max_curvature <= tol;
    let mut weingarten = BTreeMap::new();
    let mut notes = Vec::new();
    for pair in CurvaturePair::ALL {
        let v = pair_verdict(surf, pair, grid, tol)?;
        if v.masked > 0 {
            let what = if pair.uses_kii() { "singular or II-degenerate" } else { "singular" };
            notes.push(format!("{pair}: {} of {} points masked as {what}", v.masked, v.masked + v.evaluated));
        }
        weingarten.insert(pair, v);
    }
    if surf.verdict().status != RegularityStatus::Regular {
        notes.push(format!("regularity: {}", surf.verdict().detail));
    }
    Ok(ClassificationReport {
        is_tube,
        is_revolution,
        is_cylinder: is_tube && is_revolution,
        max_abs_slope,
        max_curvature,
        tolerance: tol,
        weingarten,
        notes,
    })
}

/// Which curvatures a linear relation may involve; the constant d is always free.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FitMask {
    pub k: bool,
    pub h: bool,
    pub k_ii: bool,
}

impl FitMask {
    pub const KH: FitMask = FitMask { k: true, h: true, k_ii: false };
    pub const KKII: FitMask = FitMask { k: true, h: false, k_ii: true };
    pub const HKII: FitMask = FitMask { k: false, h: true, k_ii: true };
    pub const KHKII: FitMask = FitMask { k: true, h: true, k_ii: true };

    fn columns(&self) -> Vec<usize> {
        [self.k, self.h, self.k_ii].iter().enumerate().filter(|(_, on)| **on).map(|(i, _)| i).collect()
    }
}

impl FromStr for FitMask {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut mask = FitMask { k: false, h: false, k_ii: false };
        let mut rest = text.trim();
        while !rest.is_empty() {
            if let Some(tail) = rest.strip_prefix("KII") {
                mask.k_ii = true;
                rest = tail;
            } else if let Some(tail) = rest.strip_prefix('K') {
                mask.k = true;
                rest = tail;
            } else if let Some(tail) = rest.strip_prefix('H') {
                mask.h = true;
                rest = tail;
            } else {
                return Err(Error::InvalidParams(format!("bad mask {text:?}: use letters from K, H, KII")));
            }
        }
        if mask.columns().is_empty() {
            return Err(Error::InvalidParams("mask selects no curvature".into()));
        }
        Ok(mask)
    }
}

impl TryFrom<String> for FitMask {
    type Error = Error;

    fn try_from(text: String) -> Result<Self> {
        text.parse()
    }
}

impl From<FitMask> for String {
    fn from(m: FitMask) -> String {
        let mut out = String::new();
        for (on, name) in [(m.k, "K"), (m.h, "H"), (m.k_ii, "KII")] {
            if on {
                out.push_str(name);
            }
        }
        out
    }
}

/// A relation aK + bH + cK_II = d found by [`fit_linear`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    /// (a, b, c, d) with unit norm and first nonzero entry positive.
    pub coeffs: [f64; 4],
    /// max |aK + bH + cK_II - d| over the fitted points.
    pub residual: f64,
    pub mask: FitMask,
    pub points: usize,
    /// Singular values of the centered sample matrix, largest first.
    pub singular_values: Vec<f64>,
}

type Sample = (f64, f64, Option<f64>);

fn samples(surf: &CanalSurface, grid: &ParamGrid, need_kii: bool) -> Result<Vec<Sample>> {
    let points: Vec<Option<Sample>> = grid
        .points()
        .into_par_iter()
        .map(|(s, t)| {
            let jet = surf.jet(s)?;
            if singular(&jet, t).is_some() {
                return Ok(None);
            }
            let k = gaussian_at(&jet, t)?;
            let h = mean_at(&jet, t)?;
            let k_ii = match second_gaussian_at(&jet, t, KiiForm::Reconciled) {
                Ok(v) => Some(v),
                Err(Error::DegenerateSecondForm { .. }) if need_kii => return Ok(None),
                Err(Error::DegenerateSecondForm { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(Some((k, h, k_ii)))
        })
        .collect::<Result<_>>()?;
    Ok(points.into_iter().flatten().collect())
}

fn row(sample: &Sample) -> [f64; 3] {
    [sample.0, sample.1, sample.2.unwrap_or(f64::NAN)]
}

/// max |aK + bH + cK_II - d| over regular points of `grid`; points where
/// the second form degenerates are skipped when c ≠ 0.
pub fn linear_residual(surf: &CanalSurface, coeffs: [f64; 4], grid: &ParamGrid) -> Result<f64> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidParams("coefficients must be finite".into()));
    }
    let pts = samples(surf, grid, coeffs[2] != 0.0)?;
    if pts.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(pts.iter().map(|p| residual_at(&coeffs, p)).fold(0.0, f64::max))
}

fn residual_at(coeffs: &[f64; 4], p: &Sample) -> f64 {
    let [k, h, k_ii] = row(p);
    let kii_term = if coeffs[2] == 0.0 { 0.0 } else { coeffs[2] * k_ii };
    (coeffs[0] * k + coeffs[1] * h + kii_term - coeffs[3]).abs()
}

/// Homogeneous least-squares fit of aK + bH + cK_II = d over the masked
/// curvatures. The centered sample matrix's smallest right singular vector
/// gives (a, b, c); d is then fixed by the column means.
pub fn fit_linear(surf: &CanalSurface, mask: FitMask, grid: &ParamGrid) -> Result<LinearFit> {
    let pts = samples(surf, grid, mask.k_ii)?;
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientSamples { found: pts.len(), required: MIN_FIT_POINTS });
    }
    let cols = mask.columns();
    let n = pts.len();
    let rows: Vec<[f64; 3]> = pts.iter().map(row).collect();
    let means: Vec<f64> = cols.iter().map(|&c| rows.iter().map(|r| r[c]).sum::<f64>() / n as f64).collect();
    let centered = DMatrix::from_fn(n, cols.len(), |i, j| rows[i][cols[j]] - means[j]);
    let svd = centered.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    if singular_values.len() >= 2 {
        let smallest = singular_values[singular_values.len() - 1];
        let next = singular_values[singular_values.len() - 2];
        if next - smallest <= RANK_GAP * singular_values[0].max(1.0) {
            return Err(Error::RankDeficient { smallest, next });
        }
    }
    let direction = v_t.row(*order.last().expect("at least one column"));
    let mut coeffs = [0.0; 4];
    for (j, &c) in cols.iter().enumerate() {
        coeffs[c] = direction[j];
    }
    coeffs[3] = cols.iter().enumerate().map(|(j, &c)| coeffs[c] * means[j]).sum();
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    let first = coeffs.iter().copied().find(|c| *c != 0.0).unwrap_or(1.0);
    let flip = if first < 0.0 { -1.0 } else { 1.0 };
    for c in &mut coeffs {
        *c *= flip / norm;
    }
    let residual = pts.iter().map(|p| residual_at(&coeffs, p)).fold(0.0, f64::max);
    Ok(LinearFit { coeffs, residual, mask, points: n, singular_values })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_4, PI};

    use super::*;
    use crate::curve::{CurveSpec, FramedCurve};
    use crate::grid::{GridSpec, Interval};
    use crate::radius::{RadiusSpec, Sign};

    fn surface(curve: CurveSpec, radius: RadiusSpec, sign: Sign) -> CanalSurface {
        let window = Interval::new(0.0, 2.0 * PI).unwrap();
        CanalSurface::new(FramedCurve::new(curve).unwrap(), radius, sign, window).unwrap()
    }

    fn helix_tube() -> CanalSurface {
        surface(CurveSpec::Helix { a: 0.5, b: 0.75f64.sqrt() }, RadiusSpec::Constant { value: 2.0 }, Sign::Minus)
    }

    fn generic() -> CanalSurface {
        surface(
            CurveSpec::Helix { a: 0.5, b: 0.75f64.sqrt() },
            RadiusSpec::Sinusoid { mean: 2.0, amplitude: 0.3, frequency: 1.0, phase: 0.0 },
            Sign::Plus,
        )
    }

    fn cylinder() -> CanalSurface {
        surface(
            CurveSpec::Line { origin: [0.0; 3], direction: [1.0, 0.0, 0.0] },
            RadiusSpec::Constant { value: 2.0 },
            Sign::Plus,
        )
    }

    fn grid(surf: &CanalSurface, ns: usize, nt: usize) -> ParamGrid {
        ParamGrid::new(surf.s_range(), GridSpec { ns, nt, t_exclude: 0.1 })
    }

    #[test]
    fn mask_parsing() {
        assert_eq!("KH".parse::<FitMask>().unwrap(), FitMask::KH);
        assert_eq!("KHKII".parse::<FitMask>().unwrap(), FitMask::KHKII);
        assert_eq!("HKII".parse::<FitMask>().unwrap(), FitMask::HKII);
        assert_eq!("K".parse::<FitMask>().unwrap(), FitMask { k: true, h: false, k_ii: false });
        assert!("KX".parse::<FitMask>().is_err());
        assert!("".parse::<FitMask>().is_err());
        assert_eq!(String::from(FitMask::KKII), "KKII");
    }

    #[test]
    fn tube_jacobians_vanish() {
        let surf = helix_tube();
        for pair in CurvaturePair::ALL {
            let v = jacobi(&surf, pair, 1.0, 2.0, JACOBI_STEP).unwrap();
            assert!(v.scaled() <= 1e-6, "{pair}: {v:?}");
        }
    }

    #[test]
    fn generic_canal_is_not_hk_weingarten() {
        let surf = generic();
        let worst = grid(&surf, 9, 17)
            .points()
            .into_iter()
            .filter_map(|(s, t)| jacobi(&surf, CurvaturePair::KH, s, t, JACOBI_STEP).ok())
            .map(|v| v.value.abs())
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }

    #[test]
    fn obstruction_vanishes_with_slope_or_curvature() {
        for pair in CurvaturePair::ALL {
            assert_eq!(leading_obstruction(&helix_tube(), pair, 1.0).unwrap(), 0.0);
            assert_eq!(leading_obstruction(&cylinder(), pair, 1.0).unwrap(), 0.0);
            assert!(leading_obstruction(&generic(), pair, FRAC_PI_4).unwrap() != 0.0);
        }
    }

    #[test]
    fn classification_of_tube_and_generic() {
        let tube = helix_tube();
        let report = classify(&tube, &grid(&tube, 9, 17), JACOBI_TOL).unwrap();
        assert!(report.is_tube && !report.is_revolution && !report.is_cylinder);
        assert!(report.weingarten.values().all(|v| v.verdict == Verdict::Satisfied), "{report:?}");

        let surf = generic();
        let report = classify(&surf, &grid(&surf, 9, 17), JACOBI_TOL).unwrap();
        assert!(!report.is_tube && !report.is_revolution);
        assert_eq!(report.weingarten[&CurvaturePair::KH].verdict, Verdict::Violated);
    }

    #[test]
    fn tube_identity_is_recovered() {
        let surf = helix_tube();
        let g = grid(&surf, 9, 33);
        assert!(linear_residual(&surf, [-4.0, -4.0, 0.0, 1.0], &g).unwrap() <= 1e-8);
        let fit = fit_linear(&surf, FitMask::KH, &g).unwrap();
        let expected = [4.0, 4.0, 0.0, -1.0].map(|x: f64| x / 33f64.sqrt());
        let dot: f64 = fit.coeffs.iter().zip(expected).map(|(a, b)| a * b).sum();
        assert!(dot.abs().min(1.0).acos() < 1e-6, "{fit:?}");
        assert!(fit.coeffs[0] > 0.0);
        assert!(fit.residual < 1e-7);
    }

    #[test]
    fn flat_cylinder_fit() {
        let surf = cylinder();
        let fit = fit_linear(&surf, "K".parse().unwrap(), &grid(&surf, 5, 9)).unwrap();
        assert_eq!(fit.coeffs, [1.0, 0.0, 0.0, 0.0]);
        assert!(linear_residual(&surf, [0.0, 4.0, 0.0, -1.0], &grid(&surf, 5, 9)).unwrap() <= 1e-10);
    }

    #[test]
    fn generic_canal_has_no_linear_relation() {
        let surf = generic();
        let fit = fit_linear(&surf, FitMask::KH, &grid(&surf, 9, 33)).unwrap();
        assert!(fit.residual > 1e-3, "{fit:?}");
        assert!(linear_residual(&surf, [0.3, -0.2, 0.0, 0.7], &grid(&surf, 9, 33)).unwrap() > 1e-2);
    }

    #[test]
    fn too_few_points() {
        let surf = helix_tube();
        let g = ParamGrid::from_values(vec![0.0, 1.0], vec![1.0, 2.0, 3.0]);
        assert!(matches!(fit_linear(&surf, FitMask::KH, &g), Err(Error::InsufficientSamples { found: 6, .. })));
    }

    #[test]
    fn all_masked_grid() {
        let surf = helix_tube();
        let g = ParamGrid::from_values(vec![0.0, 1.0], vec![0.0]);
        assert!(matches!(linear_residual(&surf, [1.0, 0.0, 0.0, 0.0], &g), Err(Error::EmptyGrid)));
    }
}
