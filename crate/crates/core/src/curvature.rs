//! Gaussian, mean and second Gaussian curvature of canal surfaces.
//!
//! K and H are closed-form polynomials in cos t over EG - F². K_II, the
//! Gaussian curvature of the second fundamental form taken as a metric, is
//! Q³ Σ nᵢ cosⁱ t / (4 r⁵ (eg - f²)²) with the five coefficient blocks below.
//! [`brioschi_oracle`] recomputes K_II from finite differences of e, f, g.

#![allow(non_snake_case)]

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::curve::Vec3;
use crate::diff;
use crate::error::{Error, Result};
use crate::surface::{CanalJet, CanalSurface, Vars};

/// Relative threshold: II is degenerate when |eg - f²| ≤ this · max(1, |eg|).
pub const SECOND_FORM_EPS: f64 = 1e-10;

/// Which version of the K_II closed form to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KiiForm {
    /// Squared (eg - f²) in the prefactor, coefficient 4 on QQ'R'κ'r² in n₁
    /// and +8Q'RR'κr² in n₂. Agrees with the Brioschi determinant.
    #[default]
    Reconciled,
    /// Single power of (eg - f²), coefficient 1 on QQ'R'κ'r² and -8Q'RR'κr².
    Literal,
}

/// Denominator of the Brioschi determinant formula.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BrioschiDenominator {
    /// (eg - f²)².
    #[default]
    Standard,
    /// (|eg| - f²)².
    AbsProduct,
}

/// Coefficients n₀ … n₄ of the K_II numerator polynomial in cos t.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KiiCoefficients {
    pub n: [f64; 5],
}

impl KiiCoefficients {
    pub fn polynomial(&self, c: f64) -> f64 {
        self.n.iter().rev().fold(0.0, |acc, ni| acc * c + ni)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvatureFlags {
    pub regular: bool,
    pub second_form_nondegenerate: bool,
}

/// K, H and K_II at one point; `None` where the value is undefined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureTriple {
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[serde(rename = "H")]
    pub h: Option<f64>,
    #[serde(rename = "K_II", skip_serializing_if = "Option::is_none")]
    pub k_ii: Option<f64>,
    pub flags: CurvatureFlags,
}

fn n0(v: &Vars) -> f64 {
    let Vars { r, rp, rpp, big_r: R, r1: Rp, r2: Rpp, r3: Rppp, q: Q, q1: Qp, q2: Qpp, q3: Qppp, k, tau, sn, .. } = *v;
    let r2 = r * r;
    let k2 = k * k;
    let polynomial = [
        -Q * k2 * r2,
        4.0 * Q * Rp * k2 * r2,
        -4.0 * Q * Rp * Rp * k2 * r2,
        -2.0 * Qp * R * k2 * r2,
        -Q * Q * Qppp * r * rp,
        2.0 * Q * Qp * Qppp * r2,
        -4.0 * Q * Q * Qpp * k2 * r2,
        -2.0 * Q * R * Rpp * rp * rp,
        2.0 * Q * Q * Qpp * r * rpp,
        2.0 * Q * R * Rpp * r * rpp,
        2.0 * Qp * Rp * Rpp * r2,
        2.0 * Qp * R * Rppp * r2,
        -4.0 * Qpp * R * Rpp * r2,
        -Q * R * r * rp * k2,
        4.0 * Qp * R * Rp * k2 * r2,
        2.0 * Q * R * Rp * r * rp * k2,
        -2.0 * Qp * R * R * r * rp * k2,
        -4.0 * Q * Qpp * Qpp * r2,
        2.0 * Qp * Qp * Qpp * r2,
        2.0 * Qp * R * Rpp * r * rp,
        -2.0 * Q * Q * Qpp * rp * rp,
        Q * Qp * Qpp * r * rp,
        -Q * Rp * Rpp * r * rp,
        -Q * R * Rppp * r * rp,
        -4.0 * Q * R * Rpp * k2 * r2,
    ];
    let torsion = [
        4.0 * Q * Qpp * R * r2,
        4.0 * R * R * Rpp * r2,
        2.0 * Q * Qp * r2,
        4.0 * Qp * Qp * R * r2,
        -4.0 * Q * Qp * Rp * r2,
        Q * (2.0 * Q * Rp - Q - 2.0 * Qp * R) * r * rp,
    ];
    polynomial.iter().sum::<f64>() + k * tau * torsion.iter().sum::<f64>() * sn
}

fn n1(v: &Vars, form: KiiForm) -> f64 {
    let Vars {
        r, rp, rpp, big_r: R, r1: Rp, r2: Rpp, r3: Rppp, q: Q, q1: Qp, q2: Qpp, q3: Qppp, k, kp, tau, sn, ..
    } = *v;
    let r2 = r * r;
    let k3 = k * k * k;
    let reconciled = match form {
        KiiForm::Reconciled => 4.0,
        KiiForm::Literal => 1.0,
    };
    let polynomial = [
        Q * Q * r * rp * kp,
        4.0 * R * R * Rp * r2 * k3,
        -4.0 * Qp * Qp * R * kp * r2,
        -2.0 * Q * Qp * kp * r2,
        -2.0 * R * R * R * k3 * r * rp,
        -4.0 * Q * Q * Rp * rp * rp * k,
        -2.0 * Q * Q * r * rpp * k,
        -4.0 * R * R * Rpp * kp * r2,
        -2.0 * R * R * k3 * r2,
        -2.0 * Qp * Qp * k * r2,
        2.0 * Q * Q * rp * rp * k,
        -Q * Qp * r * rp * k,
        4.0 * Q * Qp * R * rp * rp * k,
        -2.0 * Q * Q * Rp * r * rp * kp,
        4.0 * Q * Qp * Rp * r * rp * k,
        2.0 * Q * Qp * R * r * rp * kp,
        -4.0 * Qp * Qp * R * r * rp * k,
        2.0 * R * R * Rpp * r * rp * k,
        -6.0 * R * Rp * Rpp * k * r2,
        4.0 * Q * Qp * R * k3 * r2,
        reconciled * Q * Qp * Rp * kp * r2,
        -2.0 * Q * Q * R * k3 * r * rp,
        2.0 * R * R * Rppp * k * r2,
        2.0 * R * Rpp * k * r2,
        6.0 * Q * Qpp * k * r2,
        4.0 * Q * Qpp * R * r * rp * k,
        -16.0 * Q * Qpp * Rp * k * r2,
        -4.0 * Q * Qpp * R * kp * r2,
        6.0 * Qp * Qpp * R * k * r2,
        -2.0 * Q * Q * Rpp * r * rp * k,
        4.0 * Q * Q * Rp * r * rpp * k,
        -4.0 * Q * Qp * R * r * rpp * k,
        2.0 * Q * Qppp * R * k * r2,
        4.0 * Q * Qp * Rpp * k * r2,
    ];
    let torsion = [2.0 * Q * r2 * (2.0 * Q * Qp + 2.0 * R * Rp - R), -2.0 * Q * (R * R + Q * Q) * r * rp];
    polynomial.iter().sum::<f64>() + k * k * tau * torsion.iter().sum::<f64>() * sn
}

fn n2(v: &Vars, form: KiiForm) -> f64 {
    let Vars { r, rp, rpp, big_r: R, r1: Rp, r2: Rpp, q: Q, q1: Qp, q2: Qpp, k, kp, .. } = *v;
    let r2 = r * r;
    let reconciled = match form {
        KiiForm::Reconciled => 8.0,
        KiiForm::Literal => -8.0,
    };
    let bracket = [
        12.0 * Q * Q * Qpp * k * r2,
        8.0 * Q * Rp * k * r2,
        -12.0 * Q * Rp * Rp * k * r2,
        -4.0 * Q * Qp * Qp * k * r2,
        2.0 * Q * R * R * rp * rp * k,
        2.0 * Q * Q * Q * kp * r * rp,
        -Q * R * k * r * rp,
        2.0 * Q * R * R * kp * r * rp,
        -2.0 * Q * Q * Q * k * r * rpp,
        -Q * k * r2,
        2.0 * Q * Q * Q * rp * rp * k,
        -4.0 * Q * R * Rp * kp * r2,
        12.0 * Q * R * Rpp * k * r2,
        reconciled * Qp * R * Rp * k * r2,
        2.0 * Q * R * kp * r2,
        -4.0 * Qp * R * k * r2,
        -4.0 * Q * Q * Qp * kp * r2,
        -4.0 * Qp * R * R * r * rp * k,
        -2.0 * Q * R * R * k * r * rpp,
        4.0 * Q * R * Rp * r * rp * k,
    ];
    k * bracket.iter().sum::<f64>()
}

fn n3(v: &Vars) -> f64 {
    let Vars { r, big_r: R, r1: Rp, q: Q, q1: Qp, k, .. } = *v;
    2.0 * Q * k.powi(3) * r * r * (8.0 * Q * Rp - 8.0 * Qp * R - 3.0 * Q)
}

fn n4(v: &Vars) -> f64 {
    let Vars { r, big_r: R, q: Q, k, .. } = *v;
    -4.0 * Q * k.powi(4) * r * r * (Q * Q + R * R)
}

fn coefficients(v: &Vars, form: KiiForm) -> KiiCoefficients {
    KiiCoefficients { n: [n0(v), n1(v, form), n2(v, form), n3(v), n4(v)] }
}

/// n₀ … n₄ at (s, t), in the reconciled form.
pub fn kii_coefficients(surf: &CanalSurface, s: f64, t: f64) -> Result<KiiCoefficients> {
    kii_coefficients_with(surf, s, t, KiiForm::Reconciled)
}

pub fn kii_coefficients_with(surf: &CanalSurface, s: f64, t: f64, form: KiiForm) -> Result<KiiCoefficients> {
    Ok(coefficients(&surf.jet(s)?.vars(t), form))
}

pub(crate) fn singular(jet: &CanalJet, t: f64) -> Option<f64> {
    let area2 = jet.area2_expanded(t);
    (!(area2 >= jet.regularity_eps())).then_some(area2)
}

pub(crate) fn gaussian_at(jet: &CanalJet, t: f64) -> Result<f64> {
    if let Some(area2) = singular(jet, t) {
        return Err(Error::SingularPoint { s: jet.s, t, area2 });
    }
    let Vars { r, big_r: R, r1: Rp, r2: Rpp, q: Q, q1: Qp, q2: Qpp, k, c, .. } = jet.vars(t);
    let k2 = jet.area2_expanded(t);
    Ok(Q * Q / (r * r * k2)
        * (k * k * (R * R + Q * Q) * c * c + k * (2.0 * Qp * R - 2.0 * Q * Rp + Q) * c - (R * Rpp + Q * Qpp)))
}

pub(crate) fn mean_at(jet: &CanalJet, t: f64) -> Result<f64> {
    Ok(jet.orientation(t) * mean_outward_at(jet, t)?)
}

/// H with respect to the outward normal (C - α)/r.
pub(crate) fn mean_outward_at(jet: &CanalJet, t: f64) -> Result<f64> {
    if let Some(area2) = singular(jet, t) {
        return Err(Error::SingularPoint { s: jet.s, t, area2 });
    }
    let Vars { r, big_r: R, r1: Rp, r2: Rpp, q: Q, q1: Qp, q2: Qpp, k, c, .. } = jet.vars(t);
    let k2 = jet.area2_expanded(t);
    Ok(-Q * Q / (2.0 * r * k2)
        * (2.0 * k * k * (Q * Q + R * R) * c * c + k * (4.0 * (Qp * R - Q * Rp) + 3.0 * Q) * c + Rp * Rp + Qp * Qp
            - 2.0 * Rp
            - R * Rpp
            - Q * Qpp
            + 1.0))
}

pub(crate) fn second_gaussian_at(jet: &CanalJet, t: f64, form: KiiForm) -> Result<f64> {
    Ok(jet.orientation(t) * second_gaussian_outward_at(jet, t, form)?)
}

/// K_II of the second form taken with respect to the outward normal.
pub(crate) fn second_gaussian_outward_at(jet: &CanalJet, t: f64, form: KiiForm) -> Result<f64> {
    let (e, f, g) = jet.second_form_outward(t);
    let det2 = e * g - f * f;
    if !(det2.abs() > SECOND_FORM_EPS * (e * g).abs().max(1.0)) {
        return Err(Error::DegenerateSecondForm { s: jet.s, t, det2 });
    }
    let v = jet.vars(t);
    let sum = coefficients(&v, form).polynomial(v.c);
    let denominator = match form {
        KiiForm::Reconciled => det2 * det2,
        KiiForm::Literal => det2,
    };
    Ok(v.q.powi(3) * sum / (4.0 * v.r.powi(5) * denominator))
}

/// Gaussian curvature K from its closed form.
pub fn gaussian(surf: &CanalSurface, s: f64, t: f64) -> Result<f64> {
    gaussian_at(&surf.jet(s)?, t)
}

/// Mean curvature H with respect to the C_s × C_t normal.
pub fn mean(surf: &CanalSurface, s: f64, t: f64) -> Result<f64> {
    mean_at(&surf.jet(s)?, t)
}

/// Second Gaussian curvature K_II (reconciled closed form).
pub fn second_gaussian(surf: &CanalSurface, s: f64, t: f64) -> Result<f64> {
    second_gaussian_with(surf, s, t, KiiForm::Reconciled)
}

pub fn second_gaussian_with(surf: &CanalSurface, s: f64, t: f64, form: KiiForm) -> Result<f64> {
    second_gaussian_at(&surf.jet(s)?, t, form)
}

/// K_II from the Brioschi determinant formula applied to the closed-form
/// e, f, g, whose partial derivatives are taken by finite differences with
/// step `h`. The orientation of (s, t) is used for the whole stencil.
pub fn brioschi_oracle(surf: &CanalSurface, s: f64, t: f64, h: f64, denominator: BrioschiDenominator) -> Result<f64> {
    let jet = surf.jet(s)?;
    let (e, f, g) = jet.second_form(t);
    let det2 = e * g - f * f;
    if !(det2.abs() > SECOND_FORM_EPS * (e * g).abs().max(1.0)) {
        return Err(Error::DegenerateSecondForm { s, t, det2 });
    }
    // The outward coefficients are smooth across the focal set where the
    // orientation flips, so stencils that straddle it stay accurate.
    let orientation = jet.orientation(t);
    let form = |s: f64, t: f64| {
        let (e, f, g) = surf.jet_unchecked(s)?.second_form_outward(t);
        Ok(Vec3::new(e, f, g) * orientation)
    };
    let d_s: Vec3 = diff::first(|x| form(x, t), s, h)?;
    let d_t: Vec3 = diff::first(|y| form(s, y), t, h)?;
    let d_ss: Vec3 = diff::second(|x| form(x, t), s, h)?;
    let d_tt: Vec3 = diff::second(|y| form(s, y), t, h)?;
    let d_st: Vec3 = diff::mixed(form, s, t, h)?;
    let (e_s, f_s, g_s) = (d_s.x, d_s.y, d_s.z);
    let (e_t, f_t, g_t) = (d_t.x, d_t.y, d_t.z);
    let (e_tt, f_st, g_ss) = (d_tt.x, d_st.y, d_ss.z);
    let m1 = Matrix3::new(
        -0.5 * e_tt + f_st - 0.5 * g_ss,
        0.5 * e_s,
        f_s - 0.5 * e_t,
        f_t - 0.5 * g_s,
        e,
        f,
        0.5 * g_t,
        f,
        g,
    );
    let m2 = Matrix3::new(0.0, 0.5 * e_t, 0.5 * g_s, 0.5 * e_t, e, f, 0.5 * g_s, f, g);
    let den = match denominator {
        BrioschiDenominator::Standard => det2 * det2,
        BrioschiDenominator::AbsProduct => ((e * g).abs() - f * f).powi(2),
    };
    Ok((m1.determinant() - m2.determinant()) / den)
}

/// K, H and K_II with flags. Singular points yield `regular: false` and no
/// values; II-degenerate points omit K_II.
pub fn curvature_triple(surf: &CanalSurface, s: f64, t: f64) -> Result<CurvatureTriple> {
    let jet = surf.jet(s)?;
    if singular(&jet, t).is_some() {
        return Ok(CurvatureTriple {
            k: None,
            h: None,
            k_ii: None,
            flags: CurvatureFlags { regular: false, second_form_nondegenerate: false },
        });
    }
    let k_ii = match second_gaussian_at(&jet, t, KiiForm::Reconciled) {
        Ok(v) => Some(v),
        Err(Error::DegenerateSecondForm { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(CurvatureTriple {
        k: Some(gaussian_at(&jet, t)?),
        h: Some(mean_at(&jet, t)?),
        k_ii,
        flags: CurvatureFlags { regular: true, second_form_nondegenerate: k_ii.is_some() },
    })
}
