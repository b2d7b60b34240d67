//! Canal surface evaluation and fundamental forms.
//!
//! C(s, t) = α - R T - Q cos t N + Q sin t B. The closed-form coefficients
//! are written for the outward normal (C - α)/r. The surface orientation is
//! the one of C_s × C_t, which equals a(s, t)·(C - α) with
//! a = 1 - R' + Qκ cos t, so oriented quantities carry a factor sign(a).

use serde::{Deserialize, Serialize};

use crate::curve::{FrameJet, FramedCurve, Vec3};
use crate::diff;
use crate::error::{Error, Result};
use crate::grid::Interval;
use crate::radius::{
    radius_jet, regularity_check, tube_functions, RadiusJet, RadiusSpec, RegularityStatus, RegularityVerdict, Sign,
    TubeFunctions, REGULARITY_SAMPLES,
};

/// Default finite-difference step of the oracles.
pub const ORACLE_STEP: f64 = 1e-2;

/// Relative regularity threshold: a point is singular when EG - F² < this · max(1, Q²).
pub const REGULARITY_EPS: f64 = 1e-10;

/// First and second fundamental form coefficients at one point.
#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormCoefficients {
    pub E: f64,
    pub F: f64,
    pub G: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    /// EG - F².
    pub area2: f64,
    /// eg - f².
    pub det2: f64,
}

impl FormCoefficients {
    #[allow(non_snake_case)]
    pub fn new(E: f64, F: f64, G: f64, e: f64, f: f64, g: f64) -> Self {
        Self { E, F, G, e, f, g, area2: E * G - F * F, det2: e * g - f * f }
    }

    /// (eg - f²)/(EG - F²).
    pub fn gaussian(&self) -> f64 {
        self.det2 / self.area2
    }

    /// (Eg - 2Ff + Ge)/(2(EG - F²)).
    pub fn mean(&self) -> f64 {
        (self.E * self.g - 2.0 * self.F * self.f + self.G * self.e) / (2.0 * self.area2)
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.E, self.F, self.G, self.e, self.f, self.g]
    }
}

/// Scalar ingredients of the closed forms at (s, t).
#[derive(Clone, Copy, Debug)]
pub(crate) struct Vars {
    pub r: f64,
    pub rp: f64,
    pub rpp: f64,
    pub big_r: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub q: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub k: f64,
    pub kp: f64,
    pub tau: f64,
    pub c: f64,
    pub sn: f64,
}

/// Everything that depends on s alone: frame, radius jet and tube functions.
#[derive(Clone, Copy, Debug)]
pub struct CanalJet {
    pub s: f64,
    pub frame: FrameJet,
    pub radius: RadiusJet,
    pub tube: TubeFunctions,
}

impl CanalJet {
    pub(crate) fn vars(&self, t: f64) -> Vars {
        let [big_r, r1, r2, r3] = self.tube.axial;
        let [q, q1, q2, q3] = self.tube.circle;
        let (sn, c) = t.sin_cos();
        Vars {
            r: self.radius.r,
            rp: self.radius.dr,
            rpp: self.radius.d2r,
            big_r,
            r1,
            r2,
            r3,
            q,
            q1,
            q2,
            q3,
            k: self.frame.kappa,
            kp: self.frame.kappa_prime,
            tau: self.frame.tau,
            c,
            sn,
        }
    }

    pub fn point(&self, t: f64) -> Vec3 {
        let f = &self.frame;
        let [big_r, ..] = self.tube.axial;
        let q = self.tube.q();
        let (sn, c) = t.sin_cos();
        f.position - f.tangent * big_r - f.normal * (q * c) + f.binormal * (q * sn)
    }

    /// Exact partial derivatives (C_s, C_t).
    pub fn partials(&self, t: f64) -> (Vec3, Vec3) {
        let v = self.vars(t);
        let f = &self.frame;
        let cs = f.tangent * (1.0 - v.r1 + v.q * v.k * v.c)
            + f.normal * (-v.big_r * v.k - v.q1 * v.c - v.q * v.tau * v.sn)
            + f.binormal * (-v.q * v.tau * v.c + v.q1 * v.sn);
        let ct = f.normal * (v.q * v.sn) + f.binormal * (v.q * v.c);
        (cs, ct)
    }

    /// a = 1 - R' + Qκ cos t, with C_s × C_t = a·(C - α).
    pub fn orientation_factor(&self, t: f64) -> f64 {
        let v = self.vars(t);
        1.0 - v.r1 + v.q * v.k * v.c
    }

    /// ±1: whether C_s × C_t points along the outward normal (C - α)/r.
    pub fn orientation(&self, t: f64) -> f64 {
        if self.orientation_factor(t) < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// (E, F, G) from the closed-form coefficients.
    #[allow(non_snake_case)]
    pub fn first_form(&self, t: f64) -> (f64, f64, f64) {
        let Vars { big_r, r1, q, q1, k, tau, c, sn, .. } = self.vars(t);
        let E = q * q * k * k * c * c
            + (2.0 * q - 2.0 * q * r1 + 2.0 * q1 * big_r) * k * c
            + 2.0 * q * big_r * k * tau * sn
            + q * q * tau * tau
            + q1 * q1
            + big_r * big_r * k * k
            + 1.0
            - 2.0 * r1
            + r1 * r1;
        let F = -q * (big_r * k * sn + q * tau);
        let G = q * q;
        (E, F, G)
    }

    /// EG - F² from its expanded closed form.
    pub fn area2_expanded(&self, t: f64) -> f64 {
        let Vars { big_r, r1, q, q1, k, c, .. } = self.vars(t);
        q * q
            * (k * k * (big_r * big_r + q * q) * c * c + 2.0 * k * (q1 * big_r - q * r1 + q) * c + 1.0 - 2.0 * r1
                + r1 * r1
                + q1 * q1)
    }

    /// (e, f, g) with respect to the outward normal (C - α)/r.
    pub fn second_form_outward(&self, t: f64) -> (f64, f64, f64) {
        let Vars { r, big_r, r1, r2, q, q1, q2, k, tau, c, sn, .. } = self.vars(t);
        let e = -(q * q * k * k * c * c + (2.0 * big_r * q1 - 2.0 * q * r1 + q) * k * c - q * q2
            + big_r * big_r * k * k
            - big_r * r2
            + q * q * tau * tau
            + 2.0 * big_r * q * k * tau * sn)
            / r;
        let f = q * (big_r * k * sn + q * tau) / r;
        let g = -q * q / r;
        (e, f, g)
    }

    /// (e, f, g) with respect to the C_s × C_t normal.
    pub fn second_form(&self, t: f64) -> (f64, f64, f64) {
        let (e, f, g) = self.second_form_outward(t);
        let o = self.orientation(t);
        (o * e, o * f, o * g)
    }

    pub fn forms(&self, t: f64) -> FormCoefficients {
        let (big_e, big_f, big_g) = self.first_form(t);
        let (e, f, g) = self.second_form(t);
        FormCoefficients::new(big_e, big_f, big_g, e, f, g)
    }

    /// Threshold below which EG - F² counts as zero.
    pub fn regularity_eps(&self) -> f64 {
        REGULARITY_EPS * self.tube.q().powi(2).max(1.0)
    }
}

/// A canal surface over a parameter window of the center curve.
#[derive(Clone, Debug)]
pub struct CanalSurface {
    curve: FramedCurve,
    radius: RadiusSpec,
    sign: Sign,
    s_range: Interval,
    verdict: RegularityVerdict,
}

impl CanalSurface {
    /// Rejects pairs for which the envelope is not a surface.
    pub fn new(curve: FramedCurve, radius: RadiusSpec, sign: Sign, s_range: Interval) -> Result<Self> {
        if !s_range.is_finite() {
            return Err(Error::InvalidParams("s range must be finite".into()));
        }
        let verdict = regularity_check(&curve, &radius, s_range, REGULARITY_SAMPLES);
        if verdict.status == RegularityStatus::NotASurface {
            return Err(Error::NotASurface(verdict.detail));
        }
        Ok(Self { curve, radius, sign, s_range, verdict })
    }

    pub fn curve(&self) -> &FramedCurve {
        &self.curve
    }

    pub fn radius(&self) -> &RadiusSpec {
        &self.radius
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn s_range(&self) -> Interval {
        self.s_range
    }

    pub fn verdict(&self) -> &RegularityVerdict {
        &self.verdict
    }

    /// Same surface with the other branch of Q.
    pub fn with_sign(&self, sign: Sign) -> Self {
        Self { sign, ..self.clone() }
    }

    /// s-dependent data at `s`, which must lie in the s range.
    pub fn jet(&self, s: f64) -> Result<CanalJet> {
        self.s_range.check(s)?;
        self.jet_unchecked(s)
    }

    /// As [`jet`](Self::jet) but only requires `s` inside the curve and radius
    /// domains, so finite-difference stencils may step past the s range.
    pub(crate) fn jet_unchecked(&self, s: f64) -> Result<CanalJet> {
        let frame = self.curve.frenet_apparatus(s)?;
        let radius = radius_jet(&self.radius, s)?;
        let tube = tube_functions(&radius, self.sign)?;
        Ok(CanalJet { s, frame, radius, tube })
    }

    pub fn evaluate(&self, s: f64, t: f64) -> Result<Vec3> {
        Ok(self.jet(s)?.point(t))
    }

    /// Unit normal along C_s × C_t.
    pub fn normal(&self, s: f64, t: f64) -> Result<Vec3> {
        let jet = self.jet(s)?;
        let (big_e, big_f, big_g) = jet.first_form(t);
        let area2 = big_e * big_g - big_f * big_f;
        if !(area2 >= jet.regularity_eps()) {
            return Err(Error::SingularPoint { s, t, area2 });
        }
        let (cs, ct) = jet.partials(t);
        Ok(cs.cross(&ct).normalize())
    }

    pub fn is_regular(&self, s: f64, t: f64) -> Result<bool> {
        let jet = self.jet(s)?;
        let (big_e, big_f, big_g) = jet.first_form(t);
        Ok(big_e * big_g - big_f * big_f >= jet.regularity_eps())
    }

    pub fn first_form(&self, s: f64, t: f64) -> Result<(f64, f64, f64)> {
        Ok(self.jet(s)?.first_form(t))
    }

    /// (e, f, g) with respect to the C_s × C_t normal.
    pub fn second_form(&self, s: f64, t: f64) -> Result<(f64, f64, f64)> {
        Ok(self.jet(s)?.second_form(t))
    }

    /// Closed-form coefficients.
    pub fn forms(&self, s: f64, t: f64) -> Result<FormCoefficients> {
        Ok(self.jet(s)?.forms(t))
    }

    /// Coefficients from finite differences of [`evaluate`](Self::evaluate)
    /// alone, using step `h` (see [`ORACLE_STEP`]).
    pub fn forms_oracle(&self, s: f64, t: f64, h: f64) -> Result<FormCoefficients> {
        self.s_range.check(s)?;
        let c = |s: f64, t: f64| Ok(self.jet_unchecked(s)?.point(t));
        let cs: Vec3 = diff::first(|x| c(x, t), s, h)?;
        let ct: Vec3 = diff::first(|y| c(s, y), t, h)?;
        let css: Vec3 = diff::second(|x| c(x, t), s, h)?;
        let ctt: Vec3 = diff::second(|y| c(s, y), t, h)?;
        let cst: Vec3 = diff::mixed(c, s, t, h)?;
        let cross = cs.cross(&ct);
        let area2 = cross.norm_squared();
        let eps = REGULARITY_EPS * self.jet_unchecked(s)?.tube.q().powi(2).max(1.0);
        if !(area2 >= eps) {
            return Err(Error::SingularPoint { s, t, area2 });
        }
        let n = cross / area2.sqrt();
        Ok(FormCoefficients::new(cs.dot(&cs), cs.dot(&ct), ct.dot(&ct), css.dot(&n), cst.dot(&n), ctt.dot(&n)))
    }
}
