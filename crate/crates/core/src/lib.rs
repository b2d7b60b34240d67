//! Canal surfaces: envelopes of sphere families centered on a space curve.
//!
//! The crate evaluates the surface, its fundamental forms, the Gaussian,
//! mean and second Gaussian curvatures in closed form, checks them against
//! finite-difference oracles, tests Weingarten conditions, fits linear
//! curvature relations and tessellates surfaces for export.

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod curve;
pub mod diff;
pub mod error;
pub mod grid;
pub mod mesh;
pub mod radius;
pub mod surface;
pub mod verify;
pub mod weingarten;

pub use curvature::{
    brioschi_oracle, curvature_triple, gaussian, kii_coefficients, mean, second_gaussian, second_gaussian_with,
    BrioschiDenominator, CurvatureFlags, CurvatureTriple, KiiCoefficients, KiiForm,
};
pub use curve::{fixed_frame, AnalyticCurve, CurveJet, CurveSpec, FrameJet, FramedCurve, Vec3};
pub use error::{Error, Result};
pub use grid::{GridSpec, Interval, ParamGrid};
pub use mesh::{export_csv, export_obj, tessellate, MeshOptions, SurfaceMesh};
pub use radius::{
    radius_jet, regularity_check, tube_functions, AnalyticRadius, RadiusJet, RadiusSpec, RegularityFlags,
    RegularityStatus, RegularityVerdict, Sign, TubeFunctions,
};
pub use surface::{CanalJet, CanalSurface, FormCoefficients, ORACLE_STEP};
pub use verify::{verify, Tolerances, VerifyReport};
pub use weingarten::{
    classify, fit_linear, jacobi, leading_obstruction, linear_residual, ClassificationReport, CurvaturePair, FitMask,
    JacobiValue, LinearFit, PairVerdict, Verdict,
};
