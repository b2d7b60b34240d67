use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("curve is not unit speed: max | |α'| - 1 | = {deviation:e}")]
    NotUnitSpeed { deviation: f64 },

    #[error("curvature vanishes at s = {s} and the curve has no fixed frame")]
    VanishingCurvature { s: f64 },

    #[error("s = {s} is outside the parameter interval [{start}, {end}]")]
    OutOfDomain { s: f64, start: f64, end: f64 },

    #[error("radius r({s}) = {r} is not positive")]
    NonPositiveRadius { s: f64, r: f64 },

    #[error("|r'({s})| = {slope} reaches or exceeds 1")]
    SlopeExceedsOne { s: f64, slope: f64 },

    #[error("Q vanishes at s = {s}: both fundamental forms are degenerate")]
    DegenerateQ { s: f64 },

    #[error("not a surface: {0}")]
    NotASurface(String),

    #[error("singular point at (s, t) = ({s}, {t}): EG - F^2 = {area2:e}")]
    SingularPoint { s: f64, t: f64, area2: f64 },

    #[error("second fundamental form degenerates at (s, t) = ({s}, {t}): eg - f^2 = {det2:e}")]
    DegenerateSecondForm { s: f64, t: f64, det2: f64 },

    #[error("relation is not unique: two smallest singular values {smallest:e} and {next:e} coincide")]
    RankDeficient { smallest: f64, next: f64 },

    #[error("no usable grid points (all masked)")]
    EmptyGrid,

    #[error("need at least {required} usable grid points, found {found}")]
    InsufficientSamples { found: usize, required: usize },

    #[error("every mesh cell is singular")]
    AllSingular,

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    /// True for errors that describe a point where a curvature is undefined,
    /// as opposed to bad input.
    pub fn is_pointwise_degeneracy(&self) -> bool {
        matches!(self, Error::SingularPoint { .. } | Error::DegenerateSecondForm { .. } | Error::DegenerateQ { .. })
    }
}
