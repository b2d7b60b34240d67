//! Parameter intervals and the (s, t) sampling grids shared by the sweeps.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed parameter interval. Serialized as a two-element array.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl From<[f64; 2]> for Interval {
    fn from([start, end]: [f64; 2]) -> Self {
        Self { start, end }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.start, i.end]
    }
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if start.is_nan() || end.is_nan() || start > end {
            return Err(Error::InvalidParams(format!("bad interval [{start}, {end}]")));
        }
        Ok(Self { start, end })
    }

    pub const fn unbounded() -> Self {
        Self { start: f64::NEG_INFINITY, end: f64::INFINITY }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.start && x <= self.end
    }

    pub fn is_finite(&self) -> bool {
        self.start.is_finite() && self.end.is_finite()
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    /// `n` uniformly spaced samples including both endpoints.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![0.5 * (self.start + self.end)],
            _ => {
                let step = self.length() / (n - 1) as f64;
                (0..n).map(|i| if i == n - 1 { self.end } else { self.start + step * i as f64 }).collect()
            }
        }
    }

    /// `n` uniformly spaced samples of `[start, end)`.
    pub fn half_open(&self, n: usize) -> Vec<f64> {
        let step = self.length() / n as f64;
        (0..n).map(|i| self.start + step * i as f64).collect()
    }

    pub(crate) fn check(&self, s: f64) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { s, start: self.start, end: self.end })
        }
    }
}

/// Grid resolution as it appears in scene files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub ns: usize,
    pub nt: usize,
    /// Half-width of a band around t = 0 (mod 2π) that is left out of the grid.
    #[serde(default)]
    pub t_exclude: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { ns: 33, nt: 65, t_exclude: 0.0 }
    }
}

/// Tensor grid of parameter values: `s` inclusive over a range, `t` half-open over [0, 2π).
#[derive(Clone, Debug, PartialEq)]
pub struct ParamGrid {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
}

impl ParamGrid {
    pub fn new(s_range: Interval, spec: GridSpec) -> Self {
        let t = Interval { start: 0.0, end: TAU }
            .half_open(spec.nt)
            .into_iter()
            .filter(|&t| angular_distance(t, 0.0) >= spec.t_exclude)
            .collect();
        Self { s: s_range.linspace(spec.ns), t }
    }

    pub fn from_values(s: Vec<f64>, t: Vec<f64>) -> Self {
        Self { s, t }
    }

    pub fn len(&self) -> usize {
        self.s.len() * self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major (s outer, t inner) list of points.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.s.iter().flat_map(|&s| self.t.iter().map(move |&t| (s, t))).collect()
    }
}

/// Distance between two angles on the circle, in [0, π].
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d).min(PI)
}
