//! JSON scene files: one surface plus the grid and tolerances for every command.

use std::path::Path;

use canalkit_core::{
    regularity_check, CanalSurface, CurveSpec, FramedCurve, GridSpec, Interval, ParamGrid, RadiusSpec,
    RegularityStatus, Sign, Tolerances,
};
use serde::Deserialize;

use crate::Failure;

pub const SCENE_VERSION: u32 = 1;

const REGULARITY_SAMPLES: usize = 257;

/// ```json
/// {"version": 1,
///  "curve": {"family": "helix", "a": 0.5, "b": 0.8660254037844386},
///  "radius": {"family": "constant", "value": 2.0},
///  "sign": -1,
///  "s_range": [0.0, 6.283185307179586],
///  "grid": {"ns": 33, "nt": 65, "t_exclude": 0.1}}
/// ```
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub version: u32,
    pub curve: CurveSpec,
    pub radius: RadiusSpec,
    #[serde(default)]
    pub sign: Sign,
    pub s_range: Interval,
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Scene {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        let scene: Scene =
            serde_json::from_str(&text).map_err(|e| Failure::scene(format!("{}: {e}", path.display())))?;
        if scene.version != SCENE_VERSION {
            return Err(Failure::scene(format!(
                "unsupported scene version {}, expected {SCENE_VERSION}",
                scene.version
            )));
        }
        Ok(scene)
    }

    /// Overrides one tolerance by field name, e.g. `jacobi=1e-5`.
    pub fn set_tolerance(&mut self, assignment: &str) -> Result<(), Failure> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Failure::scene(format!("tolerance override `{assignment}` is not KEY=VALUE")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Failure::scene(format!("tolerance `{key}` needs a number, got `{value}`")))?;
        if !(value.is_finite() && value > 0.0) {
            return Err(Failure::scene(format!("tolerance `{key}` must be positive and finite")));
        }
        let mut map = serde_json::to_value(self.tolerances).expect("tolerances serialize");
        map[key.trim()] = value.into();
        self.tolerances = serde_json::from_value(map).map_err(|e| Failure::scene(format!("tolerance `{key}`: {e}")))?;
        Ok(())
    }

    /// Builds the surface after checking the scene describes a regular canal surface.
    pub fn surface(&self) -> Result<CanalSurface, Failure> {
        let Interval { start, end } = self.s_range;
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Failure::scene(format!("s_range [{start}, {end}] must be finite and increasing")));
        }
        if self.grid.ns < 2 || self.grid.nt < 3 {
            return Err(Failure::scene("grid needs ns >= 2 and nt >= 3".into()));
        }
        if !(self.grid.t_exclude.is_finite() && self.grid.t_exclude >= 0.0) {
            return Err(Failure::scene("grid.t_exclude must be a nonnegative number".into()));
        }
        let curve = FramedCurve::new(self.curve.clone()).map_err(|e| Failure::scene(e.to_string()))?;
        let verdict = regularity_check(&curve, &self.radius, self.s_range, REGULARITY_SAMPLES);
        match verdict.status {
            RegularityStatus::Regular => {}
            RegularityStatus::DegenerateSecondForm => eprintln!("canalkit: warning: {}", verdict.detail),
            RegularityStatus::DegenerateFirstForm | RegularityStatus::NotASurface => {
                return Err(Failure::scene(verdict.detail))
            }
        }
        CanalSurface::new(curve, self.radius.clone(), self.sign, self.s_range)
            .map_err(|e| Failure::scene(e.to_string()))
    }

    pub fn grid(&self) -> ParamGrid {
        ParamGrid::new(self.s_range, self.grid)
    }
}
