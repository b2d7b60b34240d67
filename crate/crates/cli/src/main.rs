//! `canalkit`: canal surface curvatures, Weingarten checks and mesh export from a JSON scene.

mod scene;

use std::path::PathBuf;
use std::process::ExitCode;

use canalkit_core::{
    classify, curvature_triple, export_csv, export_obj, fit_linear, tessellate, verify, CanalSurface, Error, FitMask,
    Interval, MeshOptions, Sign,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use scene::Scene;

const EXIT_VERIFY: u8 = 1;
const EXIT_SCENE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_IO: u8 = 4;

/// A command failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn scene(message: String) -> Self {
        Self { code: EXIT_SCENE, message }
    }

    pub fn io(message: String) -> Self {
        Self { code: EXIT_IO, message }
    }

    fn degenerate(message: String) -> Self {
        Self { code: EXIT_DEGENERATE, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } | Error::Csv { .. } => EXIT_IO,
            Error::SingularPoint { .. }
            | Error::DegenerateSecondForm { .. }
            | Error::DegenerateQ { .. }
            | Error::RankDeficient { .. }
            | Error::EmptyGrid
            | Error::InsufficientSamples { .. }
            | Error::AllSingular => EXIT_DEGENERATE,
            _ => EXIT_SCENE,
        };
        Self { code, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "canalkit", version, about = "Curvatures and Weingarten relations of canal surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scene file (JSON).
    #[arg(long)]
    scene: PathBuf,
    /// Branch of Q, overriding the scene.
    #[arg(long, allow_negative_numbers = true, value_parser = parse_sign)]
    sign: Option<Sign>,
    /// Tolerance override KEY=VALUE, repeatable (forms, curvature, second_gaussian, area, jacobi, oracle_step).
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    tolerances: Vec<String>,
}

#[derive(Args)]
struct Point {
    #[arg(long, allow_negative_numbers = true)]
    s: f64,
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Obj,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// K, H and K_II at one point.
    Curvature {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        at: Point,
    },
    /// Position, normal and fundamental form coefficients at one point.
    Forms {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        at: Point,
    },
    /// Tube / revolution detection and Weingarten verdicts over the scene grid.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Least-squares linear Weingarten relation aK + bH + cK_II = d.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Curvatures in the relation: KH, KKII, HKII or KHKII.
        #[arg(long, default_value = "KH", value_parser = parse_mask)]
        mask: FitMask,
    },
    /// Closed forms against the finite-difference oracles; exits 1 on any failed check.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Writes a quad mesh over the scene's s range and a full turn in t.
    Mesh {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "obj")]
        format: Format,
        /// Connect the last t column back to the first.
        #[arg(long)]
        weld: bool,
    },
}

fn parse_sign(text: &str) -> Result<Sign, String> {
    match text {
        "1" | "+1" | "+" => Ok(Sign::Plus),
        "-1" | "-" => Ok(Sign::Minus),
        _ => Err(format!("sign must be 1 or -1, got `{text}`")),
    }
}

fn parse_mask(text: &str) -> Result<FitMask, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

fn load(common: &Common) -> Result<(Scene, CanalSurface), Failure> {
    let mut scene = Scene::load(&common.scene)?;
    if let Some(sign) = common.sign {
        scene.sign = sign;
    }
    for t in &common.tolerances {
        scene.set_tolerance(t)?;
    }
    let surface = scene.surface()?;
    Ok((scene, surface))
}

fn check_point(surface: &CanalSurface, at: &Point) -> Result<(), Failure> {
    let Interval { start, end } = surface.s_range();
    if !(at.s.is_finite() && at.t.is_finite()) || at.s < start || at.s > end {
        return Err(Failure::scene(format!("point ({}, {}) is outside s_range [{start}, {end}]", at.s, at.t)));
    }
    Ok(())
}

fn print<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Curvature { common, at } => {
            let (_, surface) = load(&common)?;
            check_point(&surface, &at)?;
            let triple = curvature_triple(&surface, at.s, at.t)?;
            if !triple.flags.regular {
                return Err(Failure::degenerate(format!("singular point at (s, t) = ({}, {})", at.s, at.t)));
            }
            print(&triple)?;
        }
        Command::Forms { common, at } => {
            let (_, surface) = load(&common)?;
            check_point(&surface, &at)?;
            let point = surface.evaluate(at.s, at.t)?;
            let normal = match surface.normal(at.s, at.t) {
                Ok(n) => Some([n.x, n.y, n.z]),
                Err(e) if e.is_pointwise_degeneracy() => None,
                Err(e) => return Err(e.into()),
            };
            let f = surface.forms(at.s, at.t)?;
            print(&json!({
                "s": at.s,
                "t": at.t,
                "point": [point.x, point.y, point.z],
                "normal": normal,
                "regular": normal.is_some(),
                "E": f.E, "F": f.F, "G": f.G,
                "e": f.e, "f": f.f, "g": f.g,
                "EG_minus_F2": f.area2,
                "eg_minus_f2": f.det2,
            }))?;
        }
        Command::Classify { common } => {
            let (scene, surface) = load(&common)?;
            print(&classify(&surface, &scene.grid(), scene.tolerances.jacobi)?)?;
        }
        Command::Fit { common, mask } => {
            let (scene, surface) = load(&common)?;
            print(&fit_linear(&surface, mask, &scene.grid())?)?;
        }
        Command::Verify { common } => {
            let (scene, surface) = load(&common)?;
            let report = verify(&surface, &scene.grid(), &scene.tolerances)?;
            print(&report)?;
            if !report.passed {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    eprintln!("canalkit: {} delta {:e} exceeds {:e}", c.name, c.max_delta, c.tolerance);
                }
                return Ok(EXIT_VERIFY);
            }
        }
        Command::Mesh { common, out, format, weld } => {
            let (scene, surface) = load(&common)?;
            let opts = MeshOptions { with_curvature: matches!(format, Format::Csv), weld_seam: weld };
            let full_turn = Interval::new(0.0, std::f64::consts::TAU)?;
            let mesh = tessellate(&surface, surface.s_range(), full_turn, scene.grid.ns, scene.grid.nt, opts)?;
            match format {
                Format::Obj => export_obj(&mesh, &out)?,
                Format::Csv => export_csv(&mesh, &out)?,
            }
            eprintln!("canalkit: wrote {}", out.display());
            print(&json!({
                "path": out,
                "vertices": mesh.vertices.len(),
                "faces": mesh.quads.len(),
                "masked": mesh.masked.len(),
            }))?;
        }
    }
    Ok(0)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("CANALKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::scene(format!("CANALKIT_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::scene(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("canalkit: error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
