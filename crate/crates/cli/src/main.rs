//! Batch driver: identity verification, fixtures, surface analysis and both
//! directions of the H-surface correspondence.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, ValueEnum};
use serde::Serialize;

use nks3::csvio::{read_epsilon, read_immersion, write_epsilon, write_immersion};
use nks3::diff::Numerics;
use nks3::error::CorrespondenceError;
use nks3::examples::{generate, Fixture, FixtureName, FixtureSpec};
use nks3::grid::HSurfaceGrid;
use nks3::hsystem::{
    epsilon_from_surface, h_equation_residual, mean_curvature, metric_factor_check, sphere_fit, surface_from_epsilon,
    MetricFactor, H_TARGET,
};
use nks3::identities::{verify, VerifyConfig};
use nks3::quat::UnitQuaternion;
use nks3::surface::analyze;

const VERSION: &str = concat!("nks3 ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    Verify,
    Fixture,
    Analyze,
    ToH,
    FromH,
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "nks3", version, about = "Almost complex surfaces in the nearly Kähler S³×S³")]
struct RunConfig {
    #[arg(long, value_enum)]
    command: Command,
    /// Input CSV (immersion for analyze/to-h, ε for from-h).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; reports of CSV-producing commands go to `<output>.report.json`.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 101)]
    nu: usize,
    #[arg(long, default_value_t = 101)]
    nv: usize,
    #[arg(long, default_value_t = 0.01)]
    du: f64,
    #[arg(long, default_value_t = 0.01)]
    dv: f64,
    /// Random samples per identity check.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Seed for sampled checks; `NKS3_SEED` takes precedence.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Multiplier on every certificate tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    #[arg(long)]
    fixture: Option<FixtureName>,
    /// Test hook: scales the `U` slot of `JZ` by `1 + x` during verify.
    #[arg(long, default_value_t = 0.0, hide = true)]
    j_perturbation: f64,
}

enum Failure {
    Input(anyhow::Error),
    Certificate(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn correspondence(e: CorrespondenceError) -> Failure {
    match e {
        CorrespondenceError::NotClosed { .. }
        | CorrespondenceError::HEquation { .. }
        | CorrespondenceError::Incompatible { .. } => Failure::Certificate(e.into()),
        other => Failure::Input(other.into()),
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'static str,
    config: &'a RunConfig,
    numerics: Numerics,
    #[serde(flatten)]
    body: T,
}

impl RunConfig {
    fn numerics(&self) -> Numerics {
        Numerics { tol_scale: self.tol_scale, ..Numerics::default() }
    }

    fn input(&self) -> anyhow::Result<&Path> {
        self.input.as_deref().ok_or_else(|| anyhow!("--input is required for {:?}", self.command))
    }

    fn output(&self) -> anyhow::Result<&Path> {
        self.output.as_deref().ok_or_else(|| anyhow!("--output is required for {:?}", self.command))
    }

    fn write_json<T: Serialize>(&self, path: Option<&Path>, body: T) -> anyhow::Result<()> {
        let env = Envelope { version: VERSION, config: self, numerics: self.numerics(), body };
        let mut text = serde_json::to_string_pretty(&env)?;
        text.push('\n');
        match path {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn sidecar<T: Serialize>(&self, body: T) -> anyhow::Result<()> {
        let mut name = self.output()?.as_os_str().to_owned();
        name.push(".report.json");
        self.write_json(Some(Path::new(&name)), body)
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn cmd_verify(cfg: &RunConfig) -> Outcome {
    let report = verify(&VerifyConfig { samples: cfg.samples, seed: cfg.seed, j_perturbation: cfg.j_perturbation });
    cfg.write_json(cfg.output.as_deref(), &report)?;
    if report.all_passed() {
        Ok(())
    } else {
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        Err(Failure::Certificate(anyhow!("identity checks failed: {}", failed.join(", "))))
    }
}

#[derive(Serialize)]
struct EpsilonCheck {
    h_equation_residual_max: f64,
    mean_curvature_mean: Option<f64>,
    mean_curvature_max_dev: Option<f64>,
}

fn epsilon_check(hs: &HSurfaceGrid, num: &Numerics) -> EpsilonCheck {
    let h = mean_curvature(hs, num).ok();
    EpsilonCheck {
        h_equation_residual_max: h_equation_residual(hs, num).max_abs(num.margin),
        mean_curvature_mean: h.as_ref().map(|m| m.h.mean(num.margin)),
        mean_curvature_max_dev: h.as_ref().map(|m| m.h.max_dev(num.margin, H_TARGET)),
    }
}

fn cmd_fixture(cfg: &RunConfig) -> Outcome {
    let name = cfg.fixture.ok_or_else(|| anyhow!("--fixture is required"))?;
    let spec = FixtureSpec::centred(name, cfg.nu, cfg.nv, cfg.du, cfg.dv)?;
    let num = cfg.numerics();
    let out = cfg.output()?;
    match generate(&spec, &num)? {
        Fixture::Immersion(grid) => {
            write_immersion(&grid, create(out)?)?;
            #[derive(Serialize)]
            struct Body {
                fixture: FixtureSpec,
                rows: usize,
            }
            cfg.sidecar(Body { fixture: spec, rows: grid.values.data.len() })?;
        }
        Fixture::Epsilon(e) => {
            write_epsilon(&e.hs, create(out)?)?;
            #[derive(Serialize)]
            struct Body {
                fixture: FixtureSpec,
                rows: usize,
                orientation: nks3::examples::Orientation,
                rejected_orientation_residual: f64,
                check: EpsilonCheck,
            }
            cfg.sidecar(Body {
                fixture: spec,
                rows: e.hs.eps.data.len(),
                orientation: e.orientation,
                rejected_orientation_residual: e.rejected_residual,
                check: epsilon_check(&e.hs, &num),
            })?;
        }
    }
    Ok(())
}

fn cmd_analyze(cfg: &RunConfig) -> Outcome {
    let grid = read_immersion(open(cfg.input()?)?)?;
    let num = cfg.numerics();
    let a = analyze(&grid, &num)?;
    cfg.write_json(cfg.output.as_deref(), a.report(&grid.spec, &num, cfg.seed))?;
    Ok(())
}

fn cmd_to_h(cfg: &RunConfig) -> Outcome {
    let grid = read_immersion(open(cfg.input()?)?)?;
    let num = cfg.numerics();
    let out = cfg.output()?;
    let a = analyze(&grid, &num)?;
    let e = epsilon_from_surface(&grid.spec, &a.coefficients, &num).map_err(correspondence)?;
    write_epsilon(&e.hs, create(out)?)?;
    #[derive(Serialize)]
    struct Body {
        loop_residual: f64,
        loop_tolerance: f64,
        check: EpsilonCheck,
        sphere_radius: Option<f64>,
        sphere_max_dev: Option<f64>,
        metric_factor: MetricFactor,
    }
    let fit = sphere_fit(&e.hs);
    cfg.sidecar(Body {
        loop_residual: e.loop_residual,
        loop_tolerance: e.tolerance,
        check: epsilon_check(&e.hs, &num),
        sphere_radius: fit.map(|f| f.radius),
        sphere_max_dev: fit.map(|f| f.max_dev),
        metric_factor: metric_factor_check(&grid, &e.hs, &num)?,
    })?;
    Ok(())
}

fn cmd_from_h(cfg: &RunConfig) -> Outcome {
    let hs = read_epsilon(open(cfg.input()?)?)?;
    let num = cfg.numerics();
    let out = cfg.output()?;
    let r = surface_from_epsilon(&hs, UnitQuaternion::ONE, UnitQuaternion::ONE, &num).map_err(correspondence)?;
    write_immersion(&r.grid, create(out)?)?;
    let a = analyze(&r.grid, &num)?;
    #[derive(Serialize)]
    struct Body {
        h_equation_residual_max: f64,
        compatibility_residual: f64,
        compatibility_tolerance: f64,
        norm_drift_max: f64,
        metric_factor: MetricFactor,
        hvv_sq_max_dev_from_third: f64,
        surface: nks3::surface::SurfaceReport,
    }
    cfg.sidecar(Body {
        h_equation_residual_max: r.h_residual,
        compatibility_residual: r.compatibility,
        compatibility_tolerance: r.tolerance,
        norm_drift_max: r.drift_max,
        metric_factor: metric_factor_check(&r.grid, &hs, &num)?,
        hvv_sq_max_dev_from_third: a.sff.hvv_sq.max_dev(num.margin, 1.0 / 3.0),
        surface: a.report(&r.grid.spec, &num, cfg.seed),
    })?;
    Ok(())
}

fn run(cfg: &RunConfig) -> Outcome {
    match cfg.command {
        Command::Verify => cmd_verify(cfg),
        Command::Fixture => cmd_fixture(cfg),
        Command::Analyze => cmd_analyze(cfg),
        Command::ToH => cmd_to_h(cfg),
        Command::FromH => cmd_from_h(cfg),
    }
}

fn main() -> ExitCode {
    let mut cfg = RunConfig::parse();
    if let Ok(s) = std::env::var("NKS3_SEED") {
        match s.trim().parse() {
            Ok(seed) => cfg.seed = seed,
            Err(_) => {
                eprintln!("error: NKS3_SEED is not an unsigned integer: {s:?}");
                return ExitCode::from(3);
            }
        }
    }
    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Certificate(e)) => {
            eprintln!("certificate failure: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
