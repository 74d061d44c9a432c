//! Command-line frontend.
//!
//! Every command reads JSON descriptors, runs one of the library checks and
//! writes `report.json` into the output directory. Exit codes: 0 when the
//! domain is flexible or the object is certified or contained, 2 when the
//! verdict is negative or a check fails, 1 on errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::convexgeo::ConvexBody;
use crate::domains::DomainSpec;
use crate::flexcheck::{
    classify_complex_complement, classify_convex_complement, classify_domain, verify_growth_condition,
    verify_tube_condition, ClassificationResult, Verdict, CERTIFY_RADII,
};
use crate::psh::{certify_p_convex, is_p_psh, PConvexCertificate, PshReport, ScalarField};
use crate::weierstrass::{
    conformality_residuals, contained_in, extend_arc, integrate, period_integrals, round_trip_error,
    surface_catalogue, to_csv, to_obj, verify_arc, ArcCheck, ArcSegment, CatalogueParams, ContainmentReport,
    ResidualReport, WeierstrassSample, PERIOD_TOL, SURFACES,
};
use crate::{Error, Point, Result};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_NULL_TOL: f64 = 1e-6;
pub const DEFAULT_DIST_TOL: f64 = 1e-8;
pub const DEFAULT_SURFACE_GRID: usize = 64;
/// Odd, so the centre of the box is a grid node.
pub const DEFAULT_PSH_GRID: usize = 17;
pub const DEFAULT_SEGMENTS: usize = 16;
pub const ENDPOINT_TOL: f64 = 1e-12;
pub const THREADS_ENV: &str = "MINFLEX_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Classify,
    CheckPsh,
    VerifySurface,
    Witness,
    ExtendArc,
    Catalogue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Obj,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Bound on null and harmonic residuals of sampled surfaces.
    pub null_tol: f64,
    /// Bound on arc derivative and integral mismatches.
    pub dist_tol: f64,
    /// Grid resolution; `None` picks the per-command default.
    pub grid_res: Option<usize>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { null_tol: DEFAULT_NULL_TOL, dist_tol: DEFAULT_DIST_TOL, grid_res: None }
    }
}

/// Everything a run depends on. The output directory is not serialised, so
/// reports from different directories compare equal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub domain: Option<PathBuf>,
    pub body: Option<PathBuf>,
    pub tau: Option<PathBuf>,
    pub surface: Option<String>,
    /// Treat `--body` as a convex body in C^n = R^{2n}.
    pub complex: bool,
    pub p: usize,
    pub radii: Vec<f64>,
    pub offset: Option<Vec<f64>>,
    pub from: Option<Vec<f64>>,
    pub to: Option<Vec<f64>>,
    pub segments: usize,
    pub seed: u64,
    pub format: Format,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            domain: None,
            body: None,
            tau: None,
            surface: None,
            complex: false,
            p: 2,
            radii: CERTIFY_RADII.to_vec(),
            offset: None,
            from: None,
            to: None,
            segments: DEFAULT_SEGMENTS,
            seed: DEFAULT_SEED,
            format: Format::Json,
            tolerances: Tolerances::default(),
            out: PathBuf::from("."),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        if !(t.null_tol > 0.0 && t.dist_tol > 0.0) {
            return Err(Error::InvalidParams("tolerances must be positive".into()));
        }
        if t.grid_res == Some(0) {
            return Err(Error::InvalidParams("grid resolution must be positive".into()));
        }
        if self.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidParams("radii must be positive".into()));
        }
        Ok(())
    }

    fn surface_grid(&self) -> usize {
        self.tolerances.grid_res.unwrap_or(DEFAULT_SURFACE_GRID)
    }

    fn psh_grid(&self) -> usize {
        self.tolerances.grid_res.unwrap_or(DEFAULT_PSH_GRID)
    }
}

#[derive(Debug, Parser)]
#[command(name = "minflex", version, about = "Flexibility of domains for minimal surfaces", allow_negative_numbers = true)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Domain descriptor (JSON).
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// Convex body descriptor (JSON); the domain is its complement.
    #[arg(long)]
    pub body: Option<PathBuf>,
    /// Read `--body` as a subset of C^n with interleaved real coordinates.
    #[arg(long)]
    pub complex: bool,
    /// Scalar field descriptor (JSON).
    #[arg(long)]
    pub tau: Option<PathBuf>,
    #[arg(long)]
    pub surface: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub radii: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Translation applied to catalogue surfaces.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub offset: Option<Vec<f64>>,
    /// Arc start point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub from: Option<Vec<f64>>,
    /// Arc end point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub to: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_SEGMENTS)]
    pub segments: usize,
    #[arg(long, default_value_t = DEFAULT_NULL_TOL)]
    pub null_tol: f64,
    #[arg(long, default_value_t = DEFAULT_DIST_TOL)]
    pub dist_tol: f64,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        RunConfig {
            command: c.command,
            domain: c.domain,
            body: c.body,
            tau: c.tau,
            surface: c.surface,
            complex: c.complex,
            p: c.p,
            radii: c.radii.unwrap_or_else(|| CERTIFY_RADII.to_vec()),
            offset: c.offset,
            from: c.from,
            to: c.to,
            segments: c.segments,
            seed: c.seed,
            format: c.format,
            tolerances: Tolerances { null_tol: c.null_tol, dist_tol: c.dist_tol, grid_res: c.grid },
            out: c.out,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCheck {
    pub surface: String,
    pub resolution: usize,
    pub residuals: ResidualReport,
    pub periods: Vec<Vec<f64>>,
    pub round_trip: f64,
    pub containment: Option<ContainmentReport>,
    pub mesh: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Classify {
        classification: ClassificationResult,
    },
    Witness {
        classification: ClassificationResult,
        tube_ok: bool,
        growth_ok: bool,
        radii: Vec<f64>,
    },
    CheckPsh {
        report: PshReport,
        certificate: Option<PConvexCertificate>,
        certificate_note: Option<String>,
    },
    VerifySurface {
        check: SurfaceCheck,
    },
    Catalogue {
        surfaces: Vec<SurfaceCheck>,
    },
    ExtendArc {
        #[serde(with = "crate::report::points_serde")]
        polyline: Vec<Point>,
        segments: Vec<ArcSegment>,
        check: ArcCheck,
    },
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Command,
    pub config: RunConfig,
    pub exit_code: i32,
    /// Rule tags behind the verdict.
    pub rules: Vec<String>,
    pub outcome: Outcome,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn read(path: &Option<PathBuf>, flag: &str) -> Result<String> {
    let p = path.as_ref().ok_or_else(|| Error::InvalidParams(format!("--{flag} is required")))?;
    Ok(fs::read_to_string(p)?)
}

fn point_arg(v: &Option<Vec<f64>>, flag: &str) -> Result<Point> {
    v.as_ref()
        .map(|v| Point::from_column_slice(v))
        .ok_or_else(|| Error::InvalidParams(format!("--{flag} is required")))
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Flexible => 0,
        Verdict::NotFlexible | Verdict::Unknown => 2,
    }
}

fn rule_tags(c: &ClassificationResult) -> Vec<String> {
    c.reason.iter().map(|r| format!("{r:?}")).collect()
}

/// The domain under test and its classification.
fn classify_input(cfg: &RunConfig) -> Result<(DomainSpec, ClassificationResult)> {
    if cfg.domain.is_some() {
        let omega = DomainSpec::from_json(&read(&cfg.domain, "domain")?)?;
        let c = classify_domain(&omega)?;
        return Ok((omega, c));
    }
    let body = ConvexBody::from_json(&read(&cfg.body, "body")?)?;
    let c = if cfg.complex { classify_complex_complement(&body)? } else { classify_convex_complement(&body)? };
    Ok((DomainSpec::ConvexComplement { body }, c))
}

fn check_surface(cfg: &RunConfig, name: &str, omega: Option<&DomainSpec>) -> Result<(SurfaceCheck, WeierstrassSample)> {
    let params = CatalogueParams { resolution: cfg.surface_grid(), offset: cfg.offset.clone(), ..Default::default() };
    let s = surface_catalogue(name, &params)?;
    let residuals = conformality_residuals(&s)?;
    let periods = period_integrals(&s)?;
    let k0 = s.domain.index(s.base.0, s.base.1);
    let rebuilt = integrate(s.domain.clone(), s.theta, s.h.clone(), s.base, s.f[k0].clone())?;
    let round_trip = round_trip_error(&rebuilt);
    let containment = omega.map(|o| contained_in(&s, o, false)).transpose()?;
    let tol = cfg.tolerances.null_tol;
    let passed = residuals.max_null <= tol
        && residuals.max_harmonic <= tol
        && periods.iter().all(|p| p.norm() <= PERIOD_TOL)
        && containment.as_ref().is_none_or(|c| c.inside == c.nodes);
    let check = SurfaceCheck {
        surface: name.to_string(),
        resolution: params.resolution,
        residuals,
        periods: periods.iter().map(|p| p.iter().copied().collect()).collect(),
        round_trip,
        containment,
        mesh: None,
        passed,
    };
    Ok((check, s))
}

fn write_mesh(cfg: &RunConfig, check: &mut SurfaceCheck, s: &WeierstrassSample) -> Result<()> {
    let (text, ext) = match cfg.format {
        Format::Json => return Ok(()),
        Format::Csv => (to_csv(s), "csv"),
        Format::Obj => (to_obj(s)?, "obj"),
    };
    let file = format!("{}.{ext}", check.surface);
    fs::write(cfg.out.join(&file), text)?;
    check.mesh = Some(file);
    Ok(())
}

/// Runs one command without touching the file system except for meshes.
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let (exit_code, rules, outcome) = match cfg.command {
        Command::Classify => {
            let (_, c) = classify_input(cfg)?;
            (verdict_code(c.verdict), rule_tags(&c), Outcome::Classify { classification: c })
        }
        Command::Witness => {
            let (omega, c) = classify_input(cfg)?;
            let (tube_ok, growth_ok) = match &c.witness {
                Some(w) => (
                    verify_tube_condition(&omega, &w.plane, 0.5 * w.delta)?,
                    verify_growth_condition(&omega, &w.plane, &cfg.radii)?,
                ),
                None => (false, false),
            };
            let code = if tube_ok && growth_ok { 0 } else { 2 };
            let rules = rule_tags(&c);
            (code, rules, Outcome::Witness { classification: c, tube_ok, growth_ok, radii: cfg.radii.clone() })
        }
        Command::CheckPsh => {
            let tau = ScalarField::from_json(&read(&cfg.tau, "tau")?)?;
            let grid = cfg.psh_grid();
            let report = is_p_psh(&tau, cfg.p, grid)?;
            let (certificate, certificate_note) = match certify_p_convex(&tau, cfg.p, grid) {
                Ok(c) => (Some(c), None),
                Err(e @ (Error::EmptyZeroSet | Error::InvalidParams(_))) => (None, Some(e.to_string())),
                Err(e) => return Err(e),
            };
            let mut rules = vec![if report.psh { "PPlurisubharmonic" } else { "NotPPlurisubharmonic" }.to_string()];
            if !report.gate_ok {
                rules.push("PAboveConvexityBound".into());
            }
            let code = if report.psh { 0 } else { 2 };
            (code, rules, Outcome::CheckPsh { report, certificate, certificate_note })
        }
        Command::VerifySurface => {
            let name = cfg.surface.as_deref().ok_or_else(|| Error::InvalidParams("--surface is required".into()))?;
            let omega = match &cfg.domain {
                Some(_) => Some(DomainSpec::from_json(&read(&cfg.domain, "domain")?)?),
                None => None,
            };
            let (mut check, s) = check_surface(cfg, name, omega.as_ref())?;
            write_mesh(cfg, &mut check, &s)?;
            let mut rules = vec!["NullQuadric".to_string(), "VanishingPeriods".to_string()];
            if omega.is_some() {
                rules.push("GridContainment".into());
            }
            (if check.passed { 0 } else { 2 }, rules, Outcome::VerifySurface { check })
        }
        Command::Catalogue => {
            let names: Vec<String> = match &cfg.surface {
                Some(n) => vec![n.clone()],
                None => SURFACES.iter().map(|s| s.to_string()).collect(),
            };
            let mut surfaces = Vec::with_capacity(names.len());
            for name in &names {
                let (mut check, s) = check_surface(cfg, name, None)?;
                write_mesh(cfg, &mut check, &s)?;
                surfaces.push(check);
            }
            let code = if surfaces.iter().all(|s| s.passed) { 0 } else { 2 };
            (code, vec!["NullQuadric".into(), "VanishingPeriods".into()], Outcome::Catalogue { surfaces })
        }
        Command::ExtendArc => {
            let omega = DomainSpec::from_json(&read(&cfg.domain, "domain")?)?;
            let (p, q) = (point_arg(&cfg.from, "from")?, point_arg(&cfg.to, "to")?);
            let arc = extend_arc(&p, &q, &omega, cfg.segments, cfg.seed)?;
            let check = verify_arc(&arc)?;
            let tol = cfg.tolerances.dist_tol;
            let ok = check.all_inside
                && check.endpoint_error <= ENDPOINT_TOL
                && check.derivative_mismatch <= tol
                && check.integral_mismatch <= tol;
            let outcome = Outcome::ExtendArc { polyline: arc.polyline, segments: arc.segments, check };
            (if ok { 0 } else { 2 }, vec!["NullLiftOfArc".into()], outcome)
        }
    };
    Ok(Report { command: cfg.command, config: cfg.clone(), exit_code, rules, outcome })
}

/// Runs a command and writes `report.json` into `cfg.out`.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    fs::create_dir_all(&cfg.out)?;
    let report = execute(cfg)?;
    fs::write(report_path(&cfg.out), report.to_json()?)?;
    Ok(report)
}

pub fn report_path(out: &Path) -> PathBuf {
    out.join("report.json")
}

/// Caps the global rayon pool at `MINFLEX_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParams(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(Error::InvalidParams(format!("{THREADS_ENV} must be positive")));
    }
    // a pool that already exists keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses arguments, runs and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let cfg = RunConfig::from(cli);
    match configure_threads().and_then(|_| run(&cfg)) {
        Ok(report) => {
            println!("{}: exit {} [{}]", report_path(&cfg.out).display(), report.exit_code, report.rules.join(", "));
            report.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
