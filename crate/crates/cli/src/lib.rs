//! Command-line front end: generate, validate, check, route, verify, plot.
//!
//! Every command returns an exit code from [`exit`]; diagnostics go to the
//! error stream and never accompany a zero exit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use polyconn::crossing::check_um;
use polyconn::instances::{
    generate, generate_query, GenParams, InstanceFile, Query, RouteFile, VerifyDto,
};
use polyconn::plot::render_svg;
use polyconn::reroute::{assemble_route, check_query};
use polyconn::validate::validate_family;
use polyconn::verify::verify_route;
use polyconn::{Error, Instance, NormSpec};

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 10;
    pub const PARSE: i32 = 11;
    pub const INPUT: i32 = 12;
    pub const UM_VIOLATION: i32 = 13;
    pub const HYPOTHESIS: i32 = 14;
    pub const VERIFICATION: i32 = 15;
    pub const ENGINE: i32 = 16;
    pub const UNSUPPORTED: i32 = 17;
    pub const GENERATION: i32 = 18;
}

#[derive(Debug, Parser)]
#[command(
    name = "polyconn",
    version,
    about = "Reroute polylines around open obstacles"
)]
pub struct Cli {
    /// Override the boundary-band half-width `class_eps`.
    #[arg(long, global = true)]
    pub tol_class: Option<f64>,
    /// Override the required separation `sep`.
    #[arg(long, global = true)]
    pub tol_sep: Option<f64>,
    /// Seed for `gen`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sampling step for verification (default: smallest collar width / 20).
    #[arg(long, global = true)]
    pub step: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random ball instance.
    Gen {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        count: usize,
        /// `p` exponent, or `max`.
        #[arg(long, default_value = "2")]
        norm: String,
        #[arg(long, default_value_t = 0.3)]
        radius_min: f64,
        #[arg(long, default_value_t = 1.0)]
        radius_max: f64,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        region_lo: f64,
        #[arg(long, default_value_t = 10.0)]
        region_hi: f64,
        /// Minimum gap between closures and to the region boundary.
        #[arg(long, default_value_t = 0.0)]
        min_gap: f64,
        /// Vertices of a random query polyline to embed (0 for none).
        #[arg(long, default_value_t = 0)]
        query_vertices: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the separation hypotheses of an instance.
    Validate { instance: PathBuf },
    /// Check that the query polyline meets obstacle boundaries finitely often.
    CheckUm { instance: PathBuf },
    /// Reroute the query polyline and verify the result.
    Route {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify a route file against an instance.
    Verify { instance: PathBuf, route: PathBuf },
    /// Render a planar instance (and optionally a route) as SVG.
    Plot {
        instance: PathBuf,
        #[arg(long)]
        route: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// A failed command: exit code and message.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) => exit::PARSE,
            Error::Instance(_) | Error::Parameter(_) | Error::Input(_) => exit::INPUT,
            Error::UmViolation { .. } => exit::UM_VIOLATION,
            Error::Hypothesis(_) => exit::HYPOTHESIS,
            Error::Schedule(_) | Error::Collar(_) | Error::Engine(_) => exit::ENGINE,
            Error::Unsupported(_) => exit::UNSUPPORTED,
            Error::Generation(_) => exit::GENERATION,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let text = e.render().to_string();
            if code == exit::OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            code
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Gen {
            dim,
            count,
            norm,
            radius_min,
            radius_max,
            region_lo,
            region_hi,
            min_gap,
            query_vertices,
            output,
        } => parse_norm(norm, *dim).and_then(|norm| {
            let mut params = GenParams {
                dim: *dim,
                count: *count,
                norm,
                radius: (*radius_min, *radius_max),
                region: (*region_lo, *region_hi),
                min_gap: *min_gap,
                ..GenParams::default()
            };
            apply_tolerances(cli, &mut params.tol);
            cmd_gen(
                cli.seed.unwrap_or(1),
                &params,
                *query_vertices,
                output.as_deref(),
                out,
            )
        }),
        Command::Validate { instance } => cmd_validate(cli, instance, out),
        Command::CheckUm { instance } => cmd_check_um(cli, instance, out),
        Command::Route { instance, output } => cmd_route(cli, instance, output.as_deref(), out),
        Command::Verify { instance, route } => cmd_verify(cli, instance, route, out),
        Command::Plot {
            instance,
            route,
            output,
        } => cmd_plot(cli, instance, route.as_deref(), output.as_deref(), out),
    };
    match result {
        Ok(()) => exit::OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn parse_norm(s: &str, dim: usize) -> std::result::Result<NormSpec, Failure> {
    let norm = if s == "max" || s == "inf" {
        NormSpec::Max
    } else {
        let p: f64 = s.parse().map_err(|_| {
            Failure::new(
                exit::INPUT,
                format!("norm must be a number p >= 1 or `max`, got `{s}`"),
            )
        })?;
        NormSpec::P(p)
    };
    norm.validate(dim)?;
    Ok(norm)
}

fn apply_tolerances(cli: &Cli, tol: &mut polyconn::TolerancePolicy) {
    if let Some(c) = cli.tol_class {
        tol.class_eps = c;
    }
    if let Some(s) = cli.tol_sep {
        tol.sep = s;
    }
}

fn read(path: &Path) -> std::result::Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::new(exit::IO, format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> CmdResult {
    match path {
        Some(p) => {
            fs::write(p, bytes).map_err(|e| Failure::new(exit::IO, format!("{}: {e}", p.display())))
        }
        None => out
            .write_all(bytes)
            .map_err(|e| Failure::new(exit::IO, format!("stdout: {e}"))),
    }
}

fn load(cli: &Cli, path: &Path) -> std::result::Result<(Instance, Option<Query>), Failure> {
    let file = InstanceFile::parse(&read(path)?)?;
    let mut inst = file.instance()?;
    apply_tolerances(cli, &mut inst.tol);
    inst.tol.validate()?;
    let query = file.query()?;
    Ok((inst, query))
}

fn require_query(q: Option<Query>) -> std::result::Result<Query, Failure> {
    q.ok_or_else(|| Failure::new(exit::INPUT, "instance file has no query"))
}

fn require_valid(inst: &Instance) -> CmdResult {
    let report = validate_family(inst);
    if report.pass {
        return Ok(());
    }
    let msg: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    Err(Failure::new(
        exit::HYPOTHESIS,
        format!("hypothesis failure: {}", msg.join("; ")),
    ))
}

fn default_step(cli: &Cli, inst: &Instance) -> f64 {
    cli.step
        .unwrap_or_else(|| validate_family(inst).min_width().map_or(1.0, |w| w / 20.0))
}

pub fn cmd_gen(
    seed: u64,
    params: &GenParams,
    query_vertices: usize,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let inst = generate(seed, params)?;
    let query = if query_vertices > 0 {
        let margin = params.min_gap.max(4.0 * params.tol.sep);
        Some(generate_query(seed, &inst, query_vertices, margin)?)
    } else {
        None
    };
    emit(
        output,
        &InstanceFile::from_instance(&inst, query.as_ref()).to_bytes(),
        out,
    )
}

pub fn cmd_validate(cli: &Cli, path: &Path, out: &mut dyn Write) -> CmdResult {
    let (inst, _) = load(cli, path)?;
    let report = validate_family(&inst);
    let mut text = String::new();
    for (a, b, g) in &report.gaps {
        text.push_str(&format!("gap {a} {b} {g}\n"));
    }
    for (i, c) in report.clearances.iter().enumerate() {
        text.push_str(&format!("clearance {i} {c}\n"));
    }
    for c in &report.collars {
        text.push_str(&format!("collar {} {}\n", c.obstacle, c.width));
    }
    emit(None, text.as_bytes(), out)?;
    require_valid(&inst)?;
    emit(None, b"pass\n", out)
}

pub fn cmd_check_um(cli: &Cli, path: &Path, out: &mut dyn Write) -> CmdResult {
    let (inst, query) = load(cli, path)?;
    let q = require_query(query)?;
    let report = check_um(&q.polyline.normalized(), &inst);
    let mut text = String::new();
    for (j, c) in report.counts.iter().enumerate() {
        text.push_str(&format!("edge {j} crossings {c}\n"));
    }
    emit(None, text.as_bytes(), out)?;
    if let Some(e) = report.to_error() {
        return Err(e.into());
    }
    emit(None, b"pass\n", out)
}

pub fn cmd_route(cli: &Cli, path: &Path, output: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let (inst, query) = load(cli, path)?;
    let q = require_query(query)?;
    check_query(&q.x, &q.y, &q.polyline, &inst)?;
    require_valid(&inst)?;
    if let Some(e) = check_um(&q.polyline.normalized(), &inst).to_error() {
        return Err(e.into());
    }
    let route = assemble_route(&q.x, &q.y, &q.polyline, &inst)?;
    let step = default_step(cli, &inst);
    let report = verify_route(&route.path, &inst, step)?;
    let file = RouteFile::new(&route, Some(VerifyDto::new(&report, step)));
    if !report.pass {
        return Err(Failure::new(
            exit::VERIFICATION,
            format!(
                "verification failed: {} violations, min margin {}",
                report.violations.len(),
                report.min_margin
            ),
        ));
    }
    emit(output, &file.to_bytes(), out)
}

pub fn cmd_verify(cli: &Cli, path: &Path, route: &Path, out: &mut dyn Write) -> CmdResult {
    let (inst, _) = load(cli, path)?;
    let r = RouteFile::parse(&read(route)?)?;
    let poly = r.polyline()?;
    let step = default_step(cli, &inst);
    let report = verify_route(&poly, &inst, step)?;
    let text = format!(
        "samples {}\nmin_margin {}\nviolations {}\n",
        report.samples_checked,
        report.min_margin,
        report.violations.len()
    );
    emit(None, text.as_bytes(), out)?;
    if !report.pass {
        return Err(Failure::new(
            exit::VERIFICATION,
            "route enters an obstacle or leaves U",
        ));
    }
    emit(None, b"pass\n", out)
}

pub fn cmd_plot(
    cli: &Cli,
    path: &Path,
    route: Option<&Path>,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let (inst, query) = load(cli, path)?;
    let route = match route {
        Some(p) => Some(RouteFile::parse(&read(p)?)?),
        None => None,
    };
    let poly = route.as_ref().map(|r| r.polyline()).transpose()?;
    let pieces = route.as_ref().map(|r| r.pieces()).unwrap_or_default();
    let svg = render_svg(
        &inst,
        query.as_ref().map(|q| &q.polyline),
        poly.as_ref().map(|p| (p, pieces.as_slice())),
    )?;
    emit(output, svg.as_bytes(), out)
}
