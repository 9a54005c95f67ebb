//! `planefix` command-line front end.

mod commands;
mod error;
mod input;
mod svg;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use planefix::Tolerances;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::commands::Outcome;
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "planefix",
    version,
    about = "Fixed-point index, variation, tree and lamination dynamics, external rays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Tolerances and output locations shared by every subcommand.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct Common {
    /// Relative geometric tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol_geom: f64,
    /// Relative tolerance for fixed-point tests.
    #[arg(long, default_value_t = 1e-9)]
    pub tol_fix: f64,
    /// Absolute landing threshold for external rays.
    #[arg(long, default_value_t = 5e-3)]
    pub tol_land: f64,
    /// Raster cells across the scene.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Report path (standard output when absent).
    #[serde(skip)]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG figure here.
    #[serde(skip)]
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

impl Common {
    pub fn tolerances(&self) -> Result<Tolerances, CliError> {
        let t = Tolerances { geom: self.tol_geom, fix: self.tol_fix, land: self.tol_land, grid: self.grid };
        t.validate().map_err(CliError::Input)?;
        Ok(t)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fixed-point index of a map on a simple closed curve.
    Index(commands::plane::IndexArgs),
    /// Variation of a bumping arc with an automatic junction.
    Variation(commands::plane::VariationArgs),
    /// Index = variation sum + 1 on an allowable partition.
    Fmot(commands::plane::FmotArgs),
    /// Locate and classify fixed points in a box.
    FixedPoints(commands::plane::FixedArgs),
    /// Boundary scrambling of a map on a continuum with exits.
    Scramble(commands::plane::ScrambleArgs),
    /// Fixed and periodic points of an edge-linear tree map.
    Dendrite(commands::tree::DendriteArgs),
    /// Pull back a lamination and build its quotient tree.
    Lamination(commands::tree::LaminationArgs),
    /// Trace an external ray of a polynomial.
    Ray(commands::poly::RayArgs),
    /// Check a puzzle piece or run the point-degeneracy harness.
    Puzzle(commands::poly::PuzzleArgs),
    /// Draw the figure of a saved report.
    Render(RenderArgs),
}

#[derive(Args, Debug)]
struct RenderArgs {
    /// Report written by another subcommand.
    #[arg(long)]
    report: PathBuf,
    /// SVG path (standard output when absent).
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn envelope(command: &str, config: Value, out: &Outcome) -> Value {
    json!({
        "tool": "planefix",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "status": out.status,
        "result": out.result,
    })
}

fn write_text(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn finish<A: Serialize>(command: &str, args: &A, common: &Common, out: Outcome) -> Result<i32, CliError> {
    let config = serde_json::to_value(args)?;
    let report = envelope(command, config, &out);
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    write_text(common.out.as_ref(), &text)?;
    if let Some(p) = &common.svg {
        write_text(Some(p), &out.figure.render())?;
    }
    Ok(out.status.code())
}

fn render(args: &RenderArgs) -> Result<i32, CliError> {
    let v: Value = input::read_json(&args.report.to_string_lossy())?;
    let command = v.get("command").and_then(Value::as_str).ok_or_else(|| CliError::input("report has no command"))?;
    let config = v.get("config").cloned().ok_or_else(|| CliError::input("report has no config"))?;
    let out = commands::rerun(command, config)?;
    write_text(args.svg.as_ref(), &out.figure.render())?;
    Ok(0)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    use commands::{plane, poly, tree};
    match &cli.command {
        Command::Index(a) => finish("index", a, &a.common, plane::index(a)?),
        Command::Variation(a) => finish("variation", a, &a.common, plane::variation(a)?),
        Command::Fmot(a) => finish("fmot", a, &a.common, plane::fmot(a)?),
        Command::FixedPoints(a) => finish("fixed-points", a, &a.common, plane::fixed_points(a)?),
        Command::Scramble(a) => finish("scramble", a, &a.common, plane::scramble(a)?),
        Command::Dendrite(a) => finish("dendrite", a, &a.common, tree::dendrite(a)?),
        Command::Lamination(a) => finish("lamination", a, &a.common, tree::lamination(a)?),
        Command::Ray(a) => finish("ray", a, &a.common, poly::ray(a)?),
        Command::Puzzle(a) => finish("puzzle", a, &a.common, poly::puzzle(a)?),
        Command::Render(a) => render(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("planefix: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
