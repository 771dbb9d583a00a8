//! `wlw`: integrate, classify and inspect rotational linear Weingarten
//! surfaces from the command line.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use wlw_core::check::{run_checks, CHECK_TOLERANCES};
use wlw_core::classifier::{classification_controls, classify_surface_with};
use wlw_core::io::{csv, json as wjson, obj, svg};
use wlw_core::phase::{critical_points, find_separatrix, phase_portrait, GridSpec};
use wlw_core::sweep::{env_threads, run_sweep, SweepSpec};
use wlw_core::{integrate, parse_angle, Error, InitialConditions, IntegrationControls, Params};

#[derive(Parser)]
#[command(name = "wlw", version, about = "Rotational linear Weingarten surfaces k1 = a k2 + b")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the profile curve; writes CSV, events JSON and optionally SVG.
    Integrate {
        #[command(flatten)]
        model: Model,
        /// Also write an SVG plot of the profile.
        #[arg(long)]
        svg: bool,
    },
    /// Classify the surface and print the report as JSON.
    Classify {
        #[command(flatten)]
        model: Model,
    },
    /// Phase portrait of the autonomous (theta, x) system.
    Phase {
        #[arg(short = 'a', allow_hyphen_values = true)]
        a: f64,
        #[arg(short = 'b', allow_hyphen_values = true)]
        b: f64,
        /// Locate the separatrix starting at theta0.
        #[arg(long)]
        separatrix: bool,
        #[arg(long, value_parser = angle, default_value = "0", allow_hyphen_values = true)]
        theta0: f64,
        /// Search bracket for the separatrix as `lo,hi`.
        #[arg(long, value_delimiter = ',')]
        bracket: Option<Vec<f64>>,
        /// Output directory for `phase.svg` and `phase.json`.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Triangulated surface of revolution as Wavefront OBJ.
    Mesh {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 128)]
        n_profile: usize,
        #[arg(long, default_value_t = 48)]
        n_revolve: usize,
        /// Number of periods for periodic classes.
        #[arg(long, default_value_t = 1)]
        periods: usize,
    },
    /// Classify every cell of a parameter grid given as a JSON spec.
    Sweep {
        /// Path of the sweep specification.
        #[arg(long)]
        spec: PathBuf,
        /// Overrides `output_dir` of the spec.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Run the invariant checks; exits 0 only if all pass.
    Check {
        #[command(flatten)]
        model: Model,
        /// Use this exponent instead of the matched one in the residual.
        #[arg(long)]
        p_override: Option<f64>,
    },
}

#[derive(Args)]
struct Model {
    #[arg(short = 'a', allow_hyphen_values = true)]
    a: f64,
    #[arg(short = 'b', allow_hyphen_values = true)]
    b: f64,
    #[arg(long, allow_hyphen_values = true)]
    x0: f64,
    /// Radians, or one of 0, pi/2, pi, 3pi/2.
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    theta0: f64,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    max_arclength: Option<f64>,
    /// Output path (a directory for `integrate`, a file otherwise).
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
}

fn angle(s: &str) -> Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

impl Model {
    fn setup(&self) -> Result<(Params, InitialConditions, IntegrationControls), Error> {
        self.setup_with(None)
    }

    /// As [`Model::setup`], with `defaults` replacing the default tolerances.
    fn setup_with(&self, defaults: Option<(f64, f64)>) -> Result<(Params, InitialConditions, IntegrationControls), Error> {
        let params = Params::new(self.a, self.b)?;
        let ic = InitialConditions::new(self.x0, self.theta0)?;
        let mut controls = classification_controls(&params, &ic);
        if let Some((rel, abs)) = defaults {
            controls = controls.with_tolerances(rel, abs);
        }
        if self.rel_tol.is_some() || self.abs_tol.is_some() {
            controls = controls.with_tolerances(
                self.rel_tol.unwrap_or(controls.rel_tol),
                self.abs_tol.unwrap_or(controls.abs_tol),
            );
        }
        if let Some(len) = self.max_arclength {
            controls = controls.with_max_arclength(len);
        }
        controls.validate()?;
        Ok((params, ic, controls))
    }
}

/// Exit status of a failed command.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Inconclusive(_) => 3,
        Error::Io(_) => 4,
        Error::InvalidParams(_)
        | Error::NonPositiveRadius(_)
        | Error::NonPositiveScale(_)
        | Error::InvalidSpec(_)
        | Error::NoBracket(_)
        | Error::WrongSignRegime(_)
        | Error::NotApplicable(_)
        | Error::Unsupported(_)
        | Error::DegenerateProfile(_) => 2,
        _ => 1,
    }
}

fn write_file(path: &Path, body: &[u8]) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, body)?;
    Ok(())
}

fn print(text: &str) -> Result<(), Error> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Integrate { model, svg: with_svg } => {
            let (params, ic, controls) = model.setup()?;
            let traj = integrate(&params, &ic, &controls)?;
            let mut table = Vec::new();
            csv::write_trajectory(&mut table, &traj)?;
            let events = wjson::to_pretty(&wjson::events_document(&traj));
            match &model.out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    write_file(&dir.join("trajectory.csv"), &table)?;
                    write_file(&dir.join("events.json"), events.as_bytes())?;
                    if with_svg {
                        let title = format!("a = {}, b = {}, x0 = {}, theta0 = {}", params.a(), params.b(), ic.x0(), ic.theta0());
                        write_file(&dir.join("profile.svg"), svg::profile_svg(&traj, &title).as_bytes())?;
                    }
                }
                None => print(std::str::from_utf8(&table).expect("CSV is ASCII"))?,
            }
        }
        Command::Classify { model } => {
            let (params, ic, controls) = model.setup()?;
            let report = classify_surface_with(&params, &ic, &controls)?;
            let text = wjson::to_pretty(&report);
            if let Some(path) = &model.out {
                write_file(path, text.as_bytes())?;
            }
            print(&text)?;
        }
        Command::Phase { a, b, separatrix, theta0, bracket, out } => {
            let params = Params::new(a, b)?;
            let points = critical_points(&params);
            let sep = if separatrix {
                let bracket = match bracket.as_deref() {
                    Some(&[lo, hi]) => (lo, hi),
                    Some(_) => return Err(Error::InvalidParams("--bracket takes two values lo,hi".into())),
                    _ if b != 0.0 => ((a / b).abs() * 0.1, (a / b).abs() * 10.0),
                    _ => return Err(Error::InvalidParams("--separatrix needs b != 0 or an explicit --bracket".into())),
                };
                Some((theta0, find_separatrix(&params, theta0, bracket)?))
            } else {
                None
            };
            let doc = json!({
                "a": a,
                "b": b,
                "critical_points": points,
                "separatrix": sep.map(|(theta0, x)| json!({ "theta0": theta0, "x": x })),
            });
            let text = wjson::to_pretty(&doc);
            if let Some(dir) = &out {
                let grid = GridSpec::standard(&params);
                let portrait = phase_portrait(&params, &grid)?;
                let title = format!("a = {a}, b = {b}");
                let plot = svg::phase_svg(&portrait, &points, grid.x_max, sep, &title);
                fs::create_dir_all(dir)?;
                write_file(&dir.join("phase.svg"), plot.as_bytes())?;
                write_file(&dir.join("phase.json"), text.as_bytes())?;
            }
            print(&text)?;
        }
        Command::Mesh { model, n_profile, n_revolve, periods } => {
            let spec = obj::MeshSpec::new(n_profile, n_revolve)?;
            let (params, ic, controls) = model.setup()?;
            let report = classify_surface_with(&params, &ic, &controls)?;
            let period = report.period.filter(|_| report.class.is_periodic());
            let mut controls = controls;
            if let Some(t) = period {
                let needed = (periods as f64 + 1.0) * t;
                if controls.max_arclength < needed {
                    controls = controls.with_max_arclength(needed);
                }
            }
            let traj = integrate(&params, &ic, &controls)?;
            let span = obj::mesh_span(&traj, period, periods.max(1));
            let mesh = obj::revolve(&traj, span, &spec)?;
            let mut body = Vec::new();
            mesh.write_obj(&mut body)?;
            match &model.out {
                Some(path) => write_file(path, &body)?,
                None => print(std::str::from_utf8(&body).expect("OBJ is ASCII"))?,
            }
        }
        Command::Sweep { spec, out } => {
            let text = fs::read_to_string(&spec)?;
            let mut spec = SweepSpec::from_json(&text)?;
            if let Some(dir) = out {
                spec.output_dir = dir;
            }
            let results = run_sweep(&spec, env_threads())?;
            let failed = results.iter().filter(|r| r.outcome.is_err()).count();
            let doc = json!({
                "cells": results.len(),
                "failed": failed,
                "summary": spec.output_dir.join("summary.csv"),
            });
            print(&wjson::to_pretty(&doc))?;
        }
        Command::Check { model, p_override } => {
            let (params, ic, controls) = model.setup_with(Some(CHECK_TOLERANCES))?;
            let traj = integrate(&params, &ic, &controls)?;
            let report = run_checks(&traj, p_override)?;
            let text = wjson::to_pretty(&report);
            if let Some(path) = &model.out {
                write_file(path, text.as_bytes())?;
            }
            print(&text)?;
            if !report.passed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&wjson::error_document(&e)).expect("error document"));
            ExitCode::from(exit_code(&e))
        }
    }
}
