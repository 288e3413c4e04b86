//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 for usage, configuration, input or I/O
//! errors, 2 when a simulation breaks down (the frames up to the breakdown
//! are still written).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;

use clap::{Parser, Subcommand};
use log::error;
use serde::Serialize;

use crate::dynamics::VelocityField;
use crate::error::{Error, Result};
use crate::evolution::{run_streaming, FrameRecord};
use crate::exec::Execution;
use crate::geometry::{replicate, ReplicatedContour, StripPoint};
use crate::io::frames::{format_float, to_json_line};
use crate::io::{build_initial_system, parse_config, read_frames, FrameWriter};
use crate::kernels::{beta, green, grad_k_inf, k_inf, rho};
use crate::linalg::{Mat2, Vec2};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BREAKDOWN: i32 = 2;

/// Frames buffered between the integrator and the writer thread.
const WRITE_QUEUE: usize = 16;

#[derive(Debug, Parser)]
#[command(name = "vortex-strip", version, about = "Contour dynamics of vortex patches on the periodic strip")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a configuration and write frames as JSON Lines.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the initial velocity field on a grid and write CSV.
    Velocity {
        #[arg(long)]
        config: PathBuf,
        /// `nx=..,ny=..,x2min=..,x2max=..`
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the kernel values at a point as JSON.
    Kernel {
        /// `x1,x2`
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Export horizontally replicated copies of every frame.
    Replicate {
        #[arg(long)]
        frames: PathBuf,
        #[arg(long)]
        copies: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Runs the CLI with standard output as the kernel destination.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    cli_main_with(argv, &mut stdout.lock())
}

pub fn cli_main_with<I, T>(argv: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Simulate { config, out } => simulate(&config, &out),
        Command::Velocity { config, grid, out } => velocity_grid(&config, &grid, &out).map(|()| EXIT_OK),
        Command::Kernel { point } => kernel(&point, stdout).map(|()| EXIT_OK),
        Command::Replicate { frames, copies, out } => {
            replicate_frames(&frames, copies, &out).map(|()| EXIT_OK)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::config(path.display().to_string(), e.to_string()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io { frame: 0, message: format!("{}: {e}", path.display()) })
}

fn simulate(config_path: &Path, out: &Path) -> Result<i32> {
    let config = parse_config(&read_file(config_path)?)?;
    let file = create(out)?;

    let (tx, rx) = mpsc::sync_channel::<FrameRecord>(WRITE_QUEUE);
    let writer = thread::spawn(move || -> Result<usize> {
        let mut w = FrameWriter::new(file);
        for frame in rx {
            w.write(&frame)?;
        }
        let n = w.written();
        w.finish()?;
        Ok(n)
    });

    let result = run_streaming(&config, Execution::default(), |frame| {
        tx.send(frame).map_err(|_| Error::Io { frame: 0, message: "frame writer stopped".into() })
    });
    drop(tx);
    let written = writer.join().expect("frame writer thread panicked")?;
    match result? {
        None => Ok(EXIT_OK),
        Some(b) => {
            eprintln!(
                "breakdown in step {} after t = {}: {} ({written} frames written)",
                b.step, b.t, b.error
            );
            Ok(EXIT_BREAKDOWN)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x2min: f64,
    pub x2max: f64,
}

impl GridSpec {
    /// Parses `nx=..,ny=..,x2min=..,x2max=..` (keys in any order).
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::config("--grid", msg);
        let (mut nx, mut ny, mut lo, mut hi) = (None, None, None, None);
        for part in text.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{part}`")))?;
            let value = value.trim();
            let int = || value.parse::<usize>().map_err(|e| bad(format!("{key}: {e}")));
            let real = || value.parse::<f64>().map_err(|e| bad(format!("{key}: {e}")));
            match key.trim() {
                "nx" => nx = Some(int()?),
                "ny" => ny = Some(int()?),
                "x2min" => lo = Some(real()?),
                "x2max" => hi = Some(real()?),
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        let missing = |k: &str| bad(format!("missing `{k}`"));
        let spec = GridSpec {
            nx: nx.ok_or_else(|| missing("nx"))?,
            ny: ny.ok_or_else(|| missing("ny"))?,
            x2min: lo.ok_or_else(|| missing("x2min"))?,
            x2max: hi.ok_or_else(|| missing("x2max"))?,
        };
        if spec.nx == 0 || spec.ny == 0 {
            return Err(bad("nx and ny must be positive".into()));
        }
        if !(spec.x2min.is_finite() && spec.x2max.is_finite() && spec.x2min <= spec.x2max) {
            return Err(bad("need finite x2min <= x2max".into()));
        }
        Ok(spec)
    }

    /// Grid points row by row: `x1 = -1/2 + i/nx`, `x2` evenly from `x2min`
    /// to `x2max`.
    pub fn points(&self) -> Vec<StripPoint> {
        let dy = if self.ny > 1 { (self.x2max - self.x2min) / (self.ny - 1) as f64 } else { 0.0 };
        (0..self.ny)
            .flat_map(|j| {
                let x2 = self.x2min + j as f64 * dy;
                (0..self.nx).map(move |i| {
                    StripPoint::new(-0.5 + i as f64 / self.nx as f64, x2).expect("grid point lies in the strip")
                })
            })
            .collect()
    }
}

fn velocity_grid(config_path: &Path, grid: &str, out: &Path) -> Result<()> {
    let grid = GridSpec::parse(grid)?;
    let config = parse_config(&read_file(config_path)?)?;
    let system = build_initial_system(&config)?;
    let points = grid.points();
    let values = VelocityField::new(&system).at_many(&points, Execution::default());

    let mut w = create(out)?;
    let io_err = |e: std::io::Error| Error::Io { frame: 0, message: e.to_string() };
    writeln!(w, "x1,x2,u1,u2").map_err(io_err)?;
    for (p, v) in points.iter().zip(values) {
        let u = match v {
            Ok(u) => u,
            Err(Error::NearBoundary { .. }) => Vec2::new(f64::NAN, f64::NAN),
            Err(e) => return Err(e),
        };
        writeln!(
            w,
            "{},{},{},{}",
            format_float(p.x1()),
            format_float(p.x2()),
            format_float(u.x),
            format_float(u.y)
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[derive(Debug, Serialize)]
struct KernelReport {
    point: Vec2,
    rho: f64,
    green: f64,
    k_inf: Vec2,
    grad_k_inf: Mat2,
    beta: Mat2,
}

fn parse_point(text: &str) -> Result<Vec2> {
    let bad = || Error::config("--point", format!("expected `x1,x2`, got `{text}`"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let x1 = a.trim().parse::<f64>().map_err(|_| bad())?;
    let x2 = b.trim().parse::<f64>().map_err(|_| bad())?;
    let p = Vec2::new(x1, x2);
    if !p.is_finite() {
        return Err(bad());
    }
    Ok(p)
}

fn kernel(point: &str, stdout: &mut dyn Write) -> Result<()> {
    let d = parse_point(point)?;
    let report = KernelReport {
        point: d,
        rho: rho(d),
        green: green(d)?,
        k_inf: k_inf(d)?,
        grad_k_inf: grad_k_inf(d)?,
        beta: beta(d)?,
    };
    let json = serde_json::to_string(&report).expect("kernel report serializes");
    writeln!(stdout, "{json}").map_err(|e| Error::Io { frame: 0, message: e.to_string() })
}

#[derive(Debug, Serialize)]
struct ReplicatedFrame {
    t: f64,
    contours: Vec<ReplicatedContour>,
}

fn replicate_frames(frames_path: &Path, copies: usize, out: &Path) -> Result<()> {
    let file = File::open(frames_path)
        .map_err(|e| Error::Io { frame: 0, message: format!("{}: {e}", frames_path.display()) })?;
    let frames = read_frames(BufReader::new(file))?;
    let mut w = create(out)?;
    for (i, frame) in frames.iter().enumerate() {
        // the vorticity strength does not affect the geometry
        let system = frame.system(1.0)?;
        let record = ReplicatedFrame { t: frame.t, contours: replicate(&system, copies)? };
        let mut line = to_json_line(&record).map_err(|e| Error::Io { frame: i, message: e.to_string() })?;
        line.push(b'\n');
        w.write_all(&line).map_err(|e| Error::Io { frame: i, message: e.to_string() })?;
    }
    w.flush().map_err(|e| Error::Io { frame: frames.len(), message: e.to_string() })
}
